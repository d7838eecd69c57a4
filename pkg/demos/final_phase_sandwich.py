'''The endgame: strain 2 as a subcritical birth-death chain.

Once strain 1 sits at its endemic level 1/3, each strain-2 infective gives
birth at about lambda2 * mu1 / lambda1 = 0.8 and dies at rate 1.  The chain
below runs strain 2 between two linear birth-death chains, W below and Z
above, on a common event clock.  The ordering W <= X2 <= Z must hold at
every event while strain 1 stays in its band.
'''
import math

import numpy as np

from sis_competition import ChainState, ModelParams
from sis_competition.bdchain import BdParams, bd_gumbel_limit
from sis_competition.gillespie import sandwich_birth_rates, simulate_bd_sandwich

params = ModelParams(1.5, 1.0, 1.2, 1.0, n=10**5)
eps = 0.24
start = ChainState(params.n // 3, int(math.floor(params.n**0.75)))
bw, bz = sandwich_birth_rates(params, eps)
print(f"birth rates: W {bw:.4f}, X2 about {1.2 / 1.5:.4f}, Z {bz:.4f} (death rate 1)")

for seed in range(3):
    c = simulate_bd_sandwich(params, start, eps, seed, stride=5000)
    print(f"seed {seed}: X2 extinct at t = {c.times[-1]:7.3f}, {c.events} events, "
          f"{c.violations} ordering violations, band left: "
          f"{'never' if c.band_valid else f'{c.band_exit_time:.2f}'}")

law = bd_gumbel_limit(BdParams(1.2 / 1.5, 1.0, params.n**0.75))
print(f"\nGumbel limit for the endgame from N^(3/4): location {law.location:.2f}, "
      f"scale {law.scale:.2f}")
