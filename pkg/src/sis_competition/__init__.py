"""Exact simulation and limit-law checks for two competing SIS strains."""
__version__ = "0.1.0"

from .errors import InapplicableError, IntegrationError, NoConvergenceError, RegimeError
from .laws import EULER_GAMMA, STANDARD_GUMBEL, ExponentialLaw, GumbelLaw
from .model import (ChainState, ModelParams, RateQuad, Regime, RegimeTag, classify_regime,
                    near_critical_statistic, reproductive_ratios, transition_rates, zeeman_check)
from .bdchain import BdParams, bd_extinction_cdf, bd_extinction_quantile, bd_gumbel_limit
from .stats import SampleSet, gumbel_fit_moments, ks_distance, standardize, summary_stats
from .theory import (phase_breakdown, predict_kappa_nearcrit, predict_kappa_thm2,
                     predict_sis_subcritical, predict_tau_supercritical)
from .gillespie import (StopRule, sample_extinction_times, sample_linear_bd,
                        simulate_competition, simulate_linear_bd)
