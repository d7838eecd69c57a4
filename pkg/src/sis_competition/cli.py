"""Command-line driver: ``sis-competition {simulate,predict,fluid,verify} --config C --out D``.

Exit codes: 0 success or PASS, 1 FAIL verdict, 2 usage or config error,
3 runtime error (including an unwritable output directory).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import __version__, fluid
from .errors import RegimeError
from .gillespie import ExtinctionSample, StopRule, sample_extinction_times
from .laws import STANDARD_GUMBEL, ExponentialLaw
from .model import ChainState, ModelParams, classify_regime
from .stats import SampleSet, gumbel_fit_moments, ks_distance, standardize, summary_stats
from .theory import (phase_breakdown, predict_kappa_nearcrit, predict_kappa_thm2,
                     predict_sis_subcritical, predict_tau_supercritical)

PREDICTORS = ("thm2", "nearcrit", "sis_sub", "tau_super")
TAU_PREDICTORS = ("sis_sub", "tau_super")
CSV_HEADER = ("replicate", "seed", "kappa", "kappa_censored", "tau", "tau_censored", "events")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

_TOP_KEYS = {"params", "n_values", "initial", "replicates", "master_seed", "stop", "predictor",
             "tolerances", "outputs", "fluid"}
_SECTION_KEYS = {
    "params": {"lambda1", "mu1", "lambda2", "mu2"},
    "initial": {"alpha", "beta", "x1", "x2"},
    "stop": {"max_events", "max_time", "stop_on_kappa"},
    "tolerances": {"ks_max", "mean_abs_err_max"},
    "outputs": {"samples", "summary", "report", "prediction", "fluid"},
    "fluid": {"t_end", "points", "omega", "delta", "t0"},
}
_DEFAULT_OUTPUTS = {"samples": "samples_N{n}.csv", "summary": "summary.json",
                    "report": "report.json", "prediction": "prediction.json",
                    "fluid": "fluid"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    params: dict
    n_values: list
    initial: dict
    replicates: int = 1
    master_seed: int = 0
    stop: dict = field(default_factory=dict)
    predictor: Optional[str] = None
    tolerances: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    fluid: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("params", "n_values", "initial"):
            if key not in raw:
                raise ConfigError(f"missing required key {key!r}")
        for section, allowed in _SECTION_KEYS.items():
            value = raw.get(section, {})
            if not isinstance(value, dict):
                raise ConfigError(f"{section!r} must be an object")
            extra = set(value) - allowed
            if extra:
                raise ConfigError(f"unknown keys in {section!r}: {sorted(extra)}")
        cfg = cls(**raw)
        cfg._validate()
        return cfg

    def _validate(self):
        missing = _SECTION_KEYS["params"] - set(self.params)
        if missing:
            raise ConfigError(f"params missing {sorted(missing)}")
        if not isinstance(self.n_values, list) or not self.n_values:
            raise ConfigError("n_values must be a nonempty list")
        if not all(isinstance(n, int) and n >= 1 for n in self.n_values):
            raise ConfigError("n_values must be positive integers")
        try:
            for n in self.n_values:
                self.model(n)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad model parameters: {exc}") from None
        has_frac = {"alpha", "beta"} <= set(self.initial)
        has_count = {"x1", "x2"} <= set(self.initial)
        if has_frac == has_count or len(self.initial) != 2:
            raise ConfigError("initial must give either alpha/beta or x1/x2")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError("replicates must be an integer >= 1")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an integer in [0, 2^64)")
        if self.predictor is not None and self.predictor not in PREDICTORS:
            raise ConfigError(f"predictor must be one of {PREDICTORS}")
        if self.predictor in TAU_PREDICTORS and self.stop.get("stop_on_kappa", False):
            raise ConfigError(f"{self.predictor} needs tau, so stop_on_kappa must be false")
        try:
            self.stop_rule()
            for n in self.n_values:
                self.initial_state(n)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        for key, value in self.tolerances.items():
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"tolerance {key} must be positive")

    def model(self, n: int) -> ModelParams:
        p = self.params
        return ModelParams(p["lambda1"], p["mu1"], p["lambda2"], p["mu2"], n)

    def initial_state(self, n: int) -> ChainState:
        if "alpha" in self.initial:
            return ChainState.from_fractions(self.initial["alpha"], self.initial["beta"], n)
        return ChainState(self.initial["x1"], self.initial["x2"]).check(n)

    def fractions(self, n: int) -> tuple[float, float]:
        if "alpha" in self.initial:
            return float(self.initial["alpha"]), float(self.initial["beta"])
        return self.initial["x1"] / n, self.initial["x2"] / n

    def stop_rule(self) -> StopRule:
        default_kappa = self.predictor not in TAU_PREDICTORS
        return StopRule(max_events=int(self.stop.get("max_events", 10**9)),
                        max_time=float(self.stop.get("max_time", 1e7)),
                        stop_on_kappa=bool(self.stop.get("stop_on_kappa", default_kappa)))

    def output(self, key: str, n: Optional[int] = None) -> str:
        name = self.outputs.get(key, _DEFAULT_OUTPUTS[key])
        return name.format(n=n) if n is not None else name

    def to_dict(self) -> dict:
        out = {"params": self.params, "n_values": self.n_values, "initial": self.initial,
               "replicates": self.replicates, "master_seed": self.master_seed}
        for key in ("stop", "tolerances", "outputs", "fluid"):
            if getattr(self, key):
                out[key] = getattr(self, key)
        if self.predictor is not None:
            out["predictor"] = self.predictor
        return out


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(raw)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def samples_csv(samples: list[ExtinctionSample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, s in enumerate(samples):
        writer.writerow((i, s.seed, _fmt(s.kappa), int(s.kappa_censored), _fmt(s.tau),
                         int(s.tau_censored), s.events))
    return buf.getvalue()


def _environment(cfg: ExperimentConfig) -> dict:
    import numba
    import scipy
    return {"master_seed": cfg.master_seed, "package": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__,
            "python": platform.python_version()}


def _law_dict(law) -> dict:
    if isinstance(law, ExponentialLaw):
        return {"family": "exponential", "mean": _finite(law.mean), "log_mean": law.log_mean,
                "v": law.v, "notes": list(law.notes)}
    return {"family": "gumbel", "location": law.location, "scale": law.scale, "mean": law.mean,
            "regime": law.regime, "statistic": law.statistic, "notes": list(law.notes)}


def _finite(x):
    return x if math.isfinite(x) else None


def predict_law(cfg: ExperimentConfig, n: int):
    """Law named by ``cfg.predictor`` at population size ``n``; raises on regime mismatch."""
    params = cfg.model(n)
    alpha, beta = cfg.fractions(n)
    if cfg.predictor == "thm2":
        return predict_kappa_thm2(params, alpha, beta)
    if cfg.predictor == "nearcrit":
        return predict_kappa_nearcrit(params, alpha, beta)
    if cfg.predictor == "sis_sub":
        return predict_sis_subcritical(params.lambda1, params.mu1, n, alpha)
    return predict_tau_supercritical(params.lambda1, params.mu1, n)


class _Output:
    def __init__(self, path: str):
        self.path = path

    def probe(self):
        """Fail before any simulation if the directory cannot be written."""
        try:
            os.makedirs(self.path, exist_ok=True)
            probe = os.path.join(self.path, ".write-probe")
            with open(probe, "w") as fh:
                fh.write("")
            os.remove(probe)
        except OSError as exc:
            raise OSError(f"output directory {self.path!r} is not writable: {exc}") from None

    def write(self, name: str, text: str):
        with open(os.path.join(self.path, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)

    def write_json(self, name: str, payload: dict):
        self.write(name, json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n")


def _simulate(cfg, out, workers, n):
    samples = sample_extinction_times(cfg.model(n), cfg.initial_state(n), cfg.master_seed,
                                      cfg.replicates, cfg.stop_rule(), workers)
    out.write(cfg.output("samples", n), samples_csv(samples))
    return samples


def _summary_block(values, censored) -> dict:
    s = SampleSet.from_samples(values, censored)
    block = {"uncensored": len(s), "censored": s.censored_count}
    if len(s) >= 2:
        st = summary_stats(s)
        block.update(mean=st.mean, variance=st.variance, mean_ci_95=list(st.mean_ci_95))
    return block


def cmd_simulate(cfg, out, workers) -> int:
    rows = []
    for n in cfg.n_values:
        samples = _simulate(cfg, out, workers, n)
        rows.append({
            "N": n, "samples_csv": cfg.output("samples", n),
            "kappa": _summary_block([s.kappa for s in samples], [s.kappa_censored for s in samples]),
            "tau": _summary_block([s.tau for s in samples], [s.tau_censored for s in samples]),
            "events_total": int(sum(s.events for s in samples)),
        })
    out.write_json(cfg.output("summary"), {"config": cfg.to_dict(), "environment":
                                           _environment(cfg), "results": rows})
    return EXIT_OK


def cmd_predict(cfg, out, workers) -> int:
    rows = []
    for n in cfg.n_values:
        regime = classify_regime(cfg.model(n))
        row = {"N": n, "regime": regime.tag.value, "statistic": regime.statistic,
               "separation": regime.separation, "notes": list(regime.notes)}
        if cfg.predictor is not None:
            try:
                row["law"] = _law_dict(predict_law(cfg, n))
            except (RegimeError, ValueError) as exc:
                row["error"] = f"regime: {exc}"
        rows.append(row)
    out.write_json(cfg.output("prediction"), {"config": cfg.to_dict(), "predictions": rows})
    return EXIT_OK


def _attempt(fn, *args):
    try:
        value = fn(*args)
    except (RegimeError, ValueError, RuntimeError, ZeroDivisionError) as exc:
        return {"error": str(exc)}
    if hasattr(value, "_asdict"):
        return dict(value._asdict())
    if dataclasses.is_dataclass(value):
        return dataclasses.asdict(value)
    return value


def cmd_fluid(cfg, out, workers) -> int:
    opts = cfg.fluid
    t_end = float(opts.get("t_end", 100.0))
    points = int(opts.get("points", 501))
    n0 = cfg.n_values[0]
    params = cfg.model(n0)
    x0 = cfg.fractions(n0)
    traj = fluid.integrate(params, x0, t_end)
    grid = np.linspace(0.0, t_end, points)
    xs = traj(grid)
    buf = io.StringIO()
    buf.write("t,x1,x2\n")
    for t, a, b in zip(grid, xs[0], xs[1]):
        buf.write(f"{_fmt(t)},{_fmt(a)},{_fmt(b)}\n")
    stem = cfg.output("fluid")
    out.write(stem + "_trajectory.csv", buf.getvalue())

    payload: dict[str, Any] = {"config": cfg.to_dict(), "start": list(x0)}
    payload["spectral"] = _attempt(fluid.eigen_decomposition, params)
    payload["burn_in_time"] = _attempt(fluid.burn_in_time, params, x0)
    t0 = payload["burn_in_time"]
    per_n = []
    for n in cfg.n_values:
        row: dict[str, Any] = {"N": n}
        if isinstance(t0, float):
            x_t0 = tuple(float(v) for v in fluid.integrate(params, x0, t0)(t0)) if t0 > 0 else x0
            tn = _attempt(fluid.phase_time_tN, params, n, x_t0)
            row["t_N"] = tn if not isinstance(tn, float) else t0 + tn
        row["phase_breakdown"] = _attempt(phase_breakdown, cfg.model(n), *x0)
        if "omega" in opts:
            row["lt_approx_bound"] = _attempt(fluid.lt_approx_bound, cfg.model(n), n,
                                              float(opts["omega"]))
        if "delta" in opts:
            t0_cert = float(opts.get("t0", t0 if isinstance(t0, float) and t0 > 0 else 1.0))
            row["phase1_bound"] = _attempt(fluid.phase1_bound, cfg.model(n), t0_cert,
                                           float(opts["delta"]), n)
        per_n.append(row)
    payload["per_N"] = per_n
    out.write_json(stem + ".json", _jsonable(payload))
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _finite(float(obj))
    return obj


def verify_samples(predictor: str, law, values, censored, ks_max: float,
                   mean_tol: float) -> dict:
    """Verdict row for one population size.

    Gumbel predictors: standardize by the predicted law, KS against the
    standard Gumbel, mean error in units of the predicted scale.
    ``tau_super``: the shape claim is ``tau / E(tau) -> Exp(1)``, so samples
    are scaled by their own mean for KS and the mean error is relative to the
    predicted mean.
    """
    s = SampleSet.from_samples(values, censored)
    if len(s) == 0:
        raise RuntimeError("all replicates censored; nothing to verify")
    row: dict[str, Any] = {"M_effective": len(s), "censored": s.censored_count}
    mean = float(np.mean(s.values))
    if predictor == "tau_super":
        ks = ks_distance(SampleSet(s.values / mean), ExponentialLaw(1.0))
        scale = law.mean
        row.update(fitted_mean=mean, predicted_mean=_finite(law.mean))
        err = abs(mean - law.mean) / scale if math.isfinite(scale) else math.inf
    else:
        ks = ks_distance(standardize(s, law), STANDARD_GUMBEL)
        if len(s) >= 2 and np.ptp(s.values) > 0:
            fit = gumbel_fit_moments(s)
            row.update(fitted_location=fit.location, fitted_scale=fit.scale)
        row.update(predicted_location=law.location, predicted_scale=law.scale)
        err = abs(mean - law.mean) / law.scale
    ok = ks <= ks_max and err <= mean_tol
    row.update(ks=ks, ks_max=ks_max, mean_error_scale_units=_finite(err),
               mean_abs_err_max=mean_tol, verdict="PASS" if ok else "FAIL")
    if not ok:
        row["reason"] = "ks" if ks > ks_max else "mean"
    return row


def cmd_verify(cfg, out, workers) -> int:
    if cfg.predictor is None:
        raise ConfigError("verify needs a predictor")
    ks_max = float(cfg.tolerances.get("ks_max", 0.08))
    mean_tol = float(cfg.tolerances.get("mean_abs_err_max", 0.15))
    rows = []
    for n in cfg.n_values:
        try:
            law = predict_law(cfg, n)
        except (RegimeError, ValueError) as exc:
            rows.append({"N": n, "verdict": "FAIL", "reason": f"regime: {exc}"})
            continue
        samples = _simulate(cfg, out, workers, n)
        if cfg.predictor in TAU_PREDICTORS:
            values, cens = [s.tau for s in samples], [s.tau_censored for s in samples]
        else:
            values, cens = [s.kappa for s in samples], [s.kappa_censored for s in samples]
        row = {"N": n, "samples_csv": cfg.output("samples", n)}
        row.update(verify_samples(cfg.predictor, law, values, cens, ks_max, mean_tol))
        row["predicted_law"] = _law_dict(law)
        rows.append(row)
    passed = all(r["verdict"] == "PASS" for r in rows)
    out.write_json(cfg.output("report"), _jsonable({
        "config": cfg.to_dict(), "environment": _environment(cfg),
        "ks_threshold_basis": "asymptotic Kolmogorov critical values",
        "rows": rows, "verdict": "PASS" if passed else "FAIL"}))
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {"simulate": cmd_simulate, "predict": cmd_predict, "fluid": cmd_fluid,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sis-competition", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="experiment config (JSON)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--workers", type=int, default=None,
                        help="simulation threads (default: available cores)")
    parser.add_argument("--seed", type=int, default=None, help="override master_seed")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.master_seed = args.seed
            cfg._validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = _Output(args.out)
    try:
        out.probe()
        return COMMANDS[args.command](cfg, out, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any failure past config parsing is a runtime error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
