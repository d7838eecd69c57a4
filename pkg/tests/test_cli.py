import json
import subprocess
import sys

import numpy as np
import pytest

from sis_competition.cli import (CSV_HEADER, ExperimentConfig, main, verify_samples)
from sis_competition.laws import GumbelLaw

BASE = {
    "params": {"lambda1": 1.5, "mu1": 1, "lambda2": 1.2, "mu2": 1},
    "n_values": [300],
    "initial": {"alpha": 0.3, "beta": 0.3},
    "replicates": 8,
    "master_seed": 11,
    "predictor": "thm2",
}


def write_config(tmp_path, **changes):
    cfg = dict(BASE, **changes)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [row.split(",") for row in lines[1:]]


def test_simulate_writes_rows(tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--config", write_config(tmp_path), "--out", str(out)]) == 0
    header, rows = read_csv(out / "samples_N300.csv")
    assert tuple(header) == CSV_HEADER and len(rows) == 8
    assert all(r[5] == "1" for r in rows)  # tau censored under stop_on_kappa
    summary = json.loads((out / "summary.json").read_text())
    assert ExperimentConfig.from_dict(summary["config"]).to_dict() == summary["config"]
    assert summary["config"] == BASE


def test_worker_count_does_not_change_bytes(tmp_path):
    cfg = write_config(tmp_path)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a"), "--workers", "1"])
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--workers", "8"])
    a = (tmp_path / "a" / "samples_N300.csv").read_bytes()
    assert a == (tmp_path / "b" / "samples_N300.csv").read_bytes()


def test_seed_override(tmp_path):
    cfg = write_config(tmp_path)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "5"])
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["config"]["master_seed"] == 5


@pytest.mark.parametrize("changes", [
    {"bogus": 1},
    {"stop": {"max_events": 10, "nope": 1}},
    {"predictor": "magic"},
    {"replicates": 0},
    {"initial": {"alpha": 0.3}},
    {"params": {"lambda1": -1, "mu1": 1, "lambda2": 1.2, "mu2": 1}},
    {"predictor": "tau_super", "stop": {"stop_on_kappa": True}},
])
def test_config_errors_exit_2(tmp_path, changes):
    assert main(["simulate", "--config", write_config(tmp_path, **changes),
                 "--out", str(tmp_path / "o")]) == 2


def test_usage_errors_exit_2(tmp_path):
    assert main(["launch", "--config", "x", "--out", "y"]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json"), "--out", "y"]) == 2


def test_unwritable_output_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["simulate", "--config", write_config(tmp_path), "--out", str(blocker)]) == 3


def test_verify_regime_mismatch(tmp_path):
    cfg = write_config(tmp_path, params={"lambda1": 1.5, "mu1": 1, "lambda2": 1.5, "mu2": 1})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["rows"][0]["verdict"] == "FAIL"
    assert report["rows"][0]["reason"].startswith("regime")
    assert not list((tmp_path / "o").glob("*.csv"))


def test_verify_pass_end_to_end(tmp_path):
    cfg = write_config(tmp_path, n_values=[5000], replicates=200)
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    row = json.loads((tmp_path / "o" / "report.json").read_text())["rows"][0]
    assert row["verdict"] == "PASS" and row["M_effective"] == 200


def test_wrong_scale_fails():
    law = GumbelLaw(0.0, 1.0)
    x = np.random.default_rng(0).gumbel(0.0, 2.0, 1000)
    row = verify_samples("thm2", law, x, np.zeros(1000, bool), 0.08, 0.15)
    assert row["verdict"] == "FAIL" and row["ks"] > 0.15


def test_all_censored_is_runtime_error(tmp_path):
    cfg = write_config(tmp_path, stop={"max_events": 1})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_tau_super_verify(tmp_path):
    cfg = write_config(tmp_path, params={"lambda1": 1.5, "mu1": 1, "lambda2": 1.2, "mu2": 1},
                       n_values=[60], initial={"x1": 30, "x2": 0}, replicates=300,
                       predictor="tau_super",
                       tolerances={"ks_max": 0.1, "mean_abs_err_max": 1.0})
    code = main(["verify", "--config", cfg, "--out", str(tmp_path / "o")])
    row = json.loads((tmp_path / "o" / "report.json").read_text())["rows"][0]
    assert row["censored"] == 0 and row["ks"] < 0.1
    assert code in (0, 1)


def test_predict_and_fluid(tmp_path):
    cfg = write_config(tmp_path, n_values=[5000, 10**6], fluid={"omega": 32, "delta": 0.05})
    assert main(["predict", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    pred = json.loads((tmp_path / "o" / "prediction.json").read_text())["predictions"]
    assert pred[0]["law"]["location"] == pytest.approx(28.94, abs=0.01)
    assert main(["fluid", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "fluid.json").read_text())
    assert report["spectral"]["L1"] == pytest.approx(2.52)
    assert report["per_N"][1]["lt_approx_bound"]["horizon"] == 55
    assert (tmp_path / "o" / "fluid_trajectory.csv").read_text().startswith("t,x1,x2\n")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sis_competition", "predict", "--config",
                           write_config(tmp_path), "--out", str(tmp_path / "o")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
