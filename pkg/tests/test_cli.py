"""CLI contract: exit codes, artifact determinism, sweep orchestration."""

import json
import os

import numpy as np
import pytest

from toruslab.cli import main

pytestmark = pytest.mark.filterwarnings("ignore::ResourceWarning")


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def fast_doc(**model):
    base = {"equation": "1d", "delta": 0.5, "nu": 1.0, "gamma": 1.0}
    base.update(model)
    return {
        "grid": {"sizes": [64]},
        # stride 1: the balance residuals carry trapezoid error in the sample
        # spacing squared, and the default tolerances assume dense sampling
        "stepper": {"t_end": 0.05, "dt": 1e-3, "snapshot_stride": 1},
        "model": base,
        "initial": {"kind": "cosine", "params": {"c": 1.0, "a": 0.5, "k": 1}},
        "checks": ["l2", "hhalf", "positivity", "min_principle"],
    }


class TestRunExitCodes:
    def test_clean_run_exit_zero(self, tmp_path):
        cfg = write_cfg(tmp_path, fast_doc())
        out = str(tmp_path / "out")
        assert main(["run", "--config", cfg, "--out", out, "--quiet"]) == 0
        report = json.load(open(os.path.join(out, "checks.json")))
        assert report["passed"] is True
        assert os.path.exists(os.path.join(out, "diagnostics.csv"))
        assert os.path.exists(os.path.join(out, "metadata.json"))
        assert os.path.exists(os.path.join(out, "snap_000000.f64"))

    def test_check_failure_exit_two(self, tmp_path):
        # delta < 1 transport moves the 1d mean, so a tight mass check fails
        doc = fast_doc(delta=0.0, nu=0.0, gamma=0.0)
        doc["checks"] = ["mass"]
        cfg = write_cfg(tmp_path, doc)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 2

    def test_blow_up_exit_three(self, tmp_path):
        doc = fast_doc(delta=1.0, nu=0.0, gamma=0.0)
        doc["initial"]["params"] = {"c": 0.0, "a": 1e13}
        doc["checks"] = []
        cfg = write_cfg(tmp_path, doc)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 3
        meta = json.load(open(tmp_path / "o" / "metadata.json"))
        assert meta["termination"] == "blow_up"

    def test_config_error_exit_four(self, tmp_path):
        doc = fast_doc()
        doc["model"]["viscosity"] = 1.0
        cfg = write_cfg(tmp_path, doc)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 4

    def test_precondition_failure_exit_four(self, tmp_path):
        doc = fast_doc()
        doc["initial"] = {
            "kind": "cosine", "params": {"c": 0.0, "a": 1.0}, "require_nonneg": True,
        }
        cfg = write_cfg(tmp_path, doc)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 4

    def test_io_error_exit_five(self, tmp_path):
        blocker = tmp_path / "occupied"
        blocker.write_text("file, not a directory")
        cfg = write_cfg(tmp_path, fast_doc())
        assert main(["run", "--config", cfg, "--out", str(blocker), "--quiet"]) == 5

    def test_scenario_and_config_are_exclusive(self, tmp_path):
        cfg = write_cfg(tmp_path, fast_doc())
        assert main(["run", "--config", cfg, "--scenario", "mixed_form", "--quiet"]) == 4
        assert main(["run", "--quiet"]) == 4
        assert main(["run", "--scenario", "no_such_thing", "--quiet"]) == 4


class TestDeterminism:
    def test_identical_configs_identical_csv(self, tmp_path):
        doc = fast_doc()
        doc["initial"] = {
            "kind": "random_trig", "params": {"k_max": 4, "amp": 0.2, "seed": 9},
        }
        cfg = write_cfg(tmp_path, doc)
        out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        assert main(["run", "--config", cfg, "--out", out1, "--quiet"]) == 0
        assert main(["run", "--config", cfg, "--out", out2, "--quiet"]) == 0
        a = open(os.path.join(out1, "diagnostics.csv"), "rb").read()
        b = open(os.path.join(out2, "diagnostics.csv"), "rb").read()
        assert a == b

    def test_seed_override_changes_data(self, tmp_path):
        doc = fast_doc()
        doc["initial"] = {
            "kind": "random_trig", "params": {"k_max": 4, "amp": 0.2, "seed": 9},
        }
        doc["checks"] = []
        cfg = write_cfg(tmp_path, doc)
        out1, out2, out3 = (str(tmp_path / d) for d in ("s1", "s2", "s3"))
        main(["run", "--config", cfg, "--out", out1, "--quiet"])
        main(["run", "--config", cfg, "--out", out2, "--seed-override", "77", "--quiet"])
        main(["run", "--config", cfg, "--out", out3, "--seed-override", "77", "--quiet"])
        base = open(os.path.join(out1, "diagnostics.csv"), "rb").read()
        over = open(os.path.join(out2, "diagnostics.csv"), "rb").read()
        again = open(os.path.join(out3, "diagnostics.csv"), "rb").read()
        assert base != over
        assert over == again

    def test_outdir_env_fallback(self, tmp_path, monkeypatch):
        target = str(tmp_path / "from_env")
        monkeypatch.setenv("TORUSLAB_OUTDIR", target)
        cfg = write_cfg(tmp_path, fast_doc())
        assert main(["run", "--config", cfg, "--quiet"]) == 0
        assert os.path.exists(os.path.join(target, "diagnostics.csv"))

    def test_outputs_directory_from_config(self, tmp_path):
        doc = fast_doc()
        doc["outputs"] = {"directory": str(tmp_path / "cfg_dir")}
        cfg = write_cfg(tmp_path, doc)
        assert main(["run", "--config", cfg, "--quiet"]) == 0
        assert os.path.exists(tmp_path / "cfg_dir" / "diagnostics.csv")


class TestSweep:
    def sweep_doc(self):
        return {
            "grid": {"sizes": [64]},
            "model": {"equation": "1d", "delta": 1.0, "epsilon": 1e-2},
            "stepper": {"t_end": 0.05, "dt": 1e-3, "snapshot_stride": 5},
            "initial": {"kind": "cosine", "params": {"c": 1.0, "a": 0.5, "k": 1}},
            "checks": ["mass"],
            "sweep": {
                "axes": [{"path": "model.epsilon", "values": [1e-2, 5e-3, 2.5e-3]}],
            },
        }

    def test_epsilon_sweep_and_convergence(self, tmp_path):
        cfg = write_cfg(tmp_path, self.sweep_doc())
        out = str(tmp_path / "sweep")
        assert main(["sweep", "--config", cfg, "--out", out,
                     "--workers", "2", "--quiet"]) == 0
        agg = open(os.path.join(out, "aggregate.csv")).read().splitlines()
        assert len(agg) == 4
        assert agg[0].startswith("index,model.epsilon,exit_code")
        conv = open(os.path.join(out, "convergence.csv")).read().splitlines()
        assert conv[0] == "epsilon,epsilon_next,distance"
        dists = [float(line.split(",")[2]) for line in conv[1:]]
        assert len(dists) == 2
        assert dists[0] > dists[1] > 0.0

    def test_sweep_needs_sweep_section(self, tmp_path):
        doc = self.sweep_doc()
        del doc["sweep"]
        cfg = write_cfg(tmp_path, doc)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x"),
                     "--quiet"]) == 4

    def test_sweep_bad_path(self, tmp_path):
        doc = self.sweep_doc()
        doc["sweep"]["axes"][0]["path"] = "model.missing.deep"
        cfg = write_cfg(tmp_path, doc)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x"),
                     "--quiet"]) == 4

    def test_sweep_propagates_check_failure(self, tmp_path):
        doc = self.sweep_doc()
        # transport form moves the mean, so the mass check fails per child
        doc["model"]["delta"] = 0.0
        doc["model"]["epsilon"] = 0.0
        doc["sweep"]["axes"] = [{"path": "model.nu", "values": [0.5, 1.0]}]
        cfg = write_cfg(tmp_path, doc)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "x"),
                     "--workers", "1", "--quiet"]) == 2

    def test_zip_mode(self, tmp_path):
        doc = self.sweep_doc()
        doc["sweep"] = {
            "mode": "zip",
            "axes": [
                {"path": "model.epsilon", "values": [1e-2, 5e-3]},
                {"path": "initial.params.a", "values": [0.5, 0.4]},
            ],
        }
        cfg = write_cfg(tmp_path, doc)
        out = str(tmp_path / "zip")
        assert main(["sweep", "--config", cfg, "--out", out, "--workers", "1",
                     "--quiet"]) == 0
        agg = open(os.path.join(out, "aggregate.csv")).read().splitlines()
        assert len(agg) == 3


class TestVerifyOracle:
    def test_verify_passes(self):
        assert main(["verify", "--quiet"]) == 0

    def test_oracle_lambda_pow(self, capsys):
        assert main(["oracle", "--op", "lambda_pow", "--gamma", "1.0",
                     "--trunc", "200", "--grid-n", "32"]) == 0
        text = capsys.readouterr().out
        assert "derived kernel constant" in text
        assert "2 log 2" in text

    def test_oracle_rejects_2d_hilbert(self):
        assert main(["oracle", "--op", "hilbert", "--dim", "2"]) == 4

    def test_oracle_2d_frac_lap_small(self):
        assert main(["oracle", "--op", "lambda_pow", "--gamma", "1.0",
                     "--dim", "2", "--grid-n", "16", "--trunc", "8",
                     "--quiet"]) == 0
