import csv
import json

import numpy as np
import pytest
import yaml

from enrda.harness.cli import main


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestValidate:
    def test_valid_config_exits_zero(self, tmp_path, capsys):
        config = {
            "schema_version": 1,
            "dynamics": {"kind": "lorenz63"},
            "horizon": 2.0,
            "assimilation_interval": 40,
            "assimilators": [{"method": "enkf", "ensemble_size": 10}],
        }
        path = tmp_path / "ok.yaml"
        path.write_text(yaml.safe_dump(config))
        assert main(["validate", str(path)]) == 0
        assert "valid" in capsys.readouterr().out

    def test_eta_out_of_range_exits_two_and_names_field(self, tmp_path, capsys):
        config = {
            "schema_version": 1,
            "dynamics": {"kind": "lorenz63"},
            "horizon": 2.0,
            "assimilation_interval": 40,
            "assimilators": [
                {"method": "enrda", "eta": {"policy": "fixed", "value": 1.5}}
            ],
        }
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.safe_dump(config))
        assert main(["validate", str(path)]) == 2
        err = capsys.readouterr().err
        assert "assimilators[0]" in err
        assert "eta" in err

    def test_missing_file_exits_two(self, capsys):
        assert main(["validate", "no/such/config.yaml"]) == 2


class TestRun:
    def test_run_config_file(self, tmp_path, capsys):
        config = {
            "schema_version": 1,
            "name": "smoke",
            "dynamics": {"kind": "lorenz63"},
            "horizon": 1.0,
            "assimilation_interval": 50,
            "replicates": 1,
            "base_seed": 5,
            "assimilators": [{"method": "enkf", "ensemble_size": 10}],
        }
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(config))
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        assert (out / "summary.json").exists()


class TestOtDemo:
    def test_demo_artifacts_and_interpolant_mean(self, tmp_path):
        assert main(["ot-demo", "--out", str(tmp_path)]) == 0
        sweep = read_csv(tmp_path / "displacement_sweep.csv")
        # eta = 0.5 interpolant mean lands midway between the gamma(2,2)
        # mean (4.0) and the Gaussian mean (6.5)
        rows = [r for r in sweep if abs(float(r["eta"]) - 0.5) < 1e-9]
        mean = sum(float(r["position"]) * float(r["weight"]) for r in rows)
        total = sum(float(r["weight"]) for r in rows)
        assert mean / total == pytest.approx(5.25, abs=0.06)

        gauss = read_csv(tmp_path / "gaussian_interpolation.csv")
        end = [r for r in gauss if float(r["eta"]) == 1.0][0]
        assert float(end["mean"]) == pytest.approx(-1.1)
        assert float(end["variance"]) == pytest.approx(0.4)

        coupling = read_csv(tmp_path / "coupling_sweep.csv")
        gammas = sorted({float(r["gamma"]) for r in coupling})
        assert gammas == [0.001, 1.0, 10.0]
        # larger regularization spreads the coupling: entropy increases
        entropies = {}
        for gamma in gammas:
            masses = np.array(
                [float(r["mass"]) for r in coupling if float(r["gamma"]) == gamma]
            )
            positive = masses[masses > 0]
            entropies[gamma] = -np.sum(positive * (np.log(positive) - 1.0))
        assert entropies[0.001] < entropies[1.0] < entropies[10.0]


class TestPreset:
    def test_tiny_preset_smoke(self, tmp_path):
        out = tmp_path / "lz"
        code = main(
            [
                "preset",
                "lorenz63",
                "--replicates",
                "1",
                "--seed",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        with open(out / "summary.json") as handle:
            summary = json.load(handle)
        assert set(summary["methods"]) == {"enrda", "enkf", "particle_filter"}
        states = read_csv(out / "states_r0000.csv")
        assert {row["method"] for row in states} == {
            "enrda",
            "enkf",
            "particle_filter",
        }
