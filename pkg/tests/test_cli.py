"""Command-line interface: outputs, manifests, exit codes, determinism."""

import csv
import json
import math

import numpy as np
import pytest

import bdhit as b
from bdhit.cli import main


def run(args, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return main(list(args))


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


class TestParsing:
    def test_no_command_exits_1(self, tmp_path, monkeypatch, capsys):
        assert run([], tmp_path, monkeypatch) == 1

    def test_unknown_flag_exits_1(self, tmp_path, monkeypatch, capsys):
        code = run(["cmatrix", "--frobnicate"], tmp_path, monkeypatch)
        assert code == 1

    def test_missing_spec_file_exits_1_with_path(self, tmp_path, monkeypatch, capsys):
        code = run(["spectrum", "--spec", "no_such_chain.json"], tmp_path, monkeypatch)
        assert code == 1
        err = capsys.readouterr().err
        assert "no_such_chain.json" in err
        assert "not found" in err

    def test_bad_nu_sum_rejected(self, tmp_path, monkeypatch, capsys):
        code = run(
            ["density", "--model", "symmetric_rw", "--kappa", "1", "--N", "4",
             "--nu", "1:0.4,2:0.4"],
            tmp_path, monkeypatch,
        )
        assert code == 1
        assert "refusing to renormalize" in capsys.readouterr().err

    def test_model_and_spec_both_work(self, tmp_path, monkeypatch):
        doc = {"model": "symmetric_rw", "kappa": 1, "N": 6}
        path = tmp_path / "chain.json"
        path.write_text(json.dumps(doc))
        assert run(["cmatrix", "--spec", str(path)], tmp_path, monkeypatch) == 0
        by_spec = (tmp_path / "cmatrix.csv").read_bytes()
        assert run(
            ["cmatrix", "--model", "symmetric_rw", "--kappa", "1", "--N", "6"],
            tmp_path, monkeypatch,
        ) == 0
        assert (tmp_path / "cmatrix.csv").read_bytes() == by_spec


class TestCMatrixCommand:
    def test_rational_entries_round_trip(self, tmp_path, monkeypatch):
        code = run(
            ["cmatrix", "--model", "symmetric_rw", "--kappa", "1", "--N", "8",
             "--rows", "5"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        with open(tmp_path / "cmatrix.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["row", "col", "value"]
        from fractions import Fraction

        spec = b.symmetric_rw_spec(1, 8)
        pi = b.build_speed_measure(spec)
        s = b.build_scale_function(spec, pi)
        c = b.build_c_matrix(spec, pi, s, 5)
        for r, col, val in rows[1:]:
            assert Fraction(val) == c.value(int(r), int(col))

    def test_manifest_written(self, tmp_path, monkeypatch):
        run(
            ["cmatrix", "--model", "symmetric_rw", "--kappa", "1", "--N", "4"],
            tmp_path, monkeypatch,
        )
        doc = json.loads((tmp_path / "cmatrix_manifest.json").read_text())
        assert doc["command"] == "cmatrix"
        assert doc["outputs"] == ["cmatrix.csv"]
        assert "bdhit" in doc["versions"]
        assert "numpy" in doc["versions"]
        assert len(doc["input_digest"]) == 64


class TestSpectrumCommand:
    def test_discrete_atoms_match_library(self, tmp_path, monkeypatch):
        code = run(
            ["spectrum", "--model", "symmetric_rw", "--kappa", "1", "--N", "10"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        header, data = read_csv(tmp_path / "spectrum.csv")
        assert header == ["theta", "weight"]
        spec = b.symmetric_rw_spec(1, 10)
        m = b.finite_spectrum(spec, b.build_speed_measure(spec))
        np.testing.assert_allclose([r[0] for r in data], m.theta, rtol=1e-15)
        np.testing.assert_allclose([r[1] for r in data], m.weights, rtol=1e-15)

    def test_continuous_quadrature(self, tmp_path, monkeypatch):
        code = run(
            ["spectrum", "--continuous", "--model", "symmetric_rw", "--kappa", "2",
             "--N", "8", "--nodes", "24"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        header, data = read_csv(tmp_path / "spectrum.csv")
        assert len(data) == 24
        assert all(0 < r[0] < 8 for r in data)  # theta in (0, 4 kappa)


class TestDensityCommand:
    def test_values_match_library(self, tmp_path, monkeypatch):
        code = run(
            ["density", "--model", "symmetric_rw", "--kappa", "1", "--N", "12",
             "--nu", "1:0.5,3:0.5", "--t-min", "0.2", "--t-max", "2.0",
             "--t-count", "7"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        header, data = read_csv(tmp_path / "density.csv")
        assert header == ["t", "f"]
        assert len(data) == 7
        ev = b.finite_evaluator(b.symmetric_rw_spec(1, 12))
        nu = b.InitialDistribution({1: 0.5, 3: 0.5})
        for t, f in data:
            assert f == pytest.approx(b.mixture_density(ev, nu, t), rel=1e-15)

    def test_rerun_is_byte_identical(self, tmp_path, monkeypatch):
        args = ["density", "--model", "symmetric_rw", "--kappa", "1", "--N", "10",
                "--t-count", "20"]
        run(args, tmp_path, monkeypatch)
        first = (tmp_path / "density.csv").read_bytes()
        run(args, tmp_path, monkeypatch)
        assert (tmp_path / "density.csv").read_bytes() == first

    def test_continuous_clamps_t_zero(self, tmp_path, monkeypatch):
        code = run(
            ["density", "--continuous", "--model", "symmetric_rw", "--kappa", "1",
             "--N", "16", "--nodes", "48", "--t-min", "0", "--t-max", "1",
             "--t-count", "3"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        header, data = read_csv(tmp_path / "density.csv")
        assert data[0][0] > 0


class TestTransitionCommand:
    def test_values_match_library(self, tmp_path, monkeypatch):
        code = run(
            ["transition", "--model", "asymmetric_rw", "--lambda", "2", "--mu", "1",
             "--N", "10", "--from", "1", "--to", "3", "--t-min", "0.5",
             "--t-max", "1.5", "--t-count", "3"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        header, data = read_csv(tmp_path / "transition.csv")
        assert header == ["t", "p"]
        ev = b.finite_evaluator(b.asymmetric_rw_spec(2, 1, 10))
        for t, p in data:
            assert p == pytest.approx(b.transition_probability(ev, t, 1, 3), rel=1e-13)


class TestReproduceCommand:
    def test_spectral_round_trip(self, tmp_path, monkeypatch):
        code = run(
            ["reproduce", "--model", "symmetric_rw", "--kappa", "1", "--N", "10",
             "--nu", "1:0.3,2:0.5,4:0.2", "--mode", "spectral", "--j-max", "5"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "reproduce.json").read_text())
        assert doc["mode"] == "spectral"
        assert max(doc["abs_error"]) < 1e-9
        header, data = read_csv(tmp_path / "reproduce.csv")
        assert header == ["j", "recovered", "reference", "abs_error"]
        assert [r[1] for r in data] == pytest.approx([0.3, 0.5, 0, 0.2, 0], abs=1e-9)

    def test_numeric_synthesizes_samples_from_nu(self, tmp_path, monkeypatch):
        code = run(
            ["reproduce", "--model", "symmetric_rw", "--kappa", "1", "--N", "10",
             "--nu", "2:1", "--mode", "numeric", "--j-max", "3"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "reproduce.json").read_text())
        assert doc["reliable"] is True
        assert abs(doc["recovered"][1] - 1.0) < 1e-3

    def test_numeric_from_samples_file(self, tmp_path, monkeypatch):
        ev = b.finite_evaluator(b.symmetric_rw_spec(1, 10))
        nu = b.InitialDistribution({2: 1.0})
        t0 = 0.005
        ts = np.unique(
            np.concatenate(
                [np.linspace(t0 * 0.6, t0 * 1.4, 101), np.linspace(t0 * 0.3, t0 * 0.7, 101)]
            )
        )
        lines = ["t,f"]
        for t in ts:
            lines.append(f"{float(t)!r},{float(b.mixture_density(ev, nu, t))!r}")
        (tmp_path / "samples.csv").write_text("\n".join(lines) + "\n")
        code = run(
            ["reproduce", "--model", "symmetric_rw", "--kappa", "1", "--N", "10",
             "--samples", "samples.csv", "--mode", "numeric", "--j-max", "3",
             "--t0", "0.005"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "reproduce.json").read_text())
        assert abs(doc["recovered"][1] - 1.0) < 1e-3
        assert doc.get("reference") is None

    def test_missing_samples_file(self, tmp_path, monkeypatch, capsys):
        code = run(
            ["reproduce", "--model", "symmetric_rw", "--kappa", "1", "--N", "6",
             "--samples", "nowhere.csv", "--mode", "numeric"],
            tmp_path, monkeypatch,
        )
        assert code == 1
        assert "nowhere.csv" in capsys.readouterr().err


class TestHTransformCommand:
    def test_gamma_form(self, tmp_path, monkeypatch):
        code = run(
            ["htransform", "--model", "symmetric_rw", "--kappa", "1", "--N", "10",
             "--gamma", "0.5", "--branch", "plus", "--rows", "6"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "htransform_spec.json").read_text())
        assert doc["gamma"] == 0.5
        np.testing.assert_allclose(doc["k_values"], 2.0 ** np.arange(11))
        np.testing.assert_allclose(doc["lambda"][:-1], 2.0)
        np.testing.assert_allclose(doc["mu"], 0.5)
        header, data = read_csv(tmp_path / "htransform_cmatrix.csv")
        assert header == ["row", "col", "value"]

    def test_target_rates_form(self, tmp_path, monkeypatch):
        code = run(
            ["htransform", "--target-lambda", "2", "--target-mu", "1", "--N", "12",
             "--rows", "4"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "htransform_spec.json").read_text())
        assert doc["gamma"] == pytest.approx(3 - 2 * math.sqrt(2.0), rel=1e-12)
        assert doc["lambda"][:3] == [2, 2, 2]
        assert doc["mu"][:3] == [1, 1, 1]


class TestSimulateCommand:
    def test_summary_and_samples(self, tmp_path, monkeypatch):
        spec_path = tmp_path / "chain.json"
        spec_path.write_text(json.dumps({"N": 2, "lambda": [1, 0], "mu": [1, 1]}))
        code = run(
            ["simulate", "--spec", str(spec_path), "--nu", "1:1", "--paths", "4000",
             "--horizon", "80", "--seed", "42"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        doc = json.loads((tmp_path / "simulate_summary.json").read_text())
        assert doc["n_paths"] == 4000
        assert doc["n_censored"] == 0
        assert doc["passed"] is True
        assert doc["ks_statistic"] < doc["ks_critical_1pct"]
        header, data = read_csv(tmp_path / "simulate_samples.csv")
        assert header == ["t_hit"]
        assert len(data) == doc["n_absorbed"]
        times = [r[0] for r in data]
        assert times == sorted(times)

    def test_censoring_exits_2(self, tmp_path, monkeypatch, capsys):
        spec_path = tmp_path / "chain.json"
        spec_path.write_text(json.dumps({"N": 2, "lambda": [1, 0], "mu": [1, 1]}))
        code = run(
            ["simulate", "--spec", str(spec_path), "--paths", "300",
             "--horizon", "0.4", "--seed", "1"],
            tmp_path, monkeypatch,
        )
        assert code == 2
        doc = json.loads((tmp_path / "simulate_summary.json").read_text())
        assert doc["n_censored"] > 0
        assert doc["ks_statistic"] is None

    def test_deterministic_rerun(self, tmp_path, monkeypatch):
        spec_path = tmp_path / "chain.json"
        spec_path.write_text(json.dumps({"N": 2, "lambda": [1, 0], "mu": [1, 1]}))
        args = ["simulate", "--spec", str(spec_path), "--paths", "1000",
                "--horizon", "60", "--seed", "9"]
        run(args, tmp_path, monkeypatch)
        first = (tmp_path / "simulate_samples.csv").read_bytes()
        run(args, tmp_path, monkeypatch)
        assert (tmp_path / "simulate_samples.csv").read_bytes() == first


class TestVerifyCommand:
    def test_battery_passes_on_symmetric_rw(self, tmp_path, monkeypatch, capsys):
        code = run(
            ["verify", "--model", "symmetric_rw", "--kappa", "1", "--N", "12"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        out = capsys.readouterr().out
        lines = [ln for ln in out.splitlines() if ln]
        assert all(ln.startswith("PASS ") for ln in lines)
        assert any("stieltjes-ratio" in ln for ln in lines)
        assert any("monte-carlo-ks" in ln for ln in lines)
        doc = json.loads((tmp_path / "verify.json").read_text())
        assert all(r["passed"] for r in doc["results"])

    def test_battery_passes_on_random_chain(self, tmp_path, monkeypatch, capsys):
        doc = {
            "N": 6,
            "lambda": [1.3, 0.8, 2.1, 0.6, 1.9, 0.0],
            "mu": [0.9, 1.4, 0.7, 2.2, 1.1, 0.8],
        }
        spec_path = tmp_path / "chain.json"
        spec_path.write_text(json.dumps(doc))
        code = run(["verify", "--spec", str(spec_path)], tmp_path, monkeypatch)
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS derivative-bounds" in out
        # Constant-symmetric-only checks are skipped for a generic chain.
        assert "stieltjes-ratio" not in out


class TestOutputDirectory:
    def test_out_dir_flag(self, tmp_path, monkeypatch):
        target = tmp_path / "results"
        target.mkdir()
        run(
            ["cmatrix", "--model", "symmetric_rw", "--kappa", "1", "--N", "4",
             "--out-dir", str(target)],
            tmp_path, monkeypatch,
        )
        assert (target / "cmatrix.csv").exists()
        assert (target / "cmatrix_manifest.json").exists()

    def test_env_var_fallback(self, tmp_path, monkeypatch):
        target = tmp_path / "envout"
        target.mkdir()
        monkeypatch.setenv("BDHIT_OUTDIR", str(target))
        run(
            ["density", "--model", "symmetric_rw", "--kappa", "1", "--N", "6",
             "--t-count", "3"],
            tmp_path, monkeypatch,
        )
        assert (target / "density.csv").exists()


class TestPlotData:
    def test_strictly_increasing_required(self, tmp_path):
        from bdhit.cli import emit_plot_data

        with pytest.raises(ValueError, match="strictly increasing"):
            emit_plot_data([(1.0, 2.0), (1.0, 3.0)], tmp_path / "p.csv")
        with pytest.raises(ValueError, match="empty"):
            emit_plot_data([], tmp_path / "p.csv")

    def test_writes_header_and_rows(self, tmp_path):
        from bdhit.cli import emit_plot_data

        emit_plot_data([(0.0, 1.0), (1.0, 0.5)], tmp_path / "p.csv", header=("t", "f"))
        rows = (tmp_path / "p.csv").read_text().splitlines()
        assert rows[0] == "t,f"
        assert len(rows) == 3
