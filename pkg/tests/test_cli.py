"""CLI contract: files, manifests, exit codes, and byte-level determinism."""

import csv
import json
import os

import pytest

from amdim.cli import main


def run(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestRegionCommand:
    def test_writes_expected_files(self, tmp_path):
        code, out = run(tmp_path, "r", [
            "region", "--p-min", "0.5", "--p-max", "0.51",
            "--gamma-min", "1", "--gamma-max", "1.6", "--grid", "20x20",
        ])
        assert code == 0
        rows = list(csv.DictReader(open(out / "region.csv")))
        assert len(rows) == 400
        assert set(rows[0]) == {"p", "gamma", "exponents_positive", "contraction_ok",
                                "lr_ok", "a_max_dim", "a_max_lr"}
        assert (out / "region.svg").exists()
        manifest = json.load(open(out / "manifest.json"))
        assert manifest["command"] == "region"
        assert "region.csv" in manifest["outputs"]
        assert "threads" not in manifest["parameters"]

    def test_empty_region_still_succeeds(self, tmp_path):
        code, out = run(tmp_path, "e", [
            "region", "--p-min", "0.52", "--p-max", "0.53",
            "--gamma-min", "1.05", "--gamma-max", "1.45", "--grid", "8x8",
        ])
        assert code == 0
        rows = list(csv.DictReader(open(out / "region.csv")))
        assert len(rows) == 64

    def test_malformed_grid_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["region", "--grid", "40", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2

    def test_format_filter(self, tmp_path):
        code, out = run(tmp_path, "f", [
            "region", "--grid", "8x8", "--format", "csv",
        ])
        assert code == 0
        assert (out / "region.csv").exists()
        assert not (out / "region.svg").exists()
        assert (out / "manifest.json").exists()


class TestDimensionCommand:
    def test_extreme_slope_closed_form(self, tmp_path):
        code, out = run(tmp_path, "d", [
            "dimension", "--a", repr(2.0 ** -128), "--gamma", "1.25", "--p", "0.5",
            "--orbit-len", "1e5",
        ])
        assert code == 0
        rep = json.load(open(out / "dimension.json"))
        assert float(rep["closed_form_bound"]) == pytest.approx(0.5, abs=1e-12)
        assert float(rep["chi_pointwise"]["value"]) < 0.0
        assert rep["verdict"]["dim_lt_one"] is True

    def test_out_of_region_routes_to_empirical(self, tmp_path):
        code, out = run(tmp_path, "d2", [
            "dimension", "--a", "0.01", "--gamma", "2", "--p", "0.5",
            "--orbit-len", "1e5",
        ])
        assert code == 0
        rep = json.load(open(out / "dimension.json"))
        assert rep["closed_form_bound"] is None
        assert any("contraction" in f for f in rep["closed_form_failed"])
        assert rep["empirical_dim_bound"] is not None

    def test_byte_identical_rerun(self, tmp_path):
        args = ["dimension", "--a", "0.1", "--gamma", "1.3", "--orbit-len", "1e5",
                "--seed", "3"]
        _, o1 = run(tmp_path, "d3", args)
        _, o2 = run(tmp_path, "d4", args)
        assert read(o1 / "dimension.json") == read(o2 / "dimension.json")
        assert read(o1 / "manifest.json") == read(o2 / "manifest.json")


class TestEsnSweepCommand:
    def test_desk_scale_run(self, tmp_path):
        code, out = run(tmp_path, "s", [
            "esn-sweep", "--points", "10", "--trials", "500",
        ])
        assert code == 0
        rows = list(csv.DictReader(open(out / "esn.csv")))
        assert len(rows) == 10
        assert (out / "esn.svg").exists()

    def test_threads_do_not_change_bytes(self, tmp_path):
        base = ["esn-sweep", "--points", "6", "--trials", "400"]
        _, o1 = run(tmp_path, "t1", base + ["--threads", "1"])
        _, o2 = run(tmp_path, "t2", base + ["--threads", "4"])
        assert read(o1 / "esn.csv") == read(o2 / "esn.csv")
        assert read(o1 / "esn.svg") == read(o2 / "esn.svg")
        assert read(o1 / "manifest.json") == read(o2 / "manifest.json")


class TestToleranceCommands:
    def test_kac_pass(self, tmp_path):
        code, out = run(tmp_path, "k", [
            "kac", "--a", "0.1", "--gamma", "1.3", "--len", "1e6",
        ])
        assert code == 0
        rep = json.load(open(out / "kac.json"))
        assert rep["passed"] is True
        assert float(rep["residual"]) < 0.02

    def test_kac_tolerance_failure_exit_code(self, tmp_path):
        code, out = run(tmp_path, "kf", [
            "kac", "--a", "0.1", "--gamma", "1.3", "--len", "1e5", "--tol", "1e-9",
        ])
        assert code == 1
        rep = json.load(open(out / "kac.json"))
        assert rep["passed"] is False

    def test_wald_pass(self, tmp_path):
        code, out = run(tmp_path, "w", [
            "wald", "--gamma", "1.2", "--trials", "20000",
        ])
        assert code == 0
        rep = json.load(open(out / "wald.json"))
        assert float(rep["residual"]) <= float(rep["residual_3se"])

    def test_gamma_at_most_one_is_usage_error(self, tmp_path):
        code = main(["wald", "--gamma", "0.9", "--out", str(tmp_path / "bad")])
        assert code == 2

    def test_measure_report(self, tmp_path):
        code, out = run(tmp_path, "m", [
            "measure", "--a", "0.1", "--gamma", "1.3", "--len", "1e6",
            "--bins", "500", "--tol", "0.02",
        ])
        assert code == 0
        rep = json.load(open(out / "measure.json"))
        masses = rep["masses"]
        assert masses["left"] + masses["M"] + masses["right"] == masses["total"]

    def test_walk_exact_report(self, tmp_path):
        code, out = run(tmp_path, "x", ["walk-exact", "--gamma", "1.25"])
        assert code == 0
        rep = json.load(open(out / "walk_exact.json"))
        assert rep["depth"] == 400
        assert float(rep["e_s"]) < -1.0


class TestSeedHandling:
    def test_env_seed_overrides_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("AMDIM_SEED", "42")
        code, out = run(tmp_path, "env", [
            "kac", "--a", "0.1", "--gamma", "1.3", "--len", "1e5", "--seed", "7",
        ])
        assert code == 0
        manifest = json.load(open(out / "manifest.json"))
        assert manifest["parameters"]["seed"] == 42

    def test_bad_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("AMDIM_SEED", "nope")
        code = main(["kac", "--a", "0.1", "--gamma", "1.3", "--len", "1e5",
                     "--out", str(tmp_path / "z")])
        assert code == 2
