#!/usr/bin/env python3
"""
End-to-end tests of the smoothforge command line
"""

import json
import math

import pytest
from click.testing import CliRunner
from sympy import primerange

from smoothforge_app import SmoothForge, cli
from smoothforge.config.settings import load_config


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "forge.env"
    path.write_text("rho_umax=8\nsieve_limit=200000\nC_cep=1.5\n", encoding="utf-8")
    return path


@pytest.fixture
def run(tmp_path, config_file, monkeypatch):
    monkeypatch.setenv("SMOOTHFORGE_CACHE_DIR", str(tmp_path / "cache"))
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, ["--config", str(config_file), *args])

    return invoke


def payload(result):
    return json.loads(result.stdout)


def test_psi_count(run):
    result = run("psi", "--x", "100", "--y", "2")
    assert result.exit_code == 0
    assert payload(result)["count"] == 7


def test_psi_enumerate_csv(run, tmp_path):
    out = tmp_path / "smooth.csv"
    result = run("psi", "--x", "10", "--y", "3", "--enumerate", "--out", str(out))
    assert result.exit_code == 0
    assert out.read_text(encoding="utf-8") == "n\n1\n2\n3\n4\n6\n8\n9\n"


def test_rho_and_xi(run, tmp_path):
    result = run("rho", "--u", "1.0")
    assert result.exit_code == 0 and payload(result)["rho"] == 1.0
    assert any(path.suffix == ".csv" for path in (tmp_path / "cache").iterdir())

    result = run("xi", "--u", "2")
    assert payload(result)["xi"] == pytest.approx(1.2564312086, abs=1e-9)

    result = run("rho", "--u", "9")
    assert result.exit_code == 2


def test_rho_identical_after_cache_reload(run, tmp_path):
    first = run("rho", "--u", "3.5")
    assert first.exit_code == 0
    assert any(path.suffix == ".csv" for path in (tmp_path / "cache").iterdir())
    second = run("rho", "--u", "3.5")
    assert second.exit_code == 0
    assert second.stdout == first.stdout


def test_rho_table_csv(run, tmp_path):
    out = tmp_path / "rho.csv"
    result = run("rho-table", "--step", "1/64", "--umax", "3", "--out", str(out))
    assert result.exit_code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# rho-table v1, step=1/64"
    assert lines[1] == "u,rho"
    assert len(lines) == 2 + 3 * 64 + 1


def test_ideals_and_funceq(run):
    result = run("ideals", "--d", "-1", "--x", "5", "--exclude", "2:1")
    assert payload(result)["count"] == 3 and payload(result)["T"] == ["2:1"]

    result = run("funceq", "--d", "-1", "--x", "10000", "--y", "50")
    assert result.exit_code == 0
    assert payload(result)["residual"] <= 1e-9

    result = run("mertens", "--d", "-1", "--y", "4")
    assert result.exit_code == 0 and payload(result)["sum"] > 0


def test_bounds(run):
    result = run("bound", "--which", "thm2", "--s", "100", "--eps", "0.5")
    assert result.exit_code == 0 and payload(result)["value"] is not None

    result = run("bound", "--which", "thm3", "--n", "2", "--m", "1", "--s", "50", "--ck", "2")
    assert result.exit_code == 0

    result = run("bound", "--which", "cep", "--x", "1e4", "--y", "50")
    assert result.exit_code == 2

    result = run("bound", "--which", "thm1", "--n", "2", "--s", "50", "--ck", "3")
    assert result.exit_code == 2


def test_caps_and_usage(run):
    assert run("psi", "--x", "1e7", "--y", "10").exit_code == 3
    assert run("no-such-command").exit_code == 2
    assert run("psi", "--x", "100").exit_code == 2


def test_missing_config_file(tmp_path):
    result = CliRunner().invoke(cli, ["--config", str(tmp_path / "absent.env"), "psi", "--x", "10", "--y", "2"])
    assert result.exit_code == 2


def test_normpoly_count(run):
    result = run("normpoly-count", "--d", "-1", "--alpha0", "0,1", "--alpha1", "1,0",
                 "--primes", "2,5", "--xbound", "10")
    assert result.exit_code == 0
    data = payload(result)
    assert data["count"] == 9 and data["form"] == [1, 0, 1]


def test_lemma6_fuzz_is_deterministic(run):
    first = run("lemma6-fuzz", "--trials", "20", "--seed", "3")
    second = run("lemma6-fuzz", "--trials", "20", "--seed", "3")
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    assert payload(first)["violations"] == 0


def test_gdeg(run, tmp_path):
    points = tmp_path / "points.csv"
    points.write_text("0,0\n1,1\n2/3,2/3\n", encoding="utf-8")
    result = run("gdeg", "--points", str(points))
    assert result.exit_code == 0 and payload(result)["g"] == 1


def test_thm1_report(run, tmp_path):
    out = tmp_path / "report.json"
    result = run("thm1", "--a", "1,1", "--s", "12", "--eps", "0.5", "--out", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["t"] == 9 and report["Y"] == 23
    assert report["bucket_size"] >= report["guaranteed"]
    assert len(report["solutions"]) == report["bucket_size"]
    assert all("/" in value for value in report["solutions"][0])


def test_thm2_report(run, tmp_path):
    out = tmp_path / "lifted.json"
    result = run("thm2", "--a", "2,3", "--s", "13", "--eps", "0.5", "--out", str(out))
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["t"] == 12 and len(report["S"]) == 13
    assert report["g"] == report["pairs"] == report["lifted"] == len(report["solutions"])
    assert report["pair_construction"]["Y"] == 23


def test_delta_profile_follows_configured_grid(run, tmp_path):
    result = run("delta", "--d", "-1", "--y", "30", "--umax", "2")
    assert result.exit_code == 0
    data = payload(result)
    assert data["grid"] == "1/32" and len(data["profile"]) == 65
    assert data["delta"] == min(row["ratio"] for row in data["profile"])

    coarse = tmp_path / "coarse.env"
    coarse.write_text("rho_umax=8\ndelta_grid=1/16\n", encoding="utf-8")
    result = CliRunner().invoke(cli, ["--config", str(coarse), "--cache-dir", str(tmp_path / "cache"),
                                      "delta", "--d", "-1", "--y", "30", "--umax", "2", "--exclude", "2:1"])
    assert result.exit_code == 0
    data = payload(result)
    assert [row["v"] for row in data["profile"]] == [k / 16 for k in range(33)]
    assert data["T"] == ["2:1"]
    assert data["delta_lower"] < payload(run("delta", "--d", "-1", "--y", "30"))["delta_lower"]


def test_thm3_report(run):
    result = run("thm3", "--d", "-1", "--s", "6", "--x", "1e4")
    assert result.exit_code == 0
    data = payload(result)
    assert data["alpha1"] == "1,0" and data["count"] >= data["guaranteed"]


def test_compare_rows(run):
    result = run("compare", "--x", "1e4", "--y", "50", "--d", "-1")
    assert result.exit_code == 0
    header, row = result.stdout.strip().splitlines()
    assert header == "X,Y,u,exact,main_term,cep,thm5"
    assert all(cell not in ("", "nan", "inf") for cell in row.split(","))

    result = run("compare", "--x", "1000", "--y", "1000")
    header, row = result.stdout.strip().splitlines()
    cells = row.split(",")
    assert cells[3] == "1000" and float(cells[4]) == 1000.0

    # Y above sqrt(X): at most one prime factor exceeds Y
    result = run("compare", "--x", "200000", "--y", "500")
    header, row = result.stdout.strip().splitlines()
    cells = row.split(",")
    expected = 200000 - sum(200000 // p for p in primerange(501, 200001))
    assert int(cells[3]) == expected
    u = math.log(200000) / math.log(500)
    assert float(cells[4]) == pytest.approx(200000 * (1 - math.log(u)), rel=1e-6)
    assert int(cells[3]) > float(cells[4])


def test_facade_uses_configured_constants(tmp_path, config_file):
    forge = SmoothForge(load_config(config_file, cache_dir=tmp_path))
    assert forge.config.constant("C_cep") == 1.5
    assert forge.bound("cep", X=1e10, Y=1e3)["exponent"] < forge.bound("cep", X=1e10, Y=1e3, C=0.0)["exponent"]
