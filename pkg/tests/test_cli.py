import json

import numpy as np
import pytest

from conftest import sinusoid_profile
from fiberweave.cli import main, parse_range
from fiberweave.sweep import profile_to_csv

# coarse grid and one period of offsets so sweeps finish in a second or two
FAST = ["--grid", "0.5", "--slices", "2"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    np.testing.assert_allclose(parse_range("-2:2:1"), [-2, -1, 0, 1, 2])
    np.testing.assert_allclose(parse_range("0,1.5"), [0, 1.5])
    np.testing.assert_allclose(parse_range("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])


def test_catalog_builtin(capsys, tmp_path):
    code, out, _ = run(capsys, "catalog", "--builtin", "--write", tmp_path / "cat.ini")
    assert code == 0
    assert out.startswith("4 styles")
    assert all(n in out for n in ("1035", "1080", "1078", "3313"))
    code, out, _ = run(capsys, "catalog", "--catalog", tmp_path / "cat.ini")
    assert code == 0 and out.startswith("4 styles")


def test_catalog_empty_and_bad(capsys, tmp_path):
    empty = tmp_path / "empty.ini"
    empty.write_text("")
    code, out, _ = run(capsys, "catalog", "--catalog", empty)
    assert code == 0 and out.startswith("0 styles")
    bad = tmp_path / "bad.ini"
    bad.write_text("[bad]\nx1=0.8\nx2=15\nx3=14\ny1=0.8\ny2=12\ny3=14\n")
    code, _, err = run(capsys, "catalog", "--catalog", bad)
    assert code == 2 and "bad" in err


def test_unknown_style_and_bad_range(capsys, tmp_path):
    code, _, _ = run(capsys, "sweep", "--styles", "9999", "--out", tmp_path)
    assert code == 2
    code, _, _ = run(capsys, "sweep", "--styles", "1035", "--offsets", "0:1:0", "--out", tmp_path)
    assert code == 2


def test_sweep_then_cache_hit(capsys, tmp_path):
    args = ["sweep", "--styles", "1035", "--offsets=-7:7:1", "--out", tmp_path, *FAST]
    code, out, _ = run(capsys, *args)
    assert code == 0 and "cache hit" not in out
    csv = tmp_path / "1035_single_w4.csv"
    first = csv.read_bytes()
    assert len(first.decode().splitlines()) == 16  # header + 15 offsets
    code, out, _ = run(capsys, *args)
    assert code == 0 and "cache hit" in out
    assert csv.read_bytes() == first


def test_default_sweep_writes_25_rows(capsys, tmp_path):
    code, _, _ = run(capsys, "sweep", "--styles", "1035", "--out", tmp_path, *FAST)
    assert code == 0
    assert len((tmp_path / "1035_single_w4.csv").read_text().splitlines()) == 26


def test_sweep_solver_failure_exit(capsys, tmp_path, monkeypatch):
    import fiberweave.sweep as sw
    orig = sw.single_capacitance
    calls = {"n": 0}

    def flaky(raster, tol=1e-8, max_iter=None):
        calls["n"] += 1
        if calls["n"] > 6:
            raise sw.SolverError("forced failure", residual=1.0)
        return orig(raster, tol, max_iter)

    monkeypatch.setattr(sw, "single_capacitance", flaky)
    sw.solve_cache.clear()
    code, _, err = run(capsys, "sweep", "--styles", "1035", "--offsets=-7:7:1",
                       "--out", tmp_path, *FAST)
    sw.solve_cache.clear()
    assert code == 3 and "offset" in err
    assert (tmp_path / "1035_single_w4.csv.partial").exists()
    assert not (tmp_path / "1035_single_w4.csv").exists()


def _write_profile(tmp_path, prof, name):
    p = tmp_path / f"{name}.csv"
    p.write_text(profile_to_csv(prof))
    return p


def test_stats_on_constant_profile(capsys, tmp_path):
    p = _write_profile(tmp_path, sinusoid_profile(amplitude=0.0), "flat")
    code, _, _ = run(capsys, "stats", "--profile", p, "--period", 24, "--out", tmp_path,
                     "--samples", 5000)
    assert code == 0
    r = json.loads((tmp_path / "flat_DDE.json").read_text())
    assert r["delta_t_ps_per_in"] == 0.0


def test_stats_sinusoid_and_determinism(capsys, tmp_path):
    p = _write_profile(tmp_path, sinusoid_profile(), "sine")
    argv = ["stats", "--profile", p, "--period", 24, "--out", tmp_path, "--thresholds", "0:5:2.5",
            "--seed", 5, "--csv", "--svg", "--kumaraswamy"]
    assert run(capsys, *argv)[0] == 0
    first = (tmp_path / "sine_DDE.json").read_bytes()
    assert run(capsys, *argv)[0] == 0
    assert (tmp_path / "sine_DDE.json").read_bytes() == first
    r = json.loads(first)
    i = r["thresholds"].index(2.5)
    assert r["empirical_exceedance"][i] == pytest.approx(2 / 3, abs=0.01)
    assert r["arcsine_exceedance"][i] == pytest.approx(2 / 3, abs=0.01)
    assert (tmp_path / "sine_DDE_exceedance.csv").exists()
    svg = (tmp_path / "sine_DDE.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_stats_missing_data(capsys, tmp_path):
    code, _, err = run(capsys, "stats", "--styles", "1080", "--out", tmp_path)
    assert code == 4 and "fwe sweep" in err
    code, _, _ = run(capsys, "stats", "--profile", tmp_path / "nope.csv", "--period", 14,
                     "--out", tmp_path)
    assert code == 4


def test_compare_needs_two_styles(capsys, tmp_path):
    code, _, _ = run(capsys, "compare", "--styles", "1035", "--out", tmp_path)
    assert code == 2


def test_sweep_stats_compare_pipeline(capsys, tmp_path):
    common = ["--styles", "1035,3313", "--out", tmp_path, *FAST]
    # pitches are 14 and 16 mil, so -8..8 spans a full period of each
    assert run(capsys, "sweep", "--diff", "--offsets=-8:8:1", *common)[0] == 0
    assert run(capsys, "stats", "--diff", "--offsets=-8:8:1", "--samples", 20000,
               *common)[0] == 0
    code, out, _ = run(capsys, "compare", "--diff", "--svg", *common)
    assert code == 0 and "DSE" in out
    table = json.loads((tmp_path / "compare_DSE_diff_w4_s4.json").read_text())
    assert [r["style"] for r in table["rows"]] == ["1035", "3313"]
    for row in table["rows"]:
        assert all(0.0 <= v <= 1.0 for v in row["arcsine"])
    assert (tmp_path / "compare_DSE_diff_w4_s4.csv").exists()
    assert (tmp_path / "compare_DSE_diff_w4_s4.svg").exists()


def test_raster(capsys, tmp_path):
    code, out, _ = run(capsys, "raster", "--styles", "1035", "--x", 3.0, "--out", tmp_path)
    assert code == 0
    a = np.loadtxt(tmp_path / "1035_raster_x3_o0.txt", delimiter=",")
    assert set(np.unique(a)) == {1.0, 3.5, 6.0}
    assert run(capsys, "raster", "--styles", "1035", "--x", 17.0, "--out", tmp_path)[0] == 0
    b = np.loadtxt(tmp_path / "1035_raster_x17_o0.txt", delimiter=",")
    np.testing.assert_array_equal(a, b)
    code, _, _ = run(capsys, "raster", "--styles", "1035", "--x", "nan", "--out", tmp_path)
    assert code == 2


def test_raster_diff_svg(capsys, tmp_path):
    code, _, _ = run(capsys, "raster", "--diff", "--styles", "1080", "--svg", "--out", tmp_path)
    assert code == 0
    assert (tmp_path / "1080_raster_x0_o0.svg").exists()
