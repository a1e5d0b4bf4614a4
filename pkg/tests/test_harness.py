import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from coexsim import harness
from coexsim.errors import InvalidInputError
from coexsim.scenario import preset


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) if v not in {"eigen", "spatial", "none"} else v for v in r] for r in rows[1:]]


def test_fmt_is_fixed_precision():
    assert harness.fmt(1 / 3) == "0.333333333333"
    assert harness.fmt(-300.0) == "-300"
    assert harness.fmt(float("nan")) == "nan"
    assert harness.fmt(1e-40) == "1e-40"


def test_fig1a_eigen_csv_null_depth(tmp_path):
    s = preset("fig1a")
    harness.run_beampattern(s, "eigen", tmp_path)
    header, rows = read_csv(tmp_path / "beampattern_eigen.csv")
    assert header == ["theta_deg", "gain_linear", "gain_db"]
    data = np.array(rows)
    assert len(data) == 1801
    peak = data[:, 2].max()
    at = {round(t, 6): db for t, _, db in data}
    assert max(at[-7.0], at[-6.0]) - peak <= -40.0


def test_fig1b_spatial_loses_target():
    s = preset("fig1b")
    e = harness.run_beampattern(s, "eigen").gain_at(0.0)
    sp = harness.run_beampattern(s, "spatial").gain_at(0.0)
    assert 10 * np.log10(e / sp) >= 10.0


@pytest.mark.parametrize("name", ["fig1a", "fig1b"])
def test_none_peaks_at_zero_db(name):
    s = preset(name)
    res = harness.run_beampattern(s, "none")
    assert res.gain_db.max() == pytest.approx(0.0, abs=1e-9)
    assert res.thetas[np.argmax(res.gain)] == s.target_angle


def test_fig2_detection_curves(tmp_path):
    s = preset("fig2")
    sp = harness.run_detection(s, "spatial", tmp_path)
    ei = harness.run_detection(s, "eigen", tmp_path)
    header, _ = read_csv(tmp_path / "detection_spatial_angle.csv")
    assert header == ["theta_deg", "pd_analytic", "pd_mc"]
    inside = (sp.abscissa >= -10) & (sp.abscissa <= -3)
    assert np.all(sp.pd_analytic[inside] <= s.pfa + 0.01)
    fine = replace(s, sweep_grid=(-9.0, -8.0, 0.5))
    assert harness.run_detection(fine, "eigen").pd_analytic[1] > harness.run_detection(fine, "spatial").pd_analytic[1]
    assert np.all(np.isnan(ei.pd_mc))


def test_zero_reflectivity_gives_pfa():
    s = preset("fig2")
    for method in ("eigen", "spatial"):
        c = harness.run_detection(s, method, reflectivity=0.0)
        np.testing.assert_array_equal(c.pd_analytic, s.pfa)


def test_snr_sweep_monotone(tmp_path):
    s = preset("fig2")
    c = harness.run_detection(s, "eigen", tmp_path, "snr", mc_trials=200)
    assert c.abscissa_name == "snr_db" and c.abscissa[0] == -30 and c.abscissa[-1] == 10
    assert np.all(np.diff(c.pd_analytic) >= 0)
    assert np.all((c.pd_mc >= 0) & (c.pd_mc <= 1))


def test_invalid_method_and_sweep():
    with pytest.raises(InvalidInputError):
        harness.run_beampattern(preset("fig1a"), "magic")
    with pytest.raises(InvalidInputError):
        harness.run_detection(preset("fig1a"), "eigen", sweep_mode="range")


def test_write_atomic_leaves_nothing_on_failure(tmp_path):

    def bad_rows():
        yield (1.0, 2.0)
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        harness.write_atomic(tmp_path / "x.csv", harness.csv_text(("a", "b"), bad_rows()))
    assert list(tmp_path.iterdir()) == []

    target = tmp_path / "y.csv"
    orig = harness.os.replace

    def failing_replace(a, b):
        raise OSError("disk full")

    harness.os.replace = failing_replace
    try:
        with pytest.raises(OSError):
            harness.write_atomic(target, "data\n")
    finally:
        harness.os.replace = orig
    assert list(tmp_path.iterdir()) == []


def test_run_all_report_recomputable(tmp_path):
    s = preset("fig2")
    report = harness.run_all(s, tmp_path, mc_trials=20)
    assert report.ok, report
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["scenario_digest"] == report.scenario_digest and doc["ok"] is True
    metrics = {m["name"]: m["value"] for m in doc["metrics"]}
    assert metrics["suppression_ratio_eigen"] <= 1e-10
    assert metrics["suppression_ratio_none"] == 1.0
    for name in doc["output_paths"]:
        assert (tmp_path / name).exists()

    # recompute a sample of metrics from the CSVs
    _, nul = read_csv(tmp_path / "nulling.csv")
    by_method = {r[0]: r for r in nul}
    assert by_method["eigen"][3] == metrics["suppression_ratio_eigen"]
    assert by_method["eigen"][1] == 2 and by_method["eigen"][2] == 126
    _, bp = read_csv(tmp_path / "beampattern_eigen.csv")
    bp = np.array(bp)
    depth = max(bp[bp[:, 0] == t, 2][0] for t in (-7.0, -6.0)) - bp[:, 2].max()
    assert depth == metrics["bp_eigen_null_depth_db"]
    _, det = read_csv(tmp_path / "detection_spatial_angle.csv")
    det = np.array(det)
    assert det[:, 1].min() == metrics["pd_spatial_min"]
    assert np.all(~np.isnan(det[:, 2]))
    _, snr = read_csv(tmp_path / "detection_eigen_snr.csv")
    assert metrics["pd_eigen_snr_monotone"] == float(np.all(np.diff(np.array(snr)[:, 1]) >= 0))


def test_run_all_collects_errors(tmp_path):
    # blocking the target direction makes the spatial pattern undefined; the run continues
    s = replace(preset("fig2"), blocked_sector=(-10.0, 0.0))
    report = harness.run_all(s, tmp_path)
    assert not report.ok
    assert any("beampattern/spatial" in e for e in report.errors)
    assert (tmp_path / "beampattern_eigen.csv").exists()
    assert (tmp_path / "report.json").exists()


def test_run_all_deterministic(tmp_path):
    s = preset("fig2")
    harness.run_all(s, tmp_path / "a", mc_trials=30)
    harness.run_all(s, tmp_path / "b", mc_trials=30)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_resolve_scenario_overrides(tmp_path):
    f = tmp_path / "s.toml"
    f.write_text("snr_db = -5.0\n")
    s = harness.resolve_scenario("fig1b", str(f), seed=3, normalization="peak")
    assert s.snr_db == -5.0 and s.seed == 3 and s.normalization_mode == "peak"
    assert s.blocked_sector == (-5.0, -2.0)
    assert harness.resolve_scenario(None, None) == preset("fig1a")
