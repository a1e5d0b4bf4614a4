"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed even when output capture is on.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from coexsim.channel import PathSpec, elementwise_channel, los_channel, multipath_channel
from coexsim.detection import (DetectionParams, central_chi2_2_inv_cdf, monte_carlo_pd, noncentral_chi2_2_cdf,
                               noncentrality, probability_of_detection)
from coexsim.geometry import ArrayConfig
from coexsim.harness import projector, run_beampattern, run_detection
from coexsim.nulling import eigen_null_projector, effective_rank, svd
from coexsim.scenario import PRESET_NAMES, preset, to_channel
from coexsim.waveform import generate_orthogonal


@pytest.fixture
def report(capsys):
    def emit(n, title, passed, detail, elapsed, limit):
        ok = passed and elapsed < limit
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}  {title}: {detail}; "
                  f"{elapsed:.2f}s (limit {limit:g}s)")
        assert passed, detail
        assert elapsed < limit, f"runtime {elapsed:.2f}s exceeds {limit}s"
    return emit


def random_paths(r, k):
    return [PathSpec(r.uniform(0.05, 2.0), r.uniform(1_000.0, 50_000.0), r.uniform(1.0, 179.0),
                     r.uniform(1.0, 179.0)) for _ in range(k)]


def test_criterion_1_channel_equivalence(report):
    t0 = time.perf_counter()
    r = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        N, M = int(r.integers(1, 9)), int(r.integers(1, 17))
        radar, bs = ArrayConfig(M, r.uniform(0.25, 1.0)), ArrayConfig(N, r.uniform(0.25, 1.0))
        path = random_paths(r, 1)[0]
        H = los_channel(path, radar, bs)
        ref = elementwise_channel([path], radar, bs)
        worst = max(worst, float(np.max(np.abs(H - ref) / np.abs(ref))))
    report(1, "rank-one channel equals element-wise construction", worst <= 1e-10,
           f"max relative error {worst:.2e} (tol 1e-10)", time.perf_counter() - t0, 1.0)


def test_criterion_2_projector_algebra(report):
    t0 = time.perf_counter()
    r = np.random.default_rng(2)
    worst = [0.0, 0.0, 0.0]
    for _ in range(100):
        N, M = int(r.integers(2, 9)), int(r.integers(3, 17))
        k = int(r.integers(1, 4))
        H = multipath_channel(random_paths(r, k), ArrayConfig(M), ArrayConfig(N))
        q = effective_rank(svd(H).singular_values)
        P = eigen_null_projector(H)
        worst[0] = max(worst[0], float(np.max(np.abs(P @ P - P))))
        worst[1] = max(worst[1], float(np.max(np.abs(P - P.conj().T))))
        worst[2] = max(worst[2], abs(float(np.trace(P).real) - (M - q)))
    passed = worst[0] <= 1e-10 and worst[1] <= 1e-12 and worst[2] <= 1e-9
    report(2, "eigen-null projector algebra", passed,
           f"idempotency {worst[0]:.1e}, Hermitian {worst[1]:.1e}, trace {worst[2]:.1e}",
           time.perf_counter() - t0, 1.0)


def test_criterion_3_interference_suppression(report):
    t0 = time.perf_counter()
    ratios = []
    for name in PRESET_NAMES:
        s = preset(name)
        H = to_channel(s)
        X = generate_orthogonal(s.radar.num_elements, s.num_samples)
        ratios.append(np.linalg.norm(H @ projector(s, "eigen", H) @ X) / np.linalg.norm(H @ X))
    r = np.random.default_rng(3)
    for _ in range(100):
        M = int(r.integers(2, 17))
        N = int(r.integers(1, 9))
        k = int(r.integers(1, M))  # fewer paths than radar elements
        H = multipath_channel(random_paths(r, k), ArrayConfig(M), ArrayConfig(N))
        X = generate_orthogonal(M, 128)
        ratios.append(np.linalg.norm(H @ eigen_null_projector(H) @ X) / np.linalg.norm(H @ X))
    worst = float(max(ratios))
    report(3, "interference suppression ||HPX||/||HX||", worst <= 1e-10,
           f"worst ratio {worst:.2e} over {len(ratios)} channels (tol 1e-10)", time.perf_counter() - t0, 2.0)


def test_criterion_4_fig1a_null_depth(report):
    t0 = time.perf_counter()
    s = preset("fig1a")
    eig = run_beampattern(s, "eigen")
    ref = run_beampattern(s, "none")
    peak = eig.gain_db.max()
    depths = [eig.gain_db[np.argmin(np.abs(eig.thetas - t))] - peak for t in (-7.0, -6.0)]
    main_loss = ref.gain_db[np.argmin(np.abs(ref.thetas))] - eig.gain_db[np.argmin(np.abs(eig.thetas))]
    passed = max(depths) <= -40.0 and abs(main_loss) <= 1.0
    report(4, "fig1a eigen nulls at -7/-6 deg and intact mainlobe", passed,
           f"nulls {depths[0]:.1f}/{depths[1]:.1f} dB below peak (need <= -40), "
           f"mainlobe change {main_loss:.3f} dB (need <= 1)", time.perf_counter() - t0, 5.0)


def test_criterion_5_fig1b_localisation(report):
    t0 = time.perf_counter()
    s = preset("fig1b")
    e = run_beampattern(s, "eigen").gain_at(0.0)
    sp = run_beampattern(s, "spatial").gain_at(0.0)
    margin = 10 * math.log10(e / sp)
    report(5, "fig1b eigen beats spatial at the target", margin >= 10.0,
           f"eigen - spatial at 0 deg = {margin:.2f} dB (need >= 10)", time.perf_counter() - t0, 5.0)


def test_criterion_6_detection_statistics(report):
    t0 = time.perf_counter()
    cfg = ArrayConfig(8)
    X = generate_orthogonal(8, 32)
    n = 100_000
    lines, passed = [], True
    for pfa in (1e-2, 1e-3):
        for rho in (1.0, 4.0, 10.0, 25.0):
            # rho = |alpha|^2 M^2 / sigma^2 with alpha = 1 and R = I
            p = DetectionParams(0.0, 1.0, 64.0 / rho, pfa)
            assert noncentrality(p, np.eye(8), cfg) == pytest.approx(rho, rel=1e-12)
            seed = int(rho * 1000) + int(round(-math.log10(pfa)))
            emp = monte_carlo_pd(p, X, cfg, n, seed)
            ana = probability_of_detection(rho, pfa)
            passed &= abs(emp - ana) <= 0.01
            lines.append(f"{rho:g}/{pfa:g}: {emp:.4f} vs {ana:.4f}")
        p0 = DetectionParams(0.0, 0.0, 1.0, pfa)
        emp0 = monte_carlo_pd(p0, X, cfg, n, seed=77)
        se = math.sqrt(pfa * (1 - pfa) / n)
        passed &= abs(emp0 - pfa) <= 3 * se
        lines.append(f"rho=0/{pfa:g}: {emp0:.5f} ({(emp0 - pfa) / se:+.2f} SE)")
    report(6, "analytic P_d vs full-pipeline Monte Carlo at 1e5 trials", passed, "; ".join(lines),
           time.perf_counter() - t0, 60.0)


def test_criterion_7_fig2_search_space(report):
    t0 = time.perf_counter()
    s = preset("fig2")
    sp = run_detection(s, "spatial")
    ei = run_detection(s, "eigen")
    thr = s.pfa + 0.01
    z_sp = {float(t) for t in np.round(sp.abscissa[sp.pd_analytic <= thr], 9)}
    z_ei = {float(t) for t in np.round(ei.abscissa[ei.pd_analytic <= thr], 9)}
    excess = z_sp - z_ei
    passed = (z_ei < z_sp) and all(-10.0 <= t <= -3.0 and t not in (-7.0, -6.0) for t in excess)
    report(7, "fig2 spatial blind set strictly contains eigen blind set", passed,
           f"eigen {sorted(z_ei)}, spatial {sorted(z_sp)}", time.perf_counter() - t0, 10.0)


def test_criterion_8_special_functions(report):
    t0 = time.perf_counter()
    r = np.random.default_rng(8)
    n, chunk = 10**7, 10**6
    lines, passed = [], True
    for x, rho in ((1.0, 1.0), (4.0, 2.0), (9.0, 5.0)):
        hits = 0
        for _ in range(n // chunk):
            z1, z2 = r.standard_normal(chunk), r.standard_normal(chunk)
            hits += int(np.count_nonzero((z1 + math.sqrt(rho)) ** 2 + z2**2 <= x))
        emp, F = hits / n, noncentral_chi2_2_cdf(x, rho)
        se = math.sqrt(F * (1 - F) / n)
        passed &= abs(emp - F) <= 3 * se
        lines.append(f"({x:g},{rho:g}) {(emp - F) / se:+.2f} SE")
    ps = np.concatenate([[0.0, 1e-12, 0.5, 1 - math.exp(-1), 0.999], np.linspace(0.01, 0.99, 99)])
    closed = np.array([-2.0 * math.log1p(-p) for p in ps])
    err = float(np.max(np.abs(central_chi2_2_inv_cdf(ps) - closed)))
    passed &= err <= 1e-12
    lines.append(f"inverse CDF max error {err:.1e}")
    report(8, "noncentral CDF vs 1e7 samples; central inverse closed form", passed, "; ".join(lines),
           time.perf_counter() - t0, 30.0)


def test_criterion_9_determinism(report, tmp_path):
    t0 = time.perf_counter()
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        proc = subprocess.run([sys.executable, "-m", "coexsim.cli", "all", "--preset", "fig1a", "--seed", "7",
                               "--out", str(out)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr + proc.stdout
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = outs[0] == outs[1] and len(outs[0]) > 0
    report(9, "two `all --preset fig1a --seed 7` runs are byte-identical", same,
           f"{len(outs[0])} files compared", time.perf_counter() - t0, 20.0)
