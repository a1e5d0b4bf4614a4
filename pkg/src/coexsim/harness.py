"""Experiment drivers: beampattern and detection runs, CSV output and the run report.

Every metric in the report is computed from values as they are written to
the CSVs (12 significant digits), so it can be recomputed from those files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _backend
from .beampattern import BeampatternResult, sweep
from .detection import (DetectionCurve, central_chi2_2_inv_cdf, mc_geometry, monte_carlo_noise,
                        monte_carlo_pd_sweep, noise_power_for_snr, probability_of_detection,
                        statistics_from_noise)
from .errors import CoexsimError, InvalidInputError
from .nulling import eigen_null_projector, spatial_null_projector
from .scenario import Scenario, digest, to_channel, to_toml
from .waveform import coherence, generate_orthogonal, project_waveform

METHODS = ("eigen", "spatial", "none")
SWEEPS = ("angle", "snr")
SNR_GRID_DB = np.arange(-30.0, 10.0 + 0.5, 1.0)
REFLECTIVITY = 1.0
NULL_DEPTH_DB = -40.0
PD_MARGIN = 0.01


def fmt(x: float) -> str:
    """Locale-free decimal rendering with 12 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _q(x) -> np.ndarray:
    # round-trip through the CSV representation
    return np.array([float(fmt(v)) for v in np.atleast_1d(x)])


# ---------------------------------------------------------------- file output

def write_atomic(path: Path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file; no partial file survives a failure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- building blocks

def projector(s: Scenario, method: str, H: np.ndarray | None = None) -> np.ndarray:
    """Transmit projector for ``method`` (identity for ``none``)."""
    if method == "eigen":
        return eigen_null_projector(to_channel(s) if H is None else H)
    if method == "spatial":
        return spatial_null_projector(s.blocked_sector, s.radar)
    if method == "none":
        return np.eye(s.radar.num_elements, dtype=complex)
    raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")


def projected_waveform(s: Scenario, method: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(P, X~, R~)`` for a scenario and nulling method."""
    P = projector(s, method)
    Xt = project_waveform(P, generate_orthogonal(s.radar.num_elements, s.num_samples))
    return P, Xt, coherence(Xt)


def suppression_ratio(H: np.ndarray, P: np.ndarray, X: np.ndarray) -> float:
    """``||H P X||_F / ||H X||_F``."""
    base = np.linalg.norm(H @ X)
    if base == 0:
        return 0.0
    return float(np.linalg.norm(H @ (P @ X)) / base)


# ---------------------------------------------------------------- experiments

def run_beampattern(s: Scenario, method: str, out_dir: str | Path | None = None) -> BeampatternResult:
    """Composite pattern of the projected waveform, optionally written to ``beampattern_<method>.csv``."""
    _, _, R = projected_waveform(s, method)
    result = sweep(R, s.target_angle, s.grid(), s.radar, s.normalization_mode)
    if out_dir is not None:
        write_atomic(Path(out_dir) / f"beampattern_{method}.csv",
                     csv_text(("theta_deg", "gain_linear", "gain_db"), result.rows()))
    return result


def _angle_pd(s: Scenario, R: np.ndarray, thetas: np.ndarray, reflectivity: complex) -> np.ndarray:
    _, g, _ = _backend.kernels.steering_forms(R, s.radar.normalized_spacing, thetas, 0.0)
    snr = abs(reflectivity) ** 2 / noise_power_for_snr(s.snr_db)
    return probability_of_detection(snr * g * g, s.pfa)


def run_detection(s: Scenario, method: str, out_dir: str | Path | None = None, sweep_mode: str = "angle",
                  mc_trials: int = 0, workers: int = 1, reflectivity: complex = REFLECTIVITY) -> DetectionCurve:
    """Analytic (and optionally simulated) P_d versus angle or SNR.

    In angle mode the SNR is ``s.snr_db``; in SNR mode the target sits at
    ``s.target_angle`` and SNR runs over -30..10 dB.  The Monte Carlo column
    uses ``s.seed`` and is NaN when ``mc_trials`` is 0.
    """
    if sweep_mode not in SWEEPS:
        raise InvalidInputError(f"sweep must be one of {SWEEPS}, got {sweep_mode!r}")
    if mc_trials < 0:
        raise InvalidInputError("mc_trials must be nonnegative")
    _, Xt, R = projected_waveform(s, method)
    sigma2 = noise_power_for_snr(s.snr_db)
    if sweep_mode == "angle":
        x = s.grid()
        pd = _angle_pd(s, R, x, reflectivity)
        if mc_trials:
            mc = monte_carlo_pd_sweep(x, reflectivity, sigma2, Xt, s.radar, s.pfa, mc_trials, s.seed, workers)
        else:
            mc = np.full(x.shape, np.nan)
    else:
        x = SNR_GRID_DB.copy()
        _, g, _ = _backend.kernels.steering_forms(R, s.radar.normalized_spacing,
                                                  np.array([s.target_angle]), 0.0)
        snr = abs(reflectivity) ** 2 / noise_power_for_snr(x)
        pd = probability_of_detection(snr * g[0] ** 2, s.pfa)
        mc = np.full(x.shape, np.nan)
        if mc_trials:
            # one noise draw serves every SNR (common random numbers)
            geom = mc_geometry([s.target_angle], Xt, s.radar)
            v = monte_carlo_noise(geom, mc_trials, s.seed, workers)
            delta = central_chi2_2_inv_cdf(1.0 - s.pfa)
            for i, snr_db in enumerate(x):
                stats = statistics_from_noise(geom, v, reflectivity, noise_power_for_snr(snr_db))
                mc[i] = np.count_nonzero(stats[:, 0] > delta) / mc_trials
    name = "theta_deg" if sweep_mode == "angle" else "snr_db"
    curve = DetectionCurve(name, x, pd, mc)
    if out_dir is not None:
        write_atomic(Path(out_dir) / f"detection_{method}_{sweep_mode}.csv",
                     csv_text((name, "pd_analytic", "pd_mc"), curve.rows()))
    return curve


# ---------------------------------------------------------------- full run

@dataclass
class RunReport:
    """Summary of :func:`run_all`."""

    scenario_digest: str
    metrics: list[tuple[str, float | None]] = field(default_factory=list)
    properties: list[tuple[str, bool]] = field(default_factory=list)
    output_paths: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and all(passed for _, passed in self.properties)

    def metric(self, name: str) -> float | None:
        return dict(self.metrics)[name]

    def to_json(self) -> str:
        def clean(v):
            return None if v is None or (isinstance(v, float) and math.isnan(v)) else v

        doc = {
            "scenario_digest": self.scenario_digest,
            "backend": _backend.BACKEND,
            "metrics": [{"name": n, "value": clean(v)} for n, v in self.metrics],
            "properties": [{"name": n, "passed": p} for n, p in self.properties],
            "output_paths": self.output_paths,
            "errors": self.errors,
            "ok": self.ok,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _on_grid(x: np.ndarray, value: float) -> int | None:
    idx = int(np.argmin(np.abs(x - value)))
    return idx if abs(x[idx] - value) <= 1e-9 else None


def _guard(report: RunReport, label: str, fn: Callable):
    try:
        return fn()
    except CoexsimError as exc:
        report.errors.append(f"{label}: {exc}")
        return None


def run_all(s: Scenario, out_dir: str | Path, mc_trials: int = 0, workers: int = 1) -> RunReport:
    """Run both experiments for every method, write CSVs, ``scenario.toml`` and ``report.json``.

    Errors in one experiment are recorded and the remaining experiments still run.
    """
    out = Path(out_dir)
    report = RunReport(digest(s))
    written: list[Path] = [write_atomic(out / "scenario.toml", to_toml(s))]
    path_angles = sorted({p.radar_angle for p in s.paths})
    H = to_channel(s)
    X = generate_orthogonal(s.radar.num_elements, s.num_samples)

    rows = []
    for method in METHODS:
        P = _guard(report, f"nulling/{method}", lambda: projector(s, method, H))
        if P is None:
            continue
        ratio = suppression_ratio(H, P, X)
        nullity = int(round(float(np.real(np.trace(P)))))
        rows.append((method, str(s.radar.num_elements - nullity), str(nullity), ratio))
        report.metrics.append((f"suppression_ratio_{method}", float(_q(ratio)[0])))
    written.append(write_atomic(out / "nulling.csv",
                                csv_text(("method", "rank", "nullity", "suppression_ratio"), rows)))
    if any(r[0] == "eigen" for r in rows):
        report.properties.append(("eigen_suppression_ratio<=1e-10",
                                  report.metric("suppression_ratio_eigen") <= 1e-10))

    for method in METHODS:
        bp = _guard(report, f"beampattern/{method}", lambda: run_beampattern(s, method, out))
        if bp is None:
            continue
        written.append(out / f"beampattern_{method}.csv")
        if not bp.defined:
            report.errors.append(f"beampattern/{method}: steering direction fully nulled")
            continue
        db = _q(bp.gain_db)
        peak = float(db.max())
        report.metrics.append((f"bp_{method}_peak_db", peak))
        i_t = _on_grid(bp.thetas, s.target_angle)
        if i_t is not None:
            report.metrics.append((f"bp_{method}_target_db", float(db[i_t])))
        idx = [_on_grid(bp.thetas, a) for a in path_angles]
        if method != "none" and all(i is not None for i in idx):
            depth = float(max(db[i] for i in idx) - peak)
            report.metrics.append((f"bp_{method}_null_depth_db", depth))
            if method == "eigen":
                report.properties.append(("eigen_null_depth<=-40dB", depth <= NULL_DEPTH_DB))

    for method in ("eigen", "spatial"):
        curve = _guard(report, f"detection/{method}/angle",
                       lambda: run_detection(s, method, out, "angle", mc_trials, workers))
        if curve is not None:
            written.append(out / f"detection_{method}_angle.csv")
            pd = _q(curve.pd_analytic)
            report.metrics += [(f"pd_{method}_min", float(pd.min())), (f"pd_{method}_max", float(pd.max()))]
            idx = [_on_grid(curve.abscissa, a) for a in path_angles]
            if all(i is not None for i in idx):
                at_paths = float(max(pd[i] for i in idx))
                report.metrics.append((f"pd_{method}_at_paths_max", at_paths))
                if method == "eigen":
                    report.properties.append(("eigen_pd_at_paths<=pfa+0.01", at_paths <= s.pfa + PD_MARGIN))
        curve = _guard(report, f"detection/{method}/snr",
                       lambda: run_detection(s, method, out, "snr", mc_trials, workers))
        if curve is not None:
            written.append(out / f"detection_{method}_snr.csv")
            monotone = bool(np.all(np.diff(_q(curve.pd_analytic)) >= 0))
            report.metrics.append((f"pd_{method}_snr_monotone", float(monotone)))
            report.properties.append((f"{method}_pd_monotone_in_snr", monotone))

    report.output_paths = sorted({p.name for p in written} | {"report.json"})
    write_atomic(out / "report.json", report.to_json())
    return report


def resolve_scenario(preset_name: str | None, scenario_file: str | None, seed: int | None = None,
                     normalization: str | None = None) -> Scenario:
    """Scenario from a preset and/or file (file keys override the preset), with CLI overrides."""
    from .scenario import DEFAULT, load, preset

    base = preset(preset_name) if preset_name else DEFAULT
    s = load(scenario_file, base) if scenario_file else base
    if seed is not None:
        s = replace(s, seed=seed)
    if normalization is not None:
        s = replace(s, normalization_mode=normalization)
    return s

