"""Composite transmit-receive beampattern.

For a coherence matrix ``R`` and steer angle ``theta_d``::

    G(theta) = K |a^H(theta) R^T a(theta_d)|^2 / (a^H(theta_d) R^T a(theta_d))
                 * |a^H(theta) a(theta_d)|^2 / M

``R^T`` is the plain transpose.  With ``K = 1 / M**2`` an orthogonal,
unprojected waveform peaks at exactly 0 dB.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInputError, NumericError
from .geometry import ArrayConfig, _check_look_angle

DB_FLOOR = -300.0
GAIN_FLOOR = 1e-30
DEGENERATE_TOL = 1e-12
NORMALIZATIONS = ("fixed_K", "peak")


def default_grid(lo: float = -90.0, hi: float = 90.0, step: float = 0.1) -> np.ndarray:
    """Inclusive angle grid; values are rounded to 12 decimals to avoid drift."""
    if step <= 0 or hi < lo:
        raise InvalidInputError(f"invalid grid ({lo}, {hi}, {step})")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12)


def to_db(gain) -> np.ndarray:
    """``10 log10(gain)`` with gains below 1e-30 reported as -300 dB (NaN passes through)."""
    g = np.asarray(gain, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        db = 10.0 * np.log10(g)
    return np.where(g < GAIN_FLOOR, DB_FLOOR, db)


def _forms(R, cfg: ArrayConfig, thetas, theta_d: float):
    R = np.asarray(R, dtype=complex)
    M = cfg.num_elements
    if R.shape != (M, M):
        raise InvalidInputError(f"coherence matrix must be {M}x{M}, got {R.shape}")
    thetas = np.atleast_1d(_check_look_angle(thetas))
    _check_look_angle(theta_d)
    cross, _, arr = _backend.kernels.steering_forms(R, cfg.normalized_spacing, thetas, float(theta_d))
    _, denom, _ = _backend.kernels.steering_forms(R, cfg.normalized_spacing, np.array([float(theta_d)]), float(theta_d))
    return cross, arr, float(denom[0])


def _degenerate(denom: float, R, M: int) -> bool:
    # relative to the largest value the quadratic form can take, M * lambda_max(R)
    scale = M * float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (R + np.conj(R).T)))))
    return not denom > DEGENERATE_TOL * scale


def composite_gain(R, theta: float, theta_d: float, K: float, cfg: ArrayConfig) -> float:
    """Linear composite gain at a single angle.

    Raises
    ------
    NumericError
        If the steering direction is fully nulled, i.e. the denominator
        ``a^H(theta_d) R^T a(theta_d)`` vanishes.
    """
    if not K > 0:
        raise InvalidInputError(f"normalization K must be positive, got {K!r}")
    cross, arr, denom = _forms(R, cfg, theta, theta_d)
    if _degenerate(denom, np.asarray(R, dtype=complex), cfg.num_elements):
        raise NumericError("steering direction fully nulled; pattern undefined at theta_d")
    M = cfg.num_elements
    return float(K * np.abs(cross[0]) ** 2 / denom * np.abs(arr[0]) ** 2 / M)


@dataclass(frozen=True)
class BeampatternResult:
    """Sampled composite pattern.

    ``gain`` holds NaN at every point when the steering direction is nulled
    (``defined`` is then False), which the CSV writer emits as ``nan``.
    """

    thetas: np.ndarray
    gain: np.ndarray
    steer_angle: float
    normalization: float
    defined: bool = True
    gain_db: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gain_db", to_db(self.gain))

    def gain_at(self, theta: float) -> float:
        idx = int(np.argmin(np.abs(self.thetas - theta)))
        if abs(self.thetas[idx] - theta) > 1e-9:
            raise InvalidInputError(f"angle {theta} is not on the sweep grid")
        return float(self.gain[idx])

    def rows(self):
        return zip(self.thetas, self.gain, self.gain_db)


def sweep(R, theta_d: float, grid, cfg: ArrayConfig, normalization: str = "fixed_K") -> BeampatternResult:
    """Evaluate the composite pattern over ``grid``.

    Parameters
    ----------
    normalization : {"fixed_K", "peak"}
        ``fixed_K`` uses ``K = 1/M**2``.  ``peak`` rescales so the grid maximum
        is exactly 1.
    """
    if normalization not in NORMALIZATIONS:
        raise InvalidInputError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidInputError("sweep grid is empty")
    R = np.asarray(R, dtype=complex)
    M = cfg.num_elements
    cross, arr, denom = _forms(R, cfg, grid, theta_d)
    K = 1.0 / M**2
    if _degenerate(denom, R, M):
        return BeampatternResult(grid, np.full(grid.shape, np.nan), float(theta_d), K, defined=False)
    raw = np.abs(cross) ** 2 / denom * np.abs(arr) ** 2 / M
    if normalization == "peak":
        peak = float(raw.max())
        K = 1.0 / peak if peak > 0 else 1.0
    return BeampatternResult(grid, K * raw, float(theta_d), K)
