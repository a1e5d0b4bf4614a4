"""Transmit-side projectors and the MVDR beamformer.

Both nulling methods produce an ``M x M`` orthogonal projector ``P`` that is
applied to the radar waveform.  Eigen-nulling projects onto the right null
space of the interference channel ``H``.  The spatial baseline builds a
virtual channel whose rows are the transmit responses ``a(theta)^T`` sampled
over a blocked sector and projects onto its null space, so any radiation into
the sector is removed whether or not the BS lies there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericError
from .geometry import ArrayConfig, steering_vectors

RANK_TOLERANCE = 1e-8
DEFAULT_GRID_STEP = 0.5


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``H = U diag(s) V^H`` with ``U`` (N x N) and ``V`` (M x M) unitary."""

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray


def svd(H) -> SvdResult:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or 0 in H.shape:
        raise InvalidInputError(f"channel must be a nonempty 2-D matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise NumericError("channel matrix has non-finite entries")
    try:
        U, s, Vh = np.linalg.svd(H, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    return SvdResult(U, s, Vh.conj().T)


def effective_rank(singular_values, tolerance: float = RANK_TOLERANCE) -> int:
    """Count singular values above ``tolerance * s[0]``; zero for an all-zero spectrum."""
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.count_nonzero(s > tolerance * s[0]))


def projection_matrix(result: SvdResult, q: int) -> np.ndarray:
    """``P = V diag(s') V^H`` with ``s'_u = 0`` for ``u <= q`` and 1 otherwise.

    The modified spectrum has length M: entries past ``min(N, M)`` belong to
    zero singular values and are kept (set to one).
    """
    V = result.right_vectors
    M = V.shape[0]
    if int(q) != q or not (0 <= q <= M):
        raise InvalidInputError(f"q must be an integer in [0, {M}], got {q!r}")
    Vn = V[:, int(q):]
    P = Vn @ Vn.conj().T
    return 0.5 * (P + P.conj().T)


def eigen_null_projector(H, tolerance: float = RANK_TOLERANCE) -> np.ndarray:
    """Projector onto the right null space of ``H`` (identity when ``H = 0``)."""
    result = svd(H)
    return projection_matrix(result, effective_rank(result.singular_values, tolerance))


def sector_grid(blocked: tuple[float, float], grid_step: float = DEFAULT_GRID_STEP) -> np.ndarray:
    """Angles ``lo, lo + step, ...`` inside the sector, always ending at ``hi``."""
    lo, hi = (float(v) for v in blocked)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise InvalidInputError(f"blocked sector must satisfy lo <= hi, got ({lo}, {hi})")
    if lo < -90.0 or hi > 90.0:
        raise InvalidInputError(f"blocked sector must lie inside [-90, 90], got ({lo}, {hi})")
    if not np.isfinite(grid_step) or grid_step <= 0:
        raise InvalidInputError(f"grid step must be positive, got {grid_step!r}")
    n = int(np.floor((hi - lo) / grid_step + 1e-9))
    grid = lo + grid_step * np.arange(n + 1)
    if hi - grid[-1] > 1e-9 * max(1.0, grid_step):
        grid = np.append(grid, hi)
    return np.clip(grid, lo, hi)


def spatial_null_projector(blocked: tuple[float, float], radar_cfg: ArrayConfig,
                           grid_step: float = DEFAULT_GRID_STEP,
                           tolerance: float = RANK_TOLERANCE) -> np.ndarray:
    """Projector removing the transmit response toward every sampled angle of a sector.

    The returned ``P`` satisfies ``a(theta)^T P = 0`` at each grid angle, i.e.
    ``P`` annihilates ``conj(a(theta))`` and no field is radiated there.
    """
    virtual = steering_vectors(radar_cfg, sector_grid(blocked, grid_step))
    return eigen_null_projector(virtual, tolerance)


def mvdr_weights(R, x) -> np.ndarray:
    """Minimum-variance distortionless weights ``w = R^-1 x / (x^H R^-1 x)``.

    Raises
    ------
    NumericError
        If ``R`` is numerically singular.  No diagonal loading is applied.
    """
    R = np.asarray(R, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1] or x.shape != (R.shape[0],):
        raise InvalidInputError(f"shape mismatch: R {R.shape}, x {x.shape}")
    if not np.any(x):
        raise InvalidInputError("constraint vector x must be nonzero")
    if not np.allclose(R, R.conj().T, rtol=0, atol=1e-10 * max(np.abs(R).max(), 1e-300)):
        raise InvalidInputError("covariance must be Hermitian")
    eig = np.linalg.eigvalsh(R)
    if eig[-1] <= 0 or eig[0] <= 1e-12 * eig[-1]:
        raise NumericError("covariance not invertible; add diagonal loading upstream")
    Rinv_x = np.linalg.solve(R, x)
    return Rinv_x / np.vdot(x, Rinv_x)
