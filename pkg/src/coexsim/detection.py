"""GLRT detection: chi-squared machinery, analytic P_d and a Monte Carlo oracle.

Received model and normalisation
--------------------------------
The radar receives ``Y = alpha A(theta) X~ + W`` where ``X~`` is the
(projected) ``M x L`` waveform and ``W`` holds i.i.d. circular complex
Gaussian noise of variance ``sigma_w**2 = 2 L sigma_n**2`` per entry.  The
matched-filter matrix is ``E = Y X~^H / (L sigma_n)``.  With this scaling the
fixed-angle statistic ``|a^H E a*|^2 / (M a^H R~^T a)`` is exactly chi-squared
with two degrees of freedom under H0, and noncentral chi-squared under H1 with
noncentrality ``|alpha|^2 M g / sigma_n**2`` where ``g = a^H R~^T a``.  For an
orthogonal waveform (``g = M``) this equals the closed form
``|alpha|^2 g**2 / sigma_n**2`` returned by :func:`noncentrality`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _backend
from .errors import InvalidInputError, NumericError
from .geometry import ArrayConfig, steering_vector, steering_vectors

MIN_MC_TRIALS = 10_000
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class DetectionParams:
    """Target and noise description for one detection problem.

    Parameters
    ----------
    target_angle : float
        Look angle in degrees.
    reflectivity : complex
        Target reflection coefficient ``alpha``.
    noise_power : float
        ``sigma_n**2`` (see module docstring for its role in the pipeline).
    false_alarm : float
        Design false-alarm probability in (0, 1).
    """

    target_angle: float
    reflectivity: complex = 1.0
    noise_power: float = 1.0
    false_alarm: float = 1e-3

    def __post_init__(self) -> None:
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))
        if not (np.isfinite(self.noise_power) and self.noise_power > 0):
            raise InvalidInputError(f"noise_power must be positive, got {self.noise_power!r}")
        if not (0.0 < self.false_alarm < 1.0):
            raise InvalidInputError(f"false_alarm must lie in (0, 1), got {self.false_alarm!r}")
        if not -90.0 <= self.target_angle <= 90.0:
            raise InvalidInputError(f"target_angle must lie in [-90, 90], got {self.target_angle!r}")

    @property
    def threshold(self) -> float:
        return central_chi2_2_inv_cdf(1.0 - self.false_alarm)

    @property
    def snr(self) -> float:
        return abs(self.reflectivity) ** 2 / self.noise_power


def noise_power_for_snr(snr_db: float, reflectivity: complex = 1.0) -> float:
    """``sigma_n**2`` giving ``|alpha|^2 / sigma_n^2 = 10**(snr_db/10)``."""
    return abs(reflectivity) ** 2 / 10.0 ** (snr_db / 10.0)


# ---------------------------------------------------------------- special functions

def central_chi2_2_inv_cdf(p):
    """Inverse CDF of the central chi-squared law with 2 dof, ``-2 ln(1 - p)``."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p_arr)) or np.any(p_arr < 0) or np.any(p_arr >= 1):
        raise InvalidInputError("probability must lie in [0, 1)")
    out = -2.0 * np.log1p(-p_arr)
    return float(out) if out.ndim == 0 else out


def noncentral_chi2_2_cdf(x, rho):
    """CDF of the noncentral chi-squared law with 2 dof and noncentrality ``rho``.

    Equals ``1 - Q1(sqrt(rho), sqrt(x))`` with ``Q1`` the Marcum Q function.
    """
    x_arr, rho_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(rho, dtype=float))
    if np.any(x_arr < 0) or np.any(rho_arr < 0) or np.any(np.isnan(x_arr)) or np.any(np.isnan(rho_arr)):
        raise InvalidInputError("x and rho must be nonnegative")
    central = -np.expm1(-0.5 * x_arr)
    with np.errstate(all="ignore"):
        nc = special.chndtr(x_arr, 2.0, rho_arr)
    out = np.clip(np.where(rho_arr == 0, central, nc), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def marcum_q1(a, b):
    """First-order Marcum Q function ``Q1(a, b)``."""
    return 1.0 - noncentral_chi2_2_cdf(np.square(b), np.square(a))


def probability_of_detection(rho, p_fa: float):
    """Analytic ``P_d = 1 - F_ncx2(rho)(F_x2^-1(1 - P_FA))`` for the fixed-angle GLRT."""
    if not (0.0 < p_fa < 1.0):
        raise InvalidInputError(f"P_FA must lie in (0, 1), got {p_fa!r}")
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0) or np.any(np.isnan(rho_arr)):
        raise InvalidInputError("rho must be nonnegative")
    delta = central_chi2_2_inv_cdf(1.0 - p_fa)
    # at rho = 0 the tail is exactly P_FA; use it directly instead of 1 - (1 - P_FA)
    pd = np.where(rho_arr == 0, p_fa, 1.0 - noncentral_chi2_2_cdf(delta, rho_arr))
    pd = np.clip(pd, p_fa, 1.0)
    return float(pd) if pd.ndim == 0 else pd


# ---------------------------------------------------------------- noncentrality

def _quadratic(R, a) -> float:
    # a^H R^T a
    return float(np.real(np.vdot(a, np.asarray(R).T @ a)))


def _check_R(R, M: int) -> np.ndarray:
    R = np.asarray(R, dtype=complex)
    if R.shape != (M, M):
        raise InvalidInputError(f"coherence matrix must be {M}x{M}, got {R.shape}")
    return R


def noncentrality(params: DetectionParams, R, cfg: ArrayConfig) -> float:
    """Closed-form noncentrality ``(|alpha|^2 / sigma_n^2) |a^H R^T a|^2``."""
    R = _check_R(R, cfg.num_elements)
    g = _quadratic(R, steering_vector(cfg, params.target_angle))
    return params.snr * g * g


def pipeline_noncentrality(params: DetectionParams, R, cfg: ArrayConfig) -> float:
    """Noncentrality realised by the simulated pipeline, ``(|alpha|^2/sigma_n^2) M g``.

    Agrees with :func:`noncentrality` when ``g = M`` (orthogonal waveform) and
    is larger by ``M / g`` for a projected waveform.
    """
    R = _check_R(R, cfg.num_elements)
    g = _quadratic(R, steering_vector(cfg, params.target_angle))
    return params.snr * cfg.num_elements * max(g, 0.0)


# ---------------------------------------------------------------- GLRT

def received_block(params: DetectionParams, Xt, cfg: ArrayConfig, noise=None) -> np.ndarray:
    """``Y = alpha A(theta) X~ + sigma_w W`` with ``W`` unit-variance noise (or none)."""
    Xt = np.asarray(Xt, dtype=complex)
    a = steering_vector(cfg, params.target_angle)
    Y = params.reflectivity * np.outer(a, a @ Xt)
    if noise is not None:
        L = Xt.shape[1]
        Y = Y + math.sqrt(2.0 * L * params.noise_power) * np.asarray(noise)
    return Y


def matched_filter(Y, Xt, noise_power: float) -> np.ndarray:
    """Normalised matched-filter matrix ``E = Y X~^H / (L sigma_n)``."""
    Y = np.asarray(Y, dtype=complex)
    Xt = np.asarray(Xt, dtype=complex)
    if Y.shape != Xt.shape:
        raise InvalidInputError(f"Y {Y.shape} and X~ {Xt.shape} must have equal shape")
    L = Xt.shape[1]
    return Y @ Xt.conj().T / (L * math.sqrt(noise_power))


@dataclass(frozen=True)
class GlrtResult:
    statistic: float
    theta_hat: float
    skipped: tuple[float, ...] = ()


def glrt_statistic(E, R, theta_grid, cfg: ArrayConfig) -> GlrtResult:
    """Grid maximum of ``|a^H E a*|^2 / (M a^H R^T a)`` and its argmax.

    Angles where the denominator vanishes (relative to ``M lambda_max(R)``)
    are skipped and reported.
    """
    M = cfg.num_elements
    E = np.asarray(E, dtype=complex)
    R = _check_R(R, M)
    if E.shape != (M, M):
        raise InvalidInputError(f"E must be {M}x{M}, got {E.shape}")
    grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    A = steering_vectors(cfg, grid)
    num = np.abs(np.einsum("ti,ij,tj->t", A.conj(), E, A.conj())) ** 2
    g = np.einsum("ti,ij,tj->t", A.conj(), R.T, A).real
    lam = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (R + R.conj().T)))))
    ok = g > DEGENERATE_TOL * M * lam
    if not np.any(ok):
        raise NumericError("no usable angle in the GLRT grid: all directions nulled")
    stat = np.where(ok, num / (M * np.where(ok, g, 1.0)), -np.inf)
    idx = int(np.argmax(stat))
    return GlrtResult(float(stat[idx]), float(grid[idx]), tuple(float(t) for t in grid[~ok]))


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class McGeometry:
    """Per-angle quantities shared by every Monte Carlo trial.

    With ``c(n) = conj(a^T x~(n))`` the matched-filter output at angle theta is
    ``z = alpha M L g + sigma_w v``, where ``v = sum_n (a^H w(n)) c(n)`` is the
    only random part.  ``v`` is drawn once and reused for any SNR.
    """

    thetas: np.ndarray
    Ah: np.ndarray
    C: np.ndarray
    g: np.ndarray
    usable: np.ndarray
    M: int
    L: int


def mc_geometry(thetas, Xt, cfg: ArrayConfig) -> McGeometry:
    Xt = np.asarray(Xt, dtype=complex)
    M, L = Xt.shape
    if M != cfg.num_elements:
        raise InvalidInputError(f"waveform has {M} rows, array has {cfg.num_elements} elements")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    A = steering_vectors(cfg, thetas)
    C = (A @ Xt).conj()
    g = np.sum(np.abs(C) ** 2, axis=1) / L  # a^H R~^T a with R~ = X~ X~^H / L
    lam = float(np.linalg.norm(Xt, 2)) ** 2 / L
    usable = g > DEGENERATE_TOL * M * lam
    return McGeometry(thetas, np.ascontiguousarray(A.conj()), np.ascontiguousarray(C), g, usable, M, L)


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def monte_carlo_noise(geom: McGeometry, trials: int, seed: int, workers: int | None = 1,
                      trial_start: int = 0) -> np.ndarray:
    """Noise projections ``v``, shape ``(trials, len(thetas))``.

    Trial ``t`` draws its noise block from ``(seed, t)`` alone and shares it
    across all angles, so the output is identical for any ``workers``.
    """
    if trials < 0:
        raise InvalidInputError("trials must be nonnegative")
    kern = _backend.kernels

    def run(rng):
        lo, hi = rng
        return kern.glrt_noise(int(seed), trial_start + lo, hi - lo, geom.Ah, geom.C)

    ranges = _split(int(trials), _resolve_workers(workers))
    if not ranges:
        return np.empty((0, geom.thetas.size), dtype=complex)
    if len(ranges) == 1:
        return run(ranges[0])
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        return np.concatenate(list(pool.map(run, ranges)), axis=0)


def statistics_from_noise(geom: McGeometry, v: np.ndarray, reflectivity: complex, noise_power: float) -> np.ndarray:
    """Fixed-angle GLRT statistics ``|z|^2 / (L^2 sigma_n^2 M g)``; 0 where the angle is nulled."""
    if not noise_power > 0:
        raise InvalidInputError("noise_power must be positive")
    g = np.where(geom.usable, geom.g, 1.0)
    z = complex(reflectivity) * geom.M * geom.L * g + math.sqrt(2.0 * geom.L * noise_power) * v
    stat = (z.real**2 + z.imag**2) / (geom.L**2 * noise_power * geom.M * g)
    return np.where(geom.usable, stat, 0.0)


def monte_carlo_statistics(thetas, reflectivity: complex, noise_power: float, Xt, cfg: ArrayConfig,
                           trials: int, seed: int, workers: int | None = 1,
                           trial_start: int = 0) -> np.ndarray:
    """Simulated fixed-angle GLRT statistics, shape ``(trials, len(thetas))``."""
    if not noise_power > 0:
        raise InvalidInputError("noise_power must be positive")
    geom = mc_geometry(thetas, Xt, cfg)
    v = monte_carlo_noise(geom, trials, seed, workers, trial_start)
    return statistics_from_noise(geom, v, reflectivity, noise_power)


def monte_carlo_pd_sweep(thetas, reflectivity: complex, noise_power: float, Xt, cfg: ArrayConfig,
                         p_fa: float, trials: int, seed: int, workers: int | None = 1) -> np.ndarray:
    """Empirical detection fraction per angle against the fixed-angle threshold."""
    delta = central_chi2_2_inv_cdf(1.0 - p_fa)
    stats = monte_carlo_statistics(thetas, reflectivity, noise_power, Xt, cfg, trials, seed, workers)
    return np.count_nonzero(stats > delta, axis=0) / float(trials)


def monte_carlo_pd(params: DetectionParams, Xt, cfg: ArrayConfig, trials: int, seed: int,
                   workers: int | None = 1) -> float:
    """Detection fraction of the simulated fixed-angle GLRT at ``params.target_angle``."""
    if trials < MIN_MC_TRIALS:
        raise InvalidInputError(f"monte_carlo_pd needs at least {MIN_MC_TRIALS} trials, got {trials}")
    return float(monte_carlo_pd_sweep([params.target_angle], params.reflectivity, params.noise_power, Xt,
                                      cfg, params.false_alarm, trials, seed, workers)[0])


@dataclass(frozen=True)
class DetectionCurve:
    """P_d versus angle (degrees) or SNR (dB); ``pd_mc`` is NaN when not simulated."""

    abscissa_name: str
    abscissa: np.ndarray
    pd_analytic: np.ndarray
    pd_mc: np.ndarray

    def rows(self):
        return zip(self.abscissa, self.pd_analytic, self.pd_mc)
