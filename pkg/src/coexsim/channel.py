"""Radar-to-base-station interference channel.

A path contributes the rank-one term
``a sqrt(N M) exp(-j 2 pi d / lam) e_N(cos phi_N) e_M(cos phi_M)^H``; the
multipath channel is the sum over paths.  The element-wise route
(:func:`pairwise_distance` / :func:`element_gain`) builds the same matrix
one gain at a time and serves as a cross-check.

Carrier phases are evaluated from ``fmod(d, lam)``, which is exact in IEEE
arithmetic, so kilometre-scale distances do not cost phase accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError
from .geometry import ArrayConfig, spatial_signature


@dataclass(frozen=True)
class PathSpec:
    """One propagation path.

    Parameters
    ----------
    attenuation : float
        Real path amplitude ``a > 0``, shared by all antenna pairs.
    base_distance : float
        Distance in metres from radar element 1 to BS element 1.
    radar_angle, bs_angle : float
        Incidence angles in degrees from the respective array axis, in (0, 180).
    """

    attenuation: float
    base_distance: float
    radar_angle: float
    bs_angle: float

    def __post_init__(self) -> None:
        for name in ("attenuation", "base_distance"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise InvalidInputError(f"path {name} must be positive, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("radar_angle", "bs_angle"):
            value = float(getattr(self, name))
            if not (0.0 < value < 180.0):
                raise InvalidInputError(f"path {name} must lie in (0, 180) degrees, got {value!r}")
            object.__setattr__(self, name, value)

    def scaled(self, c: float) -> "PathSpec":
        """Copy with the attenuation multiplied by ``c``."""
        return PathSpec(self.attenuation * c, self.base_distance, self.radar_angle, self.bs_angle)


def _wavelength(radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> float:
    if radar_cfg.carrier_wavelength != bs_cfg.carrier_wavelength:
        raise InvalidInputError("radar and BS arrays must share one carrier wavelength")
    return radar_cfg.carrier_wavelength


def _carrier_phasor(distance: float, wavelength: float) -> complex:
    return complex(np.exp(-2j * np.pi * (math.fmod(distance, wavelength) / wavelength)))


def _check_indices(i: int, k: int, radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> None:
    if not (1 <= i <= bs_cfg.num_elements):
        raise InvalidInputError(f"BS index {i} outside 1..{bs_cfg.num_elements}")
    if not (1 <= k <= radar_cfg.num_elements):
        raise InvalidInputError(f"radar index {k} outside 1..{radar_cfg.num_elements}")


def _offset_wavelengths(path: PathSpec, i: int, k: int, radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> float:
    # (d_ik - d) / lam
    return ((i - 1) * bs_cfg.normalized_spacing * math.cos(math.radians(path.bs_angle))
            - (k - 1) * radar_cfg.normalized_spacing * math.cos(math.radians(path.radar_angle)))


def pairwise_distance(path: PathSpec, i: int, k: int, radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> float:
    """First-order distance from radar element ``k`` to BS element ``i`` (1-based), in metres."""
    _check_indices(i, k, radar_cfg, bs_cfg)
    lam = _wavelength(radar_cfg, bs_cfg)
    return path.base_distance + _offset_wavelengths(path, i, k, radar_cfg, bs_cfg) * lam


def element_gain(path: PathSpec, i: int, k: int, radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> complex:
    """Baseband gain ``a exp(-j 2 pi d_ik / lam)`` between radar element ``k`` and BS element ``i``."""
    _check_indices(i, k, radar_cfg, bs_cfg)
    lam = _wavelength(radar_cfg, bs_cfg)
    offset = _offset_wavelengths(path, i, k, radar_cfg, bs_cfg)
    return path.attenuation * _carrier_phasor(path.base_distance, lam) * complex(np.exp(-2j * np.pi * offset))


def los_channel(path: PathSpec, radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> np.ndarray:
    """Rank-one ``N x M`` channel of a single path."""
    lam = _wavelength(radar_cfg, bs_cfg)
    N, M = bs_cfg.num_elements, radar_cfg.num_elements
    e_n = spatial_signature(N, bs_cfg.normalized_spacing, math.cos(math.radians(path.bs_angle)))
    e_m = spatial_signature(M, radar_cfg.normalized_spacing, math.cos(math.radians(path.radar_angle)))
    coef = path.attenuation * math.sqrt(N * M) * _carrier_phasor(path.base_distance, lam)
    return coef * np.outer(e_n, e_m.conj())


def multipath_channel(paths: Iterable[PathSpec], radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> np.ndarray:
    """Sum of :func:`los_channel` terms over ``paths``."""
    paths = list(paths)
    if not paths:
        raise InvalidInputError("multipath_channel needs at least one path")
    H = np.zeros((bs_cfg.num_elements, radar_cfg.num_elements), dtype=complex)
    for p in paths:
        H += los_channel(p, radar_cfg, bs_cfg)
    return H


def elementwise_channel(paths: Sequence[PathSpec], radar_cfg: ArrayConfig, bs_cfg: ArrayConfig) -> np.ndarray:
    """Channel assembled entry by entry from :func:`element_gain` (slow reference)."""
    N, M = bs_cfg.num_elements, radar_cfg.num_elements
    H = np.zeros((N, M), dtype=complex)
    for p in paths:
        for i in range(1, N + 1):
            for k in range(1, M + 1):
                H[i - 1, k - 1] += element_gain(p, i, k, radar_cfg, bs_cfg)
    return H
