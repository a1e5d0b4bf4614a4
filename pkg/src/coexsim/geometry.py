"""Uniform linear array geometry: spatial signatures and steering vectors.

Two angle conventions meet here.  Channel angles ``phi`` are incidence angles
measured from the array axis and enter through ``cos(phi)``.  Radar look
angles ``theta`` are measured from broadside and enter through ``sin(theta)``.
:func:`incidence_from_look` converts between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

DEFAULT_SPACING = 0.5
DEFAULT_WAVELENGTH = 0.0857  # metres, 3.5 GHz


@dataclass(frozen=True)
class ArrayConfig:
    """One uniform linear array.

    Parameters
    ----------
    num_elements : int
        Number of antennas (M for the radar, N for the base station).
    normalized_spacing : float
        Element spacing in wavelengths.
    carrier_wavelength : float
        Carrier wavelength in metres.
    """

    num_elements: int
    normalized_spacing: float = DEFAULT_SPACING
    carrier_wavelength: float = DEFAULT_WAVELENGTH

    def __post_init__(self) -> None:
        n = self.num_elements
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidInputError(f"num_elements must be a positive integer, got {n!r}")
        object.__setattr__(self, "num_elements", int(n))
        for name in ("normalized_spacing", "carrier_wavelength"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)


def _check_look_angle(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)) or np.any(np.abs(theta) > 90.0):
        raise InvalidInputError("look angle must lie in [-90, 90] degrees")
    return theta


def incidence_from_look(theta):
    """Incidence angle ``phi`` (degrees from the array axis) for look angle ``theta``.

    Uses ``phi = 90 + theta`` so that ``cos(phi) = -sin(theta)``.  With this
    sign a path arriving at the radar from look angle ``theta`` produces a
    channel whose rows are proportional to the transmit response
    ``a(theta)^T``, which is what places eigen-nulls at the path angles in the
    composite pattern.
    """
    return 90.0 + _check_look_angle(theta)


def look_from_incidence(phi):
    """Inverse of :func:`incidence_from_look`."""
    phi = np.asarray(phi, dtype=float)
    if not np.all((phi >= 0.0) & (phi <= 180.0)):
        raise InvalidInputError("incidence angle must lie in [0, 180] degrees")
    return phi - 90.0


def spatial_signature(l: int, spacing: float, omega: float) -> np.ndarray:
    """Unit-norm ULA spatial signature.

    Entry ``k`` (1-based) is ``exp(-j 2 pi (k-1) spacing omega) / sqrt(l)``.

    Parameters
    ----------
    l : int
        Number of elements.
    spacing : float
        Element spacing in wavelengths.
    omega : float
        Direction cosine, ``|omega| <= 1``.

    Returns
    -------
    numpy.ndarray
        Complex vector of length ``l``.
    """
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise InvalidInputError(f"signature length must be a positive integer, got {l!r}")
    if not np.isfinite(omega) or abs(omega) > 1.0:
        raise InvalidInputError(f"direction cosine must lie in [-1, 1], got {omega!r}")
    if not np.isfinite(spacing) or spacing <= 0:
        raise InvalidInputError(f"spacing must be positive, got {spacing!r}")
    k = np.arange(int(l))
    return np.exp(-2j * np.pi * k * spacing * omega) / np.sqrt(l)


def steering_vectors(cfg: ArrayConfig, thetas) -> np.ndarray:
    """Steering vectors for several look angles, one per row (shape ``(T, M)``)."""
    thetas = np.atleast_1d(_check_look_angle(thetas))
    k = np.arange(cfg.num_elements)
    s = np.sin(np.deg2rad(thetas))
    return np.exp(-2j * np.pi * cfg.normalized_spacing * np.outer(s, k))


def steering_vector(cfg: ArrayConfig, theta: float) -> np.ndarray:
    """Radar steering vector ``a(theta)`` with entries ``exp(-j 2 pi (k-1) spacing sin theta)``."""
    if np.ndim(theta) != 0:
        raise InvalidInputError("steering_vector takes a scalar angle; use steering_vectors")
    return steering_vectors(cfg, theta)[0]


def steering_matrix(cfg: ArrayConfig, theta: float) -> np.ndarray:
    """Monostatic transmit-receive matrix ``A(theta) = a(theta) a(theta)^T``."""
    a = steering_vector(cfg, theta)
    A = np.outer(a, a)
    # vectorised complex products can round a_i a_j and a_j a_i differently
    return 0.5 * (A + A.T)
