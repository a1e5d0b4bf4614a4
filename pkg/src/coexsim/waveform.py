"""Orthogonal MIMO radar waveforms, coherence matrices and waveform projection."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

DEFAULT_NUM_SAMPLES = 128


def generate_orthogonal(M: int, L: int = DEFAULT_NUM_SAMPLES) -> np.ndarray:
    """Orthogonal ``M x L`` waveform block.

    Row ``m`` is the discrete complex exponential ``exp(j 2 pi m n / L)``,
    so ``X X^H / L`` is the identity whenever ``L >= M``.
    """
    if int(M) != M or int(L) != L or M < 1 or L < 1:
        raise InvalidInputError(f"M and L must be positive integers, got M={M!r}, L={L!r}")
    if L < M:
        raise InvalidInputError(f"orthogonal block needs L >= M, got L={L}, M={M}")
    m = np.arange(int(M))[:, None]
    n = np.arange(int(L))[None, :]
    # reduce m*n mod L before scaling so the phase stays exact for large blocks
    return np.exp(2j * np.pi * ((m * n) % int(L)) / L)


def coherence(X) -> np.ndarray:
    """Sample coherence matrix ``R = X X^H / L``, Hermitian by construction."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] < 1:
        raise InvalidInputError(f"waveform block must be a 2-D array with L >= 1, got shape {X.shape}")
    R = X @ X.conj().T / X.shape[1]
    return 0.5 * (R + R.conj().T)


def project_waveform(P, X) -> np.ndarray:
    """Apply a projector to every sample of a waveform block, ``X~ = P X``."""
    P = np.asarray(P)
    X = np.asarray(X)
    if P.ndim != 2 or X.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[1] != X.shape[0]:
        raise InvalidInputError(f"cannot apply projector of shape {P.shape} to block of shape {X.shape}")
    return P @ X
