"""Pure-numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` function for function and are used whenever the
compiled extension is unavailable (or ``COEXSIM_BACKEND=python``).  Both
backends draw noise from the same counter-based stream, so trial ``t`` of a
given seed sees the same noise block no matter how trials are partitioned.
Results agree with the compiled kernels to rounding error, not bit-for-bit:
transcendental functions and reduction order differ between libm loops and
numpy's vectorised paths.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

# trials per vectorised chunk; memory grows as chunk * T * L
_CHUNK = 64


def _mix64(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * _MIX2
    return z ^ (z >> np.uint64(31))


def trial_keys(seed, trials):
    """Per-trial stream keys: ``mix64(mix64(seed) + (t + 1) * GOLDEN)``."""
    base = _mix64(np.array([int(seed) & _MASK64], dtype=np.uint64))[0]
    t = np.asarray(trials, dtype=np.uint64)
    return _mix64(base + (t + np.uint64(1)) * GOLDEN)


def _unit_noise(keys, M, L):
    """Unit-variance circular complex Gaussian blocks, shape (len(keys), M, L)."""
    n_pairs = M * L
    j = np.arange(2 * n_pairs, dtype=np.uint64)
    bits = _mix64(keys[:, None] + (j[None, :] + np.uint64(1)) * GOLDEN)
    u = (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53
    u1 = 1.0 - u[:, 0::2]
    u2 = u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1)) * np.sqrt(0.5)
    ang = 2.0 * np.pi * u2
    w = r * np.cos(ang) + 1j * (r * np.sin(ang))
    return w.reshape(len(keys), M, L)


def noise_block(seed, trial, M, L):
    keys = trial_keys(seed, [trial])
    return _unit_noise(keys, int(M), int(L))[0]


def steering_forms(R, spacing, thetas_deg, theta_d_deg):
    R = np.ascontiguousarray(R, dtype=np.complex128)
    M = R.shape[0]
    thetas = np.atleast_1d(np.asarray(thetas_deg, dtype=np.float64))
    k = np.arange(M)
    A = np.exp(-2j * np.pi * spacing * np.outer(np.sin(np.deg2rad(thetas)), k))
    a_d = np.exp(-2j * np.pi * spacing * k * np.sin(np.deg2rad(theta_d_deg)))
    Rt = R.T
    cross = A.conj() @ (Rt @ a_d)
    selfq = np.einsum("ti,ti->t", A.conj(), A @ Rt.T).real
    array = A.conj() @ a_d
    return cross, selfq, array


def glrt_noise(seed, trial_start, n_trials, Ah, C):
    Ah = np.ascontiguousarray(Ah, dtype=np.complex128)
    C = np.ascontiguousarray(C, dtype=np.complex128)
    T, M = Ah.shape
    L = C.shape[1]
    out = np.empty((int(n_trials), T), dtype=np.complex128)
    for lo in range(0, int(n_trials), _CHUNK):
        hi = min(lo + _CHUNK, int(n_trials))
        keys = trial_keys(seed, np.arange(trial_start + lo, trial_start + hi))
        W = _unit_noise(keys, M, L)
        # one (T, M) @ (M, L) product per trial keeps shapes, and so rounding,
        # independent of the chunk size
        U = np.matmul(Ah[None, :, :], W)
        out[lo:hi] = np.sum(U * C[None, :, :], axis=2)
    return out
