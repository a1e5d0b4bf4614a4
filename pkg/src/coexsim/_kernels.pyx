# cython: language_level=3
"""Compiled hot kernels: steering-vector quadratic forms and the GLRT noise projection.

Signatures and semantics match ``_kernels_py``.  The Monte Carlo loop runs
without the GIL so callers can split trial ranges across threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, log, M_PI
from libc.stdint cimport uint64_t
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _trial_key(uint64_t seed, uint64_t trial) noexcept nogil:
    return _mix64(_mix64(seed) + (trial + 1) * GOLDEN)


cdef inline double _uniform(uint64_t key, uint64_t j) noexcept nogil:
    return <double>(_mix64(key + (j + 1) * GOLDEN) >> 11) * (1.0 / 9007199254740992.0)


cdef void _fill_noise_t(uint64_t key, Py_ssize_t M, Py_ssize_t L,
                        double complex[:, ::1] Wt) noexcept nogil:
    # Wt[n, m] holds noise entry (m, n); stream index of that entry is m*L + n
    cdef Py_ssize_t m, n
    cdef uint64_t k
    cdef double u1, u2, r, ang
    for m in range(M):
        for n in range(L):
            k = <uint64_t>(m * L + n)
            u1 = 1.0 - _uniform(key, 2 * k)
            u2 = _uniform(key, 2 * k + 1)
            r = sqrt(-2.0 * log(u1)) * sqrt(0.5)
            ang = 2.0 * M_PI * u2
            Wt[n, m] = r * cos(ang) + 1j * (r * sin(ang))


def noise_block(seed, trial, Py_ssize_t M, Py_ssize_t L):
    cdef uint64_t key = _trial_key(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF),
                                   <uint64_t>int(trial))
    Wt = np.empty((L, M), dtype=np.complex128)
    cdef double complex[:, ::1] wv = Wt
    with nogil:
        _fill_noise_t(key, M, L, wv)
    return np.ascontiguousarray(Wt.T)


def steering_forms(R, double spacing, thetas_deg, double theta_d_deg):
    # With a_k = exp(-j k psi), every form is a short trigonometric sum:
    #   a^H R^T a   = sum_d exp(j d psi) t_d,  t_d = sum_{i-j=d} R[j, i]
    #   a^H v       = sum_i exp(j i psi) v_i,  v = R^T a_D
    #   a^H a_D     = sum_i exp(j i (psi - psi_D))
    # so each angle costs O(M) after an O(M^2) setup.
    cdef double complex[:, ::1] Rv = np.ascontiguousarray(R, dtype=np.complex128)
    cdef double[::1] th = np.ascontiguousarray(np.atleast_1d(thetas_deg), dtype=np.float64)
    cdef Py_ssize_t M = Rv.shape[0]
    cdef Py_ssize_t T = th.shape[0]
    cross = np.empty(T, dtype=np.complex128)
    selfq = np.empty(T, dtype=np.float64)
    arr = np.empty(T, dtype=np.complex128)
    cdef double complex[::1] cv = cross
    cdef double[::1] sv = selfq
    cdef double complex[::1] av = arr
    cdef double complex[::1] ad = np.empty(M, dtype=np.complex128)
    cdef double complex[::1] v = np.empty(M, dtype=np.complex128)
    cdef double complex[::1] tpos = np.zeros(M, dtype=np.complex128)
    cdef double complex[::1] tneg = np.zeros(M, dtype=np.complex128)
    cdef double complex[::1] pw = np.empty(M, dtype=np.complex128)
    cdef Py_ssize_t t, i, j
    cdef double ph, psi, psi_d
    cdef double complex acc, accs, acca
    with nogil:
        psi_d = 2.0 * M_PI * spacing * sin(theta_d_deg * M_PI / 180.0)
        for i in range(M):
            ph = -psi_d * i
            ad[i] = cos(ph) + 1j * sin(ph)
        for i in range(M):
            acc = 0
            for j in range(M):
                acc = acc + Rv[j, i] * ad[j]
            v[i] = acc
            # R^T[i, j] = R[j, i] with lag d = i - j
            for j in range(M):
                if i >= j:
                    tpos[i - j] = tpos[i - j] + Rv[j, i]
                else:
                    tneg[j - i] = tneg[j - i] + Rv[j, i]
        for t in range(T):
            psi = 2.0 * M_PI * spacing * sin(th[t] * M_PI / 180.0)
            acc = 0
            accs = tpos[0]
            for i in range(M):
                ph = psi * i
                pw[i] = cos(ph) + 1j * sin(ph)
                acc = acc + pw[i] * v[i]
            for i in range(1, M):
                accs = accs + pw[i] * tpos[i] + pw[i].conjugate() * tneg[i]
            acca = 0
            for i in range(M):
                ph = (psi - psi_d) * i
                acca = acca + (cos(ph) + 1j * sin(ph))
            cv[t] = acc
            sv[t] = accs.real
            av[t] = acca
    return cross, selfq, arr


def glrt_noise(seed, trial_start, n_trials, Ah, C):
    cdef double complex[:, ::1] Ahv = np.ascontiguousarray(Ah, dtype=np.complex128)
    cdef double complex[:, ::1] Cv = np.ascontiguousarray(C, dtype=np.complex128)
    cdef int T = Ahv.shape[0]
    cdef int M = Ahv.shape[1]
    cdef int L = Cv.shape[1]
    cdef Py_ssize_t n_tr = int(n_trials)
    cdef uint64_t seed_u = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t start = <uint64_t>int(trial_start)
    out = np.empty((n_tr, T), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    cdef double complex[:, ::1] Wt = np.empty((L, M), dtype=np.complex128)
    cdef double complex[:, ::1] U = np.empty((T, L), dtype=np.complex128)
    cdef Py_ssize_t tr, th, n
    cdef double complex z
    cdef double complex one = 1.0, zero = 0.0
    cdef char transa = b'T', transb = b'N'
    if T == 0 or n_tr == 0:
        return out
    with nogil:
        for tr in range(n_tr):
            _fill_noise_t(_trial_key(seed_u, start + <uint64_t>tr), M, L, Wt)
            # U = Ah W (T x L).  In column-major terms U^T = Wt Ah^T, where the
            # row-major buffers Wt (L x M) and Ah (T x M) read as Wt^T and Ah^T.
            zgemm(&transa, &transb, &L, &T, &M, &one, &Wt[0, 0], &M, &Ahv[0, 0], &M,
                  &zero, &U[0, 0], &L)
            for th in range(T):
                z = 0
                for n in range(L):
                    z = z + U[th, n] * Cv[th, n]
                ov[tr, th] = z
    return out
