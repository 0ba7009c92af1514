# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_kernels_py``.

Signatures and results match the pure-Python module exactly (up to
floating-point summation order inside a single accumulator, which is kept
identical).
"""
import numpy as np

from libc.math cimport exp, sqrt, M_PI, pow


def hermite_functions(int nmax, x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t nx = xv.shape[0]
    out = np.empty((nmax + 1, nx))
    cdef double[:, ::1] o = out
    cdef double c0 = pow(M_PI, -0.25)
    cdef double xi
    cdef Py_ssize_t i
    cdef int n
    for i in range(nx):
        xi = xv[i]
        o[0, i] = c0 * exp(-0.5 * xi * xi)
        if nmax >= 1:
            o[1, i] = sqrt(2.0) * xi * o[0, i]
        for n in range(1, nmax):
            o[n + 1, i] = sqrt(2.0 / (n + 1)) * xi * o[n, i] - sqrt(n / (n + 1.0)) * o[n - 1, i]
    return out


cdef void _hermite_polys(int nmax, double x, double* h) noexcept nogil:
    cdef int n
    h[0] = 1.0
    if nmax >= 1:
        h[1] = 2.0 * x
    for n in range(1, nmax):
        h[n + 1] = 2.0 * x * h[n] - 2.0 * n * h[n - 1]


def hermite_polys(int nmax, double x):
    out = np.empty(nmax + 1)
    cdef double[::1] o = out
    _hermite_polys(nmax, x, &o[0])
    return out


def eq6_sums(int a_max, int nb_max, double x, double p):
    cdef int top = a_max + nb_max
    cdef int cmax = a_max if a_max > nb_max else nb_max
    hx_arr = np.empty(top + 1)
    hp_arr = np.empty(top + 1)
    cdef double[::1] hx = hx_arr
    cdef double[::1] hp = hp_arr
    _hermite_polys(top, x, &hx[0])
    _hermite_polys(top, p, &hp[0])

    # Pascal triangle as floats, exact up to C(52, 26) < 2**53
    binom_arr = np.zeros((cmax + 1, cmax + 1))
    cdef double[:, ::1] binom = binom_arr
    cdef int r, c
    for r in range(cmax + 1):
        binom[r, 0] = 1.0
        for c in range(1, r + 1):
            binom[r, c] = binom[r - 1, c - 1] + (binom[r - 1, c] if c <= r - 1 else 0.0)

    out = np.zeros((a_max + 1, nb_max + 1), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef double complex ipow[4]
    ipow[0] = 1.0
    ipow[1] = 1.0j
    ipow[2] = -1.0
    ipow[3] = -1.0j
    cdef int a, nb, j, jb
    cdef double complex acc
    for a in range(a_max + 1):
        for nb in range(nb_max + 1):
            acc = 0.0
            for j in range(a + 1):
                for jb in range(nb + 1):
                    acc = acc + (binom[a, j] * binom[nb, jb]) * ipow[(2 * jb + 3 * nb) % 4] * hx[j + jb] * hp[a + nb - j - jb]
            o[a, nb] = acc
    return out


def scatter_two_mode(amp_in):
    cdef double complex[:, :, :, ::1] amp = np.ascontiguousarray(amp_in, dtype=np.complex128)
    cdef Py_ssize_t ns = amp.shape[0]
    cdef int d = amp.shape[1]
    out = np.zeros((ns, d * d, d * d), dtype=np.complex128)
    cdef double complex[:, :, ::1] rho = out
    cdef Py_ssize_t s
    cdef int n, m, k, kmax
    for s in range(ns):
        for n in range(d):
            for m in range(d):
                kmax = n if n < m else m
                for k in range(kmax + 1):
                    rho[s, (n - k) * d + n, (m - k) * d + m] += amp[s, n, m, k]
    return out
