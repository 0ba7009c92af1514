"""Pure-Python reference implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; ``optodistill.kernels``
picks whichever is available. All functions take and return numpy arrays.
"""
from math import comb, pi, sqrt

import numpy as np

_PI_QUARTER = pi ** -0.25
# i**k for k mod 4, exact
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def hermite_functions(nmax, x):
    """Normalized oscillator eigenfunctions psi_0..psi_nmax at the points ``x``.

    Returns an array of shape ``(nmax + 1, len(x))``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    out = np.empty((nmax + 1, x.size))
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = sqrt(2.0 / (n + 1)) * x * out[n] - sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def hermite_polys(nmax, x):
    """Physicists' Hermite polynomials H_0..H_nmax at a scalar ``x``."""
    h = np.empty(nmax + 1)
    h[0] = 1.0
    if nmax >= 1:
        h[1] = 2.0 * x
    for n in range(1, nmax):
        h[n + 1] = 2.0 * x * h[n] - 2.0 * n * h[n - 1]
    return h


def eq6_sums(a_max, nb_max, x, p):
    """Double Hermite sums of the joint-quadrature projection.

    ``S[a, n'] = sum_{j<=a} sum_{j'<=n'} C(a, j) C(n', j') i^(2j' - n')
    H_{j+j'}(x) H_{a+n'-j-j'}(p)``. Shape ``(a_max + 1, nb_max + 1)``.
    """
    top = a_max + nb_max
    hx = hermite_polys(top, x).tolist()
    hp = hermite_polys(top, p).tolist()
    out = np.zeros((a_max + 1, nb_max + 1), dtype=complex)
    for a in range(a_max + 1):
        ca = [comb(a, j) for j in range(a + 1)]
        for nb in range(nb_max + 1):
            cb = [comb(nb, jb) for jb in range(nb + 1)]
            acc = 0.0j
            for j in range(a + 1):
                for jb in range(nb + 1):
                    phase = _I_POW[(2 * jb - nb) % 4]
                    acc += ca[j] * cb[jb] * phase * hx[j + jb] * hp[a + nb - j - jb]
            out[a, nb] = acc
    return out


def scatter_two_mode(amp):
    """Scatter ``amp[s, n, m, k]`` onto ``rho[s, (n-k, n), (m-k, m)]``.

    ``amp`` has shape ``(ns, d, d, d)``; entries with ``k > min(n, m)`` are
    ignored. Returns ``(ns, d*d, d*d)`` complex matrices, mode-1 index major.
    """
    amp = np.asarray(amp, dtype=complex)
    ns, d = amp.shape[0], amp.shape[1]
    rho = np.zeros((ns, d * d, d * d), dtype=complex)
    for n in range(d):
        for m in range(d):
            for k in range(min(n, m) + 1):
                rho[:, (n - k) * d + n, (m - k) * d + m] += amp[:, n, m, k]
    return rho
