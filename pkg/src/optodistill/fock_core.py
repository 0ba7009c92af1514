"""Truncated Fock-space primitives.

Hermite polynomials and oscillator eigenfunctions, coherent states in the
position and number representations, a checked Hermitian eigensolver and
the two-mode density-matrix container with its partial transpose.

Conventions
-----------
Quadratures are dimensionless with ``x = (a + a^dag) / sqrt(2)``, so the
vacuum wavefunction is ``pi^(-1/4) exp(-x^2 / 2)``. Coherent states are
``|xi> = D(xi)|0>`` and their wavefunction is centred at ``sqrt(2) Re xi``.
Two-mode matrices are indexed ``(n1, n2) -> n1 * d + n2`` with
``d = n_max + 1``.
"""
from dataclasses import dataclass
from math import lgamma, pi, sqrt

import numpy as np

from . import kernels
from .errors import NotHermitian

HERMITIAN_RTOL = 1e-12


def hermite_poly(n, x):
    """Physicists' Hermite polynomial ``H_n(x)`` by three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return float(kernels.hermite_polys(n, float(x))[n])


def fock_wavefunctions(n_max, x):
    """Table ``psi_n(x)`` for ``n = 0..n_max``; shape ``(n_max + 1, len(x))``."""
    return kernels.hermite_functions(int(n_max), np.atleast_1d(np.asarray(x, dtype=float)))


def fock_wavefunction(n, x):
    """Oscillator eigenfunction ``psi_n(x)``.

    Uses the normalized recurrence, so ``2^n n!`` is never formed and the
    result stays finite for large ``n``.
    """
    scalar = np.ndim(x) == 0
    vals = fock_wavefunctions(n, x)[n]
    return float(vals[0]) if scalar else vals


def coherent_wavefunction(xi, x):
    """Position wavefunction ``<x|xi>`` of the coherent state ``D(xi)|0>``."""
    xi = complex(xi)
    x = np.asarray(x, dtype=float)
    re, im = xi.real, xi.imag
    val = pi ** -0.25 * np.exp(
        -0.5 * (x - sqrt(2.0) * re) ** 2 + 1j * sqrt(2.0) * im * x - 1j * re * im
    )
    return complex(val) if val.ndim == 0 else val


def coherent_amplitudes(xi, n_max):
    """Number-basis amplitudes ``<n|xi>`` for ``n = 0..n_max``."""
    xi = complex(xi)
    amp = np.empty(n_max + 1, dtype=complex)
    amp[0] = np.exp(-0.5 * abs(xi) ** 2)
    for n in range(1, n_max + 1):
        amp[n] = amp[n - 1] * xi / sqrt(n)
    return amp


def coherent_overlap(bra, ket):
    """``<bra|ket>`` for two coherent states."""
    bra, ket = complex(bra), complex(ket)
    return complex(np.exp(-0.5 * abs(bra) ** 2 - 0.5 * abs(ket) ** 2 + bra.conjugate() * ket))


def coherent_cutoff(xi, tol=1e-14, n_cap=400):
    """Smallest ``N`` with ``|xi|^(2N) / N! < tol``."""
    r2 = abs(complex(xi)) ** 2
    if r2 == 0.0:
        return 0
    log_tol = np.log(tol)
    for n in range(n_cap + 1):
        if n * np.log(r2) - lgamma(n + 1) < log_tol:
            return n
    return n_cap


def hermiticity_defect(m):
    """``max|M - M^dag| / max|M|`` (zero for the zero matrix)."""
    m = np.asarray(m)
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


def check_hermitian(m, rtol=HERMITIAN_RTOL):
    defect = hermiticity_defect(m)
    if not defect < rtol:
        raise NotHermitian(f"relative Hermiticity defect {defect:.3e} exceeds {rtol:.1e}")


def hermitian_eigenvalues(m, rtol=HERMITIAN_RTOL):
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises :class:`NotHermitian` when the input is not Hermitian to ``rtol``
    relative to its largest entry. LAPACK ``heevd`` does the work; only the
    eigenvalue-sum and residual contracts matter to callers.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    check_hermitian(m, rtol)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


@dataclass(frozen=True)
class TwoModeDensityMatrix:
    """Dense operator on two truncated photonic modes.

    ``matrix`` is ``(d*d, d*d)`` with ``d = n_max + 1``; ``raw_trace`` keeps
    the trace from before normalization (equal to the trace of ``matrix``
    for states that were never rescaled).
    """

    matrix: np.ndarray
    n_max: int
    raw_trace: complex = 1.0

    def __post_init__(self):
        d = self.n_max + 1
        if self.matrix.shape != (d * d, d * d):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match n_max={self.n_max}")

    @property
    def dim(self):
        return self.n_max + 1

    @property
    def trace(self):
        return complex(np.trace(self.matrix))

    def tensor(self):
        """View as ``rho[n1, n2, m1, m2]``."""
        d = self.dim
        return self.matrix.reshape(d, d, d, d)

    def normalized(self):
        tr = self.trace
        if tr.real <= 0.0:
            raise ValueError("cannot normalize a state with non-positive trace")
        return TwoModeDensityMatrix(self.matrix / tr.real, self.n_max, raw_trace=self.raw_trace)

    def is_hermitian(self, rtol=HERMITIAN_RTOL):
        return hermiticity_defect(self.matrix) < rtol

    def reduced(self, mode):
        """Partial trace keeping ``mode`` (1 or 2)."""
        t = self.tensor()
        if mode == 1:
            return np.einsum("abcb->ac", t)
        if mode == 2:
            return np.einsum("abad->bd", t)
        raise ValueError("mode must be 1 or 2")

    @classmethod
    def from_pure(cls, psi, n_max):
        """Projector onto a (not necessarily normalized) two-mode vector ``psi[n1, n2]``."""
        v = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()), n_max, raw_trace=complex(np.vdot(v, v)))

    @classmethod
    def product(cls, rho_a, rho_b):
        rho_a = np.asarray(rho_a, dtype=complex)
        rho_b = np.asarray(rho_b, dtype=complex)
        if rho_a.shape != rho_b.shape:
            raise ValueError("both factors must share the cutoff")
        n_max = rho_a.shape[0] - 1
        return cls(np.kron(rho_a, rho_b), n_max, raw_trace=complex(np.trace(rho_a) * np.trace(rho_b)))


def partial_transpose(rho):
    """Transpose on mode 1: ``<n1,n2|rho^T1|m1,m2> = <m1,n2|rho|n1,m2>``.

    Accepts a :class:`TwoModeDensityMatrix` or a raw ``(d*d, d*d)`` array
    (or a stack of them) and returns the same kind.
    """
    if isinstance(rho, TwoModeDensityMatrix):
        return TwoModeDensityMatrix(partial_transpose(rho.matrix), rho.n_max, raw_trace=rho.raw_trace)
    m = np.asarray(rho)
    d = int(round(sqrt(m.shape[-1])))
    lead = m.shape[:-2]
    t = m.reshape(lead + (d, d, d, d))
    t = np.swapaxes(t, -4, -2)
    return np.ascontiguousarray(t).reshape(lead + (d * d, d * d))
