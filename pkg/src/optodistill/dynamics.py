"""Analytic evolution of the squeezed light mode coupled to a damped mirror.

The joint state after the interaction is stored as coefficient arrays
(phase weights, decoherence exponents, injection-loss weights and the
mechanical coherent labels). The mechanical mode itself is never put on a
Fock grid; it lives as coherent labels with analytic overlaps.
"""
import cmath
from dataclasses import dataclass, field, replace
from math import acos, cos, exp, lgamma, pi, sin, sqrt

import numpy as np

from .errors import QuadratureNotConverged, TruncationError
from .fock_core import TwoModeDensityMatrix, coherent_overlap
from .kernels import scatter_two_mode
from .quadrature import integrate

LABEL_VARIANTS = ("printed", "post_loss")


@dataclass(frozen=True)
class ProtocolParams:
    """Dimensionless protocol parameters and numerical cutoffs.

    lam : squeezing weight ``tanh(s)``, in ``[0, 1)``.
    g : scaled radiation-pressure coupling.
    kappa : scaled mechanical energy damping rate.
    theta : injection beam-splitter angle, reflectivity ``cos(theta / 2)``.
    t : scaled interaction time (time multiplied by the mechanical frequency).
    alpha : initial coherent amplitude of the mirror.
    delta_q : resolution of the position measurement.
    n_max : Fock cutoff per photonic mode.
    label_variant : ``"printed"`` attaches the mechanical label of the
        photon number before injection loss; ``"post_loss"`` uses the
        number that actually entered the cavity (diagnostic only).
    """

    lam: float = 0.3
    g: float = 0.2
    kappa: float = 0.01
    theta: float = field(default_factory=lambda: 2.0 * acos(0.1))
    t: float = pi
    alpha: complex = 0j
    delta_q: float = 0.11
    n_max: int = 12
    truncation_tol: float = 1e-8
    label_variant: str = "printed"

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam}")
        if self.g < 0 or self.kappa < 0 or self.t < 0:
            raise ValueError("g, kappa and t must be non-negative")
        if not 0.0 <= self.theta <= pi + 1e-15:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not self.delta_q > 0:
            raise ValueError("delta_q must be positive")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be an integer >= 1")
        if self.label_variant not in LABEL_VARIANTS:
            raise ValueError(f"label_variant must be one of {LABEL_VARIANTS}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "n_max", int(self.n_max))

    @classmethod
    def fig2(cls, **overrides):
        """Parameter set of the distillation scans (r = 0.1, t = pi, lam = 0.3)."""
        return cls(**overrides)

    @classmethod
    def fig3(cls, **overrides):
        """Teleportation map parameters: alpha = 2 e^{i pi/4}, lam = 0.3, g = 0.2."""
        base = dict(alpha=2.0 * cmath.exp(0.25j * pi), lam=0.3, g=0.2)
        base.update(overrides)
        return cls(**base)

    @property
    def reflectivity(self):
        return cos(self.theta / 2.0)

    @property
    def squeezing(self):
        return float(np.arctanh(self.lam))

    @property
    def dim(self):
        return self.n_max + 1

    @property
    def tail_weight(self):
        """Squeezing weight beyond the cutoff, ``lam^(2 (n_max + 1))``."""
        return self.lam ** (2 * (self.n_max + 1))

    def check_truncation(self):
        if self.tail_weight >= self.truncation_tol:
            raise TruncationError(
                f"tail weight {self.tail_weight:.3e} at n_max={self.n_max} exceeds "
                f"{self.truncation_tol:.1e}; raise n_max"
            )

    def replace(self, **changes):
        return replace(self, **changes)


def _rate(kappa):
    return 1j + 0.5 * kappa


def mech_displacement(params, n):
    """Coherent label ``phi_n`` of the mirror after the interaction.

    ``phi_n = i g n (1 - e^{-(i + kappa/2) t}) / (i + kappa/2) + alpha e^{-(i + kappa/2) t}``
    """
    z = _rate(params.kappa)
    decay = cmath.exp(-z * params.t)
    return 1j * params.g * n * (1.0 - decay) / z + params.alpha * decay


def mech_labels(params):
    return np.array([mech_displacement(params, n) for n in range(params.dim)])


def _label_parts(params, n):
    # phi_n(t') = A_n + B_n exp(-z t')
    z = _rate(params.kappa)
    a = 1j * params.g * n / z
    return a, params.alpha - a


def _cexpm1(z):
    x, y = z.real, z.imag
    # exp(x + iy) - 1 without cancellation for small |z|
    return complex(
        np.expm1(x) * cos(y) - 2.0 * sin(0.5 * y) ** 2,
        exp(x) * sin(y),
    )


def _exp_integral(w, t):
    """``int_0^t exp(-w s) ds`` with the ``w -> 0`` limit handled."""
    w = complex(w)
    if w == 0:
        return complex(t)
    return -_cexpm1(-w * t) / w


def _cross_integral(params, u, v):
    """``int_0^t phi_u(s) conj(phi_v(s)) ds`` in closed form."""
    z = _rate(params.kappa)
    t = params.t
    au, bu = _label_parts(params, u)
    av, bv = _label_parts(params, v)
    return (
        au * av.conjugate() * t
        + au * bv.conjugate() * _exp_integral(z.conjugate(), t)
        + bu * av.conjugate() * _exp_integral(z, t)
        + bu * bv.conjugate() * _exp_integral(complex(params.kappa), t)
    )


def decoherence_exponent(params, n, m):
    """Decoherence exponent ``D_nm`` multiplying ``|phi_n><phi_m|`` as ``e^{-D_nm}``.

    ``D_nm = (kappa/2) int_0^t (|phi_n|^2 + |phi_m|^2 - 2 phi_n conj(phi_m)) dt'``,
    evaluated from the antiderivative of the exponential sum. ``Re D_nm``
    equals ``(kappa/2) int |phi_n - phi_m|^2 >= 0``.
    """
    if n == m or params.kappa == 0.0:
        return 0j
    jnn = _cross_integral(params, n, n)
    jmm = _cross_integral(params, m, m)
    jnm = _cross_integral(params, n, m)
    d = 0.5 * params.kappa * (jnn + jmm - 2.0 * jnm)
    scale = 0.5 * params.kappa * (abs(jnn) + abs(jmm))
    assert d.real >= -1e-13 * max(scale, 1e-300), f"Re D_{n}{m} = {d.real} < 0"
    return d


def decoherence_exponent_quad(params, n, m, rtol=1e-10, atol=1e-14):
    """Adaptive-quadrature evaluation of the same integral (test oracle)."""
    z = _rate(params.kappa)
    g, alpha = params.g, params.alpha

    def phi(n_, s):
        decay = np.exp(-z * s)
        return 1j * g * n_ * (1.0 - decay) / z + alpha * decay

    def integrand(s):
        pn, pm = phi(n, s), phi(m, s)
        return np.abs(pn) ** 2 + np.abs(pm) ** 2 - 2.0 * pn * np.conj(pm)

    res = integrate(integrand, 0.0, params.t, rtol=rtol, atol=atol)
    if not np.isfinite(res.value):
        raise QuadratureNotConverged("non-finite integral")
    return complex(0.5 * params.kappa * res.value)


def loss_weight(theta, n, m, k):
    """Injection-loss weight ``G_nm^k``; ``k`` photons lost from both branches.

    ``sqrt(C(n,k) C(m,k)) cos^{2k}(theta/2) sin^{n-k}(theta/2) sin^{m-k}(theta/2)``
    with the binomials taken through log-gamma.
    """
    if k < 0 or k > min(n, m):
        raise IndexError(f"k={k} outside 0..min({n}, {m})")
    log_binom = 0.5 * (
        lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)
        + lgamma(m + 1) - lgamma(k + 1) - lgamma(m - k + 1)
    )
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    return exp(log_binom) * c ** (2 * k) * s ** (n - k) * s ** (m - k)


def phase_weight(params, n, m):
    """Unimodular part of ``C_nm``: ``e^{i g^2 (t - sin t)(n^2 - m^2)} e^{i g Im[alpha eta](n - m)}``."""
    t, g = params.t, params.g
    eta = 1.0 - cmath.exp(-1j * t)
    im_ae = (params.alpha * eta).imag
    return cmath.exp(1j * g * g * (t - sin(t)) * (n * n - m * m) + 1j * g * im_ae * (n - m))


@dataclass(frozen=True)
class JointStateCoefficients:
    """Coefficient arrays of the joint light-mirror state after evolution.

    The represented operator is
    ``weight * sum_{n,m} C[n,m] e^{-D[n,m]} sum_k G[n,m,k] |n-k,n><m-k,m| (x) |phi_n><phi_m|``.
    """

    params: ProtocolParams
    weight: float
    lam_pow: np.ndarray
    phase: np.ndarray
    D: np.ndarray
    G: np.ndarray
    phi: np.ndarray

    @property
    def C(self):
        return self.lam_pow * self.phase

    def label_index(self, n, k):
        """Photon index whose mechanical label the ``k``-loss branch of ``n`` carries."""
        return n - k if self.params.label_variant == "post_loss" else n

    def branch_amplitudes(self, overlaps):
        """Coefficient ``[n, m, k]`` of ``|n-k,n><m-k,m|`` given mechanical overlaps.

        ``overlaps[..., u, v]`` must hold the mechanical factor paired with
        labels ``phi_u`` (ket) and ``phi_v`` (bra); a leading stack axis is
        allowed. The global ``weight`` is not included.
        """
        d = self.params.dim
        ov = np.asarray(overlaps)
        if self.params.label_variant == "printed":
            core = self.C * np.exp(-self.D)
            return (core * ov)[..., :, :, None] * self.G
        n = np.arange(d)[:, None, None]
        m = np.arange(d)[None, :, None]
        k = np.arange(d)[None, None, :]
        valid = k <= np.minimum(n, m)
        u = np.where(valid, n - k, 0)
        v = np.where(valid, m - k, 0)
        core = self.lam_pow[:, :, None] * self.phase[u, v] * np.exp(-self.D[u, v])
        return core * ov[..., u, v] * self.G * valid

    def two_mode_operator(self, overlaps, scale=1.0):
        """Dense two-photon-mode matrices for one or a stack of overlap arrays."""
        ov = np.asarray(overlaps)
        stacked = ov.ndim == 3
        amp = self.branch_amplitudes(ov if stacked else ov[None]) * (self.weight * scale)
        rho = scatter_two_mode(amp)
        return rho if stacked else rho[0]


def joint_coefficients(params):
    """Evaluate every coefficient for photon numbers up to ``n_max``."""
    params.check_truncation()
    d = params.dim
    idx = np.arange(d)
    lam_pow = params.lam ** (idx[:, None] + idx[None, :]).astype(float)
    phase = np.array([[phase_weight(params, n, m) for m in range(d)] for n in range(d)])
    D = np.zeros((d, d), dtype=complex)
    for n in range(d):
        for m in range(n + 1, d):
            D[n, m] = decoherence_exponent(params, n, m)
            D[m, n] = D[n, m].conjugate()
    G = np.zeros((d, d, d))
    for n in range(d):
        for m in range(d):
            for k in range(min(n, m) + 1):
                G[n, m, k] = loss_weight(params.theta, n, m, k)
    return JointStateCoefficients(
        params=params,
        weight=abs(1.0 - params.lam ** 2),
        lam_pow=lam_pow,
        phase=phase,
        D=D,
        G=G,
        phi=mech_labels(params),
    )


def mechanical_overlaps(coeffs):
    """``<phi_v|phi_u>`` arranged as ``[u, v]`` (the unmeasured mirror trace)."""
    phi = coeffs.phi
    d = phi.size
    return np.array([[coherent_overlap(phi[v], phi[u]) for v in range(d)] for u in range(d)])


def reduced_light_state(params, coeffs=None):
    """Two-mode light state with the mirror traced out (no measurement)."""
    coeffs = coeffs or joint_coefficients(params)
    rho = coeffs.two_mode_operator(mechanical_overlaps(coeffs))
    return TwoModeDensityMatrix(rho, params.n_max, raw_trace=complex(np.trace(rho)))


def ideal_evolution_oracle(lam, g, alpha, t, n_max):
    """Undamped, lossless evolution as ``(n, amplitude, label)`` triples.

    ``sqrt(1 - lam^2) lam^n |n>|alpha> -> ... e^{i g^2 n^2 (t - sin t)} e^{i g n Im[alpha eta]} |n>|alpha e^{-it} + g n eta>``
    """
    alpha = complex(alpha)
    eta = 1.0 - cmath.exp(-1j * t)
    norm = sqrt(1.0 - lam * lam)
    out = []
    for n in range(n_max + 1):
        amp = norm * lam ** n * cmath.exp(1j * g * g * n * n * (t - sin(t))) * cmath.exp(
            1j * g * n * (alpha * eta).imag
        )
        out.append((n, amp, alpha * cmath.exp(-1j * t) + g * n * eta))
    return out
