"""Teleportation of a coherent state through a two-mode light resource.

Mode 1 of the resource is mixed with the input ``|beta>`` on a balanced
beam splitter; one output port is measured in position and the other in
momentum. Two independent constructions of the conditional mode-2 operator
are provided:

* :func:`bs_projection_oracle` builds the beam-splitter unitary on each
  photon-number block as a matrix exponential, applies it to
  ``|beta> (x) |a>`` and projects the ports on quadrature eigenstates.
* :func:`bell_state_eq6` evaluates the closed-form Hermite-polynomial
  expansion term by term from the conditional-state coefficients.

Which beam-splitter phases and port assignment the closed form corresponds
to is a convention; :class:`BellMeasurement` makes it explicit and
:func:`diagnose_eq6` reports how the two constructions compare.
"""
from dataclasses import dataclass
from math import comb, factorial, pi, sqrt

import numpy as np
from scipy.linalg import expm, logm

from .dynamics import joint_coefficients, reduced_light_state
from .entanglement import tmsv_state
from .errors import OptoDistillError, QuadratureNotConverged, SeriesNotConverged
from .fock_core import TwoModeDensityMatrix, coherent_amplitudes, coherent_cutoff, fock_wavefunctions, hermite_poly
from .kernels import eq6_sums
from .measurement import _pdf_from_labels, conditional_state, overlap_matrix
from .quadrature import integrate

BETA_TAIL_TOL = 1e-12
MAX_BETA_CUTOFF = 120


@dataclass(frozen=True)
class BellMeasurement:
    """Beam-splitter mode matrix plus which port is measured in which quadrature.

    ``mode_matrix[j, k]`` maps input ``k`` (0 = coherent input, 1 = resource
    mode 1) to output port ``j``: ``b_j = sum_k M[j, k] a_k``. Port
    ``x_port`` is projected on ``<x|n> = psi_n(x)``, the other port on
    ``<p|n> = p_phase^n psi_n(p)``.
    """

    name: str
    mode_matrix: tuple
    x_port: int
    p_phase: complex

    @property
    def matrix(self):
        return np.array(self.mode_matrix, dtype=complex)


_S = 1.0 / sqrt(2.0)

# Measures x_in - x_1 and p_in + p_1: unit-gain teleportation for the
# squeezed vacuum sum_n lam^n |n, n>, corrected by D(x + i p).
DIFFERENCE_PORT_X = BellMeasurement(
    "difference_port_x", ((_S, _S), (_S, -_S)), x_port=1, p_phase=-1j
)
# Sum port in x, difference port in p with <p|n> = i^n psi_n(p). With the
# same correction the momentum record enters with the wrong sign, so the
# output tracks conj(beta) and the fidelity falls below 1/2.
SUM_PORT_X = BellMeasurement("sum_port_x", ((_S, _S), (_S, -_S)), x_port=0, p_phase=1j)
# Symmetric splitter a_in^dag -> (i c^dag + d^dag)/sqrt2, a_1^dag -> (c^dag + i d^dag)/sqrt2
# with x on c: the phase pattern reproduced by the closed-form expansion.
SYMMETRIC_PHASE = BellMeasurement(
    "symmetric_phase", ((1j * _S, _S), (_S, 1j * _S)), x_port=0, p_phase=-1j
)

CONVENTIONS = {c.name: c for c in (DIFFERENCE_PORT_X, SUM_PORT_X, SYMMETRIC_PHASE)}


def beta_cutoff(beta, tol=BETA_TAIL_TOL):
    """Smallest ``N`` with ``|beta|^(2N) / N! < tol``."""
    n = coherent_cutoff(beta, tol=tol, n_cap=MAX_BETA_CUTOFF + 1)
    if n > MAX_BETA_CUTOFF:
        raise SeriesNotConverged(f"|beta| = {abs(complex(beta)):.3f} needs more than {MAX_BETA_CUTOFF} terms")
    return n


def _block_generator(k, n_tot):
    # second-quantized K in the block |s, N - s>, s photons in port 0
    dim = n_tot + 1
    g = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        r = n_tot - s
        g[s, s] = k[0, 0] * s + k[1, 1] * r
        if r > 0:
            g[s + 1, s] += k[0, 1] * sqrt((s + 1) * r)
        if s > 0:
            g[s - 1, s] += k[1, 0] * sqrt(s * (r + 1))
    return g


def beam_splitter_blocks(mode_matrix, n_tot_max):
    """Fock representation ``U_N[s_out, s_in]`` of a two-mode linear unitary for ``N <= n_tot_max``."""
    m = np.asarray(mode_matrix, dtype=complex)
    k = logm(m)
    return [expm(_block_generator(k, n)) for n in range(n_tot_max + 1)]


def projection_tensor(beta, n_max, convention=DIFFERENCE_PORT_X, n_beta=None):
    """``W[a, s0, s1] = <s0, s1| U |beta>|a>`` on the output ports."""
    n_beta = beta_cutoff(beta) if n_beta is None else n_beta
    n_tot = n_max + n_beta
    blocks = beam_splitter_blocks(convention.matrix, n_tot)
    amp = coherent_amplitudes(beta, n_beta)
    w = np.zeros((n_max + 1, n_tot + 1, n_tot + 1), dtype=complex)
    for a in range(n_max + 1):
        for nb in range(n_beta + 1):
            big = nb + a
            col = blocks[big][:, nb] * amp[nb]
            s0 = np.arange(big + 1)
            w[a, s0, big - s0] += col
    return w


def _port_vectors(w, convention, x_bar, p_bar):
    """``V[a, i] = <x_i, p_i| U |beta, a>`` for paired arrays of outcomes."""
    n_tot = w.shape[1] - 1
    x_bar = np.atleast_1d(np.asarray(x_bar, dtype=float))
    p_bar = np.atleast_1d(np.asarray(p_bar, dtype=float))
    phase = convention.p_phase ** np.arange(n_tot + 1)
    chi_x = fock_wavefunctions(n_tot, x_bar)
    chi_p = fock_wavefunctions(n_tot, p_bar) * phase[:, None]
    if convention.x_port == 0:
        return np.einsum("ars,ri,si->ai", w, chi_x, chi_p)
    return np.einsum("ars,ri,si->ai", w, chi_p, chi_x)


def _resource_tensor(resource):
    if isinstance(resource, TwoModeDensityMatrix):
        return resource.tensor()
    m = np.asarray(resource)
    d = int(round(sqrt(m.shape[0])))
    return m.reshape(d, d, d, d)


def bs_projection_oracle(resource, beta, x_bar, p_bar, convention=DIFFERENCE_PORT_X):
    """Unnormalized mode-2 operator after the joint quadrature measurement.

    Its trace is the outcome density ``p(x_bar, p_bar)`` for a normalized
    resource.
    """
    rt = _resource_tensor(resource)
    n_max = rt.shape[0] - 1
    w = projection_tensor(beta, n_max, convention)
    v = _port_vectors(w, convention, [x_bar], [p_bar])[:, 0]
    return np.einsum("a,abcd,c->bd", v, rt, v.conj())


@dataclass(frozen=True)
class BellCoefficient:
    n_minus_k: int
    j: int
    n_prime: int
    j_prime: int
    value: complex


_I_POW = (1.0, 1j, -1.0, -1j)


def bell_coefficient(n_minus_k, j, n_prime, j_prime, x_bar, p_bar):
    """Single term ``C(a, j) C(n', j') i^(2j' - n') H_{j+j'}(x) H_{a+n'-j-j'}(p)`` of the expansion."""
    a = n_minus_k
    if not (0 <= j <= a and 0 <= j_prime <= n_prime):
        raise ValueError("binomial indices out of range")
    hx = hermite_poly(j + j_prime, x_bar)
    hp = hermite_poly(a + n_prime - j - j_prime, p_bar)
    val = comb(a, j) * comb(n_prime, j_prime) * _I_POW[(2 * j_prime - n_prime) % 4] * hx * hp
    return BellCoefficient(a, j, n_prime, j_prime, complex(val))


def bell_state_eq6(params, q, beta, x_bar, p_bar, coeffs=None):
    """Closed-form Hermite expansion of the teleported mode-2 operator.

    ``|1-lam^2| e^{-(x^2+p^2)-|beta|^2} / (pi p(q) sqrt(2 pi delta_q^2))
    sum_{n,m} C_nm e^{-D_nm} I_nm / 2^{n+m} sum_{n',m'} beta^n' conj(beta)^m' / (2^{n'+m'} n'! m'!)
    sum_k G_nm^k 4^k / sqrt((n-k)! (m-k)!) sum_{j,j'} D(n-k, j, n', j') sum_{l,l'} conj(D(m-k, l, m', l')) |n><m|``
    with ``D(a, j, n', j') = C(a, j) C(n', j') i^(2j' - n') H_{j+j'}(x) H_{a+n'-j-j'}(p)``.
    """
    coeffs = coeffs or joint_coefficients(params)
    d = params.dim
    beta = complex(beta)
    n_beta = beta_cutoff(beta)
    pq = _pdf_from_labels(params, coeffs.phi, q)
    s = eq6_sums(params.n_max, n_beta, float(x_bar), float(p_bar))
    nb = np.arange(n_beta + 1)
    inv_fact = np.array([1.0 / factorial(k) for k in range(n_beta + 1)])
    beta_w = beta ** nb * inv_fact / 2.0 ** nb
    t = s @ beta_w  # t[a] = sum_n' beta^n' / (2^n' n'!) S[a, n']

    ov = overlap_matrix(coeffs.phi, q, params.delta_q)
    amp = coeffs.branch_amplitudes(ov) * coeffs.weight / (sqrt(2.0 * pi * params.delta_q ** 2) * pq)
    pref = np.exp(-(x_bar ** 2 + p_bar ** 2) - abs(beta) ** 2) / pi
    out = np.zeros((d, d), dtype=complex)
    for n in range(d):
        for m in range(d):
            acc = 0j
            for k in range(min(n, m) + 1):
                acc += (
                    amp[n, m, k]
                    * 4.0 ** k
                    / sqrt(factorial(n - k) * factorial(m - k))
                    * t[n - k]
                    * np.conj(t[m - k])
                )
            out[n, m] = acc / 2.0 ** (n + m)
    return pref * out


def teleport_fidelity(state, beta, x_bar, p_bar, gain=1.0):
    """``<beta| D(gamma) rho D(gamma)^dag |beta> = <beta - gamma|rho|beta - gamma>``, ``gamma = gain (x + i p)``.

    ``state`` is a normalized single-mode matrix.
    """
    rho = np.asarray(state)
    gamma = gain * complex(x_bar, p_bar)
    w = coherent_amplitudes(complex(beta) - gamma, rho.shape[0] - 1)
    return float(np.real(np.vdot(w, rho @ w)))


@dataclass(frozen=True)
class TeleportationOutcome:
    x_bar: float
    p_bar: float
    beta: complex
    joint_pdf: float
    output_state: np.ndarray
    fidelity: float


def teleport(resource, beta, x_bar, p_bar, convention=DIFFERENCE_PORT_X, gain=1.0):
    """Single-outcome teleportation record (oracle construction)."""
    out = bs_projection_oracle(resource, beta, x_bar, p_bar, convention)
    pdf = float(np.real(np.trace(out)))
    state = out / pdf
    return TeleportationOutcome(
        x_bar=float(x_bar),
        p_bar=float(p_bar),
        beta=complex(beta),
        joint_pdf=pdf,
        output_state=state,
        fidelity=teleport_fidelity(state, beta, x_bar, p_bar, gain),
    )


@dataclass(frozen=True)
class TeleportationIntegrals:
    fidelity: float
    mass: float
    error: float
    domain: tuple


def _outcome_domain(rt, beta, convention, half_width):
    d = rt.shape[0]
    rho1 = np.einsum("abcb->ac", rt)
    lower = np.diag(np.sqrt(np.arange(1, d)), 1)  # annihilation operator
    mean_a1 = complex(np.trace(rho1 @ lower))
    mean_n1 = float(np.real(np.trace(rho1 @ lower.T @ lower)))
    m = convention.matrix
    means = m @ np.array([complex(beta), mean_a1])
    px = 1 - convention.x_port
    cx = sqrt(2.0) * means[convention.x_port].real
    # <p|n> = (-i)^n psi_n(p) is the ordinary momentum; +i flips its sign
    sign = 1.0 if convention.p_phase == -1j else -1.0
    cp = sign * sqrt(2.0) * means[px].imag
    sigma = sqrt(0.5 * (1.0 + mean_n1) + 0.25)
    hw = half_width * sigma
    return (cx - hw, cx + hw), (cp - hw, cp + hw)


def teleportation_integrals(
    resource, beta, convention=DIFFERENCE_PORT_X, gain=1.0, half_width=6.0, rtol=1e-5
):
    """Outcome-averaged fidelity and total outcome probability.

    ``<F> = int f(x, p) p(x, p) dx dp`` by nested adaptive Gauss-Kronrod
    quadrature (outer ``x``, inner ``p``) over a box auto-sized from the
    resource's mode-1 mean amplitude and photon number.
    """
    rt = _resource_tensor(resource)
    n_max = rt.shape[0] - 1
    beta = complex(beta)
    w = projection_tensor(beta, n_max, convention)
    (x_lo, x_hi), (p_lo, p_hi) = _outcome_domain(rt, beta, convention, half_width)
    n_tot = w.shape[1] - 1
    phase = convention.p_phase ** np.arange(n_tot + 1)
    x_slot_first = convention.x_port == 0
    inner_rtol = rtol * 0.1

    def inner(x):
        chi_x = fock_wavefunctions(n_tot, [x])[:, 0]
        if x_slot_first:
            wx = np.einsum("ars,r->as", w, chi_x)
        else:
            wx = np.einsum("ars,s->ar", w, chi_x)

        def f(ps):
            chi_p = fock_wavefunctions(n_tot, ps) * phase[:, None]
            v = wx @ chi_p  # (a, nodes)
            out2 = np.einsum("ai,abcd,ci->ibd", v, rt, v.conj())
            gam = gain * (x + 1j * ps)
            amps = np.array([coherent_amplitudes(beta - g, n_max) for g in gam])
            fp = np.real(np.einsum("ib,ibd,id->i", amps.conj(), out2, amps))
            pp = np.real(np.einsum("ibb->i", out2))
            return np.stack([fp, pp], axis=1)

        return integrate(f, p_lo, p_hi, rtol=inner_rtol, atol=1e-13, initial_panels=4).value

    def outer(xs):
        return np.array([inner(x) for x in xs])

    try:
        res = integrate(outer, x_lo, x_hi, rtol=rtol, atol=1e-12, initial_panels=4)
    except QuadratureNotConverged:
        raise
    fid, mass = float(res.value[0]), float(res.value[1])
    return TeleportationIntegrals(fidelity=fid, mass=mass, error=res.error, domain=((x_lo, x_hi), (p_lo, p_hi)))


def average_fidelity(params, q, beta, convention=DIFFERENCE_PORT_X, gain=1.0, half_width=6.0, rtol=1e-5):
    """Average teleportation fidelity with the state distilled at outcome ``q``."""
    resource = conditional_state(params, q).conditional_state
    return teleportation_integrals(resource, beta, convention, gain, half_width, rtol).fidelity


def baseline_resource(params, baseline="tmsv"):
    """Undistilled comparison state: the pristine squeezed vacuum, or the
    injected-and-damped state with the mirror traced out (``"unmeasured"``)."""
    if baseline == "tmsv":
        return tmsv_state(params.lam, params.n_max)
    if baseline == "unmeasured":
        return reduced_light_state(params).normalized()
    raise ValueError(f"unknown baseline {baseline!r}")


@dataclass(frozen=True)
class FidelityMapRow:
    beta_mag: float
    beta_phase: float
    f_d: float
    f_0: float
    ratio: float
    status: str = "ok"

    FIELDS = ("beta_mag", "beta_phase", "f_d", "f_0", "ratio", "status")

    def as_tuple(self):
        return tuple(getattr(self, f) for f in self.FIELDS)


def fidelity_ratio_map(
    params,
    q,
    beta_magnitudes,
    beta_phases,
    baseline="tmsv",
    convention=DIFFERENCE_PORT_X,
    gain=1.0,
    half_width=6.0,
    rtol=1e-5,
):
    """``<F_D> / <F_0>`` over a polar grid of input amplitudes, magnitude-major."""
    mags, phases = list(beta_magnitudes), list(beta_phases)
    if not mags or not phases:
        raise ValueError("beta grids must be non-empty")
    distilled = conditional_state(params, q).conditional_state
    base = baseline_resource(params, baseline)
    rows = []
    for r in mags:
        for ph in phases:
            beta = r * np.exp(1j * ph)
            try:
                fd = teleportation_integrals(distilled, beta, convention, gain, half_width, rtol).fidelity
                f0 = teleportation_integrals(base, beta, convention, gain, half_width, rtol).fidelity
                rows.append(FidelityMapRow(float(r), float(ph), fd, f0, fd / f0))
            except OptoDistillError as exc:
                nan = float("nan")
                rows.append(FidelityMapRow(float(r), float(ph), nan, nan, nan, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass(frozen=True)
class Eq6Diagnosis:
    convention: str
    max_rel_deviation: float
    first_differing: tuple | None
    points: int


def diagnose_eq6(params, q, beta, x_values, p_values, conventions=None, rtol=1e-6):
    """Compare the closed-form expansion with the oracle on an outcome grid.

    For each convention reports the largest deviation relative to the
    largest oracle entry at that point, and the first ``(x, p, n, m)``
    whose deviation exceeds ``rtol``.
    """
    conventions = conventions or list(CONVENTIONS.values())
    coeffs = joint_coefficients(params)
    resource = conditional_state(params, q, coeffs).conditional_state
    closed = {
        (x, p): bell_state_eq6(params, q, beta, x, p, coeffs) for x in x_values for p in p_values
    }
    reports = []
    for conv in conventions:
        worst = 0.0
        first = None
        for (x, p), c in closed.items():
            o = bs_projection_oracle(resource, beta, x, p, conv)
            scale = np.max(np.abs(o))
            dev = np.abs(c - o) / scale if scale > 0 else np.abs(c - o)
            worst = max(worst, float(np.max(dev)))
            if first is None and np.max(dev) > rtol:
                n, m = np.unravel_index(int(np.argmax(dev)), dev.shape)
                first = (float(x), float(p), int(n), int(m))
        reports.append(Eq6Diagnosis(conv.name, worst, first, len(closed)))
    return reports
