"""Unsharp position measurement of the mirror.

The POVM element for outcome ``q`` is a Gaussian-blurred position projector
``(2 pi delta_q^2)^(-1/2) int exp(-(q - y)^2 / (2 delta_q^2)) |y><y| dy``,
normalized so that the elements integrate to the identity.
"""
from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .dynamics import joint_coefficients
from .errors import DegenerateOutcome
from .fock_core import TwoModeDensityMatrix, coherent_wavefunction
from .quadrature import integrate

DEGENERATE_TRACE = 1e-300


def _overlap_closed_form(phi_n, phi_m, q, delta_q):
    # Product of the two label Gaussians with the measurement window,
    # completed to one Gaussian in x before integrating.
    phi_n = np.asarray(phi_n, dtype=complex)
    phi_m = np.asarray(phi_m, dtype=complex)
    q = np.asarray(q, dtype=float)
    an, am = sqrt(2.0) * phi_n.real, sqrt(2.0) * phi_m.real
    db = sqrt(2.0) * (phi_n.imag - phi_m.imag)
    da = an - am
    abar = 0.5 * (an + am)
    w = 1.0 / (2.0 * delta_q ** 2)
    a_tot = 1.0 + w
    mu = (abar + w * q) / a_tot
    twist = phi_n.real * phi_n.imag - phi_m.real * phi_m.imag
    expo = (
        -0.25 * da ** 2
        - (abar - q) ** 2 / (1.0 + 2.0 * delta_q ** 2)
        - db ** 2 / (4.0 * a_tot)
        + 1j * (mu * db - twist)
    )
    return np.exp(expo) / np.sqrt(a_tot)


def povm_overlap(params, q, n, m, labels=None):
    """``I_nm = int psi_{phi_n}(x) conj(psi_{phi_m}(x)) exp(-(q - x)^2 / (2 delta_q^2)) dx``."""
    phi = labels if labels is not None else joint_coefficients(params).phi
    return complex(_overlap_closed_form(phi[n], phi[m], q, params.delta_q))


def povm_overlap_quad(phi_n, phi_m, q, delta_q, rtol=1e-12, atol=1e-15):
    """Direct quadrature of the same integral over the real line (test oracle)."""
    center = 0.5 * sqrt(2.0) * (complex(phi_n).real + complex(phi_m).real)
    lo = min(center, q) - 12.0 - 12.0 * delta_q
    hi = max(center, q) + 12.0 + 12.0 * delta_q

    def f(x):
        return (
            coherent_wavefunction(phi_n, x)
            * np.conj(coherent_wavefunction(phi_m, x))
            * np.exp(-((q - x) ** 2) / (2.0 * delta_q ** 2))
        )

    return complex(integrate(f, lo, hi, rtol=rtol, atol=atol, initial_panels=16).value)


def overlap_matrix(labels, q, delta_q):
    """``I[u, v]`` for all label pairs; ``q`` may be an array (leading axis)."""
    labels = np.asarray(labels, dtype=complex)
    q = np.asarray(q, dtype=float)
    return _overlap_closed_form(
        labels[:, None], labels[None, :], q[..., None, None], delta_q
    )


def outcome_pdf(params, q):
    """Probability density of outcome ``q``: a lam^2-weighted Gaussian mixture."""
    coeffs = joint_coefficients(params)
    return _pdf_from_labels(params, coeffs.phi, q)


def _pdf_from_labels(params, labels, q):
    q = np.asarray(q, dtype=float)
    width = 1.0 + 2.0 * params.delta_q ** 2
    centers = sqrt(2.0) * labels.real
    weights = params.lam ** (2 * np.arange(labels.size))
    dens = np.sum(
        weights * np.exp(-((q[..., None] - centers) ** 2) / width), axis=-1
    )
    val = abs(1.0 - params.lam ** 2) / sqrt(pi * width) * dens
    return float(val) if val.ndim == 0 else val


def pdf_support(params, n_sigma=4.0):
    """``mean -/+ n_sigma * std`` of the outcome distribution."""
    coeffs = joint_coefficients(params)
    centers = sqrt(2.0) * coeffs.phi.real
    w = params.lam ** (2 * np.arange(centers.size))
    w = w / w.sum()
    mean = float(np.sum(w * centers))
    var = 0.5 * (1.0 + 2.0 * params.delta_q ** 2) + float(np.sum(w * (centers - mean) ** 2))
    std = sqrt(var)
    return mean - n_sigma * std, mean + n_sigma * std


@dataclass(frozen=True)
class MeasurementRecord:
    q: float
    pdf: float
    conditional_state: TwoModeDensityMatrix
    raw_trace: float


def conditional_states(params, qs, coeffs=None):
    """Unnormalized conditional two-mode matrices for an array of outcomes.

    Returns ``(rho, traces)`` with ``rho`` of shape ``(len(qs), d*d, d*d)``.
    """
    coeffs = coeffs or joint_coefficients(params)
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    ov = overlap_matrix(coeffs.phi, qs, params.delta_q)
    rho = coeffs.two_mode_operator(ov, scale=1.0 / sqrt(2.0 * pi * params.delta_q ** 2))
    traces = np.real(np.trace(rho, axis1=1, axis2=2))
    return rho, traces


def conditional_state(params, q, coeffs=None):
    """Normalized light state conditioned on mirror outcome ``q``.

    Raises :class:`DegenerateOutcome` if the unnormalized trace underflows.
    With ``label_variant="post_loss"`` the outcome density is the trace of
    the conditional operator, since the mixture formula no longer applies.
    """
    coeffs = coeffs or joint_coefficients(params)
    rho, traces = conditional_states(params, [q], coeffs)
    raw = float(traces[0])
    if not raw > DEGENERATE_TRACE:
        raise DegenerateOutcome(f"conditional trace {raw:.3e} at q={q}")
    if params.label_variant == "printed":
        pdf = _pdf_from_labels(params, coeffs.phi, q)
    else:
        pdf = raw
    state = TwoModeDensityMatrix(rho[0] / raw, params.n_max, raw_trace=raw)
    return MeasurementRecord(q=float(q), pdf=float(pdf), conditional_state=state, raw_trace=raw)
