from math import pi, sqrt

import numpy as np
import pytest

from optodistill.dynamics import ProtocolParams, joint_coefficients
from optodistill.entanglement import tmsv_state
from optodistill.errors import SeriesNotConverged
from optodistill.fock_core import TwoModeDensityMatrix, coherent_amplitudes, fock_wavefunction
from optodistill.measurement import conditional_state
from optodistill.teleportation import (
    DIFFERENCE_PORT_X,
    CONVENTIONS,
    SUM_PORT_X,
    SYMMETRIC_PHASE,
    average_fidelity,
    beam_splitter_blocks,
    bell_coefficient,
    bell_state_eq6,
    beta_cutoff,
    bs_projection_oracle,
    diagnose_eq6,
    fidelity_ratio_map,
    teleport,
    teleport_fidelity,
    teleportation_integrals,
)

ORACLE_POINT = ProtocolParams(g=0.2, lam=0.3, kappa=0.01, theta=pi, n_max=10)


def _vacuum(n_max=4):
    return tmsv_state(0.0, n_max)


@pytest.mark.parametrize("conv", list(CONVENTIONS.values()), ids=list(CONVENTIONS))
def test_beam_splitter_blocks_unitary(conv):
    for u in beam_splitter_blocks(conv.matrix, 14):
        assert np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) < 1e-10


def test_single_photon_block_is_mode_matrix():
    # |1,0> (photon in port 0) goes to M[0,0]|1,0> + M[1,0]|0,1>
    m = DIFFERENCE_PORT_X.matrix
    u1 = beam_splitter_blocks(m, 1)[1]
    assert u1[1, 1] == pytest.approx(m[0, 0], abs=1e-14)
    assert u1[0, 1] == pytest.approx(m[1, 0], abs=1e-14)


def test_vacuum_chain_has_gaussian_outcome_weight():
    x, p = 0.4, -0.7
    out = bs_projection_oracle(_vacuum(), 0.0, x, p)
    assert out[0, 0].real == pytest.approx((fock_wavefunction(0, x) * fock_wavefunction(0, p)) ** 2, rel=1e-12)
    assert np.sum(np.abs(out)) == pytest.approx(abs(out[0, 0]), rel=1e-14)


@pytest.mark.parametrize("beta", [0.0, 1.2 - 0.5j, 2.0j])
def test_outcome_mass_is_one(beta):
    res = teleportation_integrals(tmsv_state(0.3, 8), beta)
    assert abs(res.mass - 1.0) < 1e-6


def test_beta_cutoff_and_guard():
    from math import factorial

    n = beta_cutoff(2.0)
    assert 4.0**n / factorial(n) < 1e-12 <= 4.0 ** (n - 1) / factorial(n - 1)
    assert beta_cutoff(0.0) == 0
    with pytest.raises(SeriesNotConverged):
        beta_cutoff(30.0)


def test_fidelity_examples():
    d = 41
    x, p = 0.2, -0.4
    beta = 0.9 + 0.3j
    v = coherent_amplitudes(beta - complex(x, p), d - 1)
    assert teleport_fidelity(np.outer(v, v.conj()), beta, x, p) == pytest.approx(1.0, abs=1e-9)
    w = coherent_amplitudes(beta - complex(x, p) + (1 + 1j), d - 1)
    rho = np.outer(w, w.conj())
    assert teleport_fidelity(rho, beta, x, p) == pytest.approx(np.exp(-2.0), rel=1e-9)
    mixed = np.eye(13) / 13
    assert teleport_fidelity(mixed, complex(x, p), x, p) == pytest.approx(1 / 13, abs=1e-6)
    # global phase on the output ket
    ket = np.exp(0.8j) * w
    assert teleport_fidelity(np.outer(ket, ket.conj()), beta, x, p) == pytest.approx(
        teleport_fidelity(rho, beta, x, p), abs=1e-15
    )


def test_teleport_outcome_invariants(fig3):
    res = conditional_state(fig3, 0.0).conditional_state
    out = teleport(res, 0.7 + 0.2j, 0.5, -0.3)
    s = out.output_state
    assert np.allclose(s, s.conj().T, atol=1e-14)
    assert np.trace(s).real == pytest.approx(1.0, abs=1e-13)
    assert np.min(np.linalg.eigvalsh(s)) > -1e-9
    assert 0.0 <= out.fidelity <= 1.0 + 1e-9 and out.joint_pdf > 0


def test_classical_benchmark_vacuum_resource():
    p = ProtocolParams(lam=0.0, g=0.0, kappa=0.0, theta=pi)
    assert abs(average_fidelity(p, 0.0, 1.0) - 0.5) < 0.01


def test_tmsv_chain_fidelity():
    p = ProtocolParams(lam=0.3, g=0.0, kappa=0.0, theta=pi)
    chain = average_fidelity(p, 0.0, 1.0)
    direct = teleportation_integrals(tmsv_state(0.3, 12), 1.0).fidelity
    assert abs(chain - direct) < 1e-4
    assert chain > 0.5
    assert chain == pytest.approx((1 + 0.3) / 2, abs=1e-4)


def test_bell_coefficient_term():
    c = bell_coefficient(2, 1, 1, 0, 0.3, -0.2)
    # C(2,1) C(1,0) i^{-1} H_1(0.3) H_2(-0.2)
    assert c.value == pytest.approx(2 * (-1j) * 0.6 * (4 * 0.04 - 2), rel=1e-14)
    with pytest.raises(ValueError):
        bell_coefficient(2, 3, 1, 0, 0.0, 0.0)


def test_eq6_beta_zero_and_hermiticity():
    p = ORACLE_POINT
    out0 = bell_state_eq6(p, 0.0, 0.0, 0.3, -0.2)
    assert np.allclose(out0, out0.conj().T, atol=1e-10 * np.max(np.abs(out0)))
    out = bell_state_eq6(p, 0.4, 0.5 - 0.3j, -0.6, 0.9)
    assert np.allclose(out, out.conj().T, atol=1e-10 * np.max(np.abs(out)))
    assert np.trace(out).real > 0 and abs(np.trace(out).imag) < 1e-12 * np.trace(out).real


def test_eq6_matches_symmetric_phase_oracle():
    p = ORACLE_POINT
    res = conditional_state(p, 0.0).conditional_state
    eq6 = bell_state_eq6(p, 0.0, 0.5, 0.3, -0.2)
    orc = bs_projection_oracle(res, 0.5, 0.3, -0.2, SYMMETRIC_PHASE)
    assert np.max(np.abs(eq6 - orc)) / np.max(np.abs(orc)) < 1e-6


def test_diagnose_eq6_report():
    xs = np.linspace(-2, 2, 5)
    reports = {r.convention: r for r in diagnose_eq6(ORACLE_POINT, 0.0, 0.5, xs, xs)}
    assert reports["symmetric_phase"].max_rel_deviation < 1e-6
    assert reports["symmetric_phase"].first_differing is None
    # the teleporting convention differs from the closed form by O(1)
    bk = reports["difference_port_x"]
    assert bk.max_rel_deviation > 0.1 and bk.first_differing is not None
    assert reports["difference_port_x"].points == 25


def test_sum_port_convention_rotates_output():
    # x on the sum port and <p|n> = i^n psi_n(p): the output follows conj(beta)
    r = tmsv_state(0.3, 10)
    f_bk = teleportation_integrals(r, 1j, DIFFERENCE_PORT_X).fidelity
    f_real = teleportation_integrals(r, 1.0, SUM_PORT_X).fidelity
    f_imag = teleportation_integrals(r, 1j, SUM_PORT_X).fidelity
    assert f_bk == pytest.approx(0.65, abs=1e-4)
    assert f_real < 0.5 and f_imag < 0.05


@pytest.mark.slow
def test_domain_width_insensitivity(fig3):
    res = conditional_state(fig3, 0.0).conditional_state
    a = teleportation_integrals(res, 1.0 + 0.5j, half_width=5.0).fidelity
    b = teleportation_integrals(res, 1.0 + 0.5j, half_width=7.0).fidelity
    assert abs(a - b) < 1e-5


def test_ratio_map_rows_and_periodicity():
    p = ProtocolParams.fig3(n_max=8, lam=0.1)
    rows = fidelity_ratio_map(p, 0.0, [0.0, 1.0], [0.3, 0.3 + 2 * pi])
    assert [(r.beta_mag, r.beta_phase) for r in rows] == [(0.0, 0.3), (0.0, 0.3 + 2 * pi), (1.0, 0.3), (1.0, 0.3 + 2 * pi)]
    assert all(r.status == "ok" and np.isfinite(r.ratio) for r in rows)
    assert rows[2].ratio == pytest.approx(rows[3].ratio, rel=1e-6)
    with pytest.raises(ValueError):
        fidelity_ratio_map(p, 0.0, [], [0.0])


def test_ratio_map_unmeasured_baseline():
    p = ProtocolParams.fig3(n_max=8, lam=0.1)
    row = fidelity_ratio_map(p, 0.0, [0.5], [0.0], baseline="unmeasured")[0]
    assert row.status == "ok" and 0 < row.f_0 < 1
    with pytest.raises(ValueError):
        fidelity_ratio_map(p, 0.0, [0.5], [0.0], baseline="other")


def test_fig3_fidelity_frozen(fig3):
    # unit-gain fidelity with the distilled state; independent of beta (see notes)
    assert average_fidelity(fig3, 0.0, 1.0) == pytest.approx(0.37545371226060253, abs=2e-6)
