import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optodistill.dynamics import ProtocolParams
from optodistill.entanglement import (
    baseline_negativity,
    distillation_ratio,
    negativities,
    negativity,
    ratio_scan,
    success_probability,
    success_probability_detail,
    sweep,
    tmsv_negativity_closed_form,
    tmsv_state,
)
from optodistill.errors import ZeroBaseline
from optodistill.fock_core import TwoModeDensityMatrix, partial_transpose


def test_two_qubit_bell_state():
    psi = np.zeros((2, 2))
    psi[0, 0] = psi[1, 1] = 1 / np.sqrt(2)
    s = TwoModeDensityMatrix.from_pure(psi, 1)
    eig = np.linalg.eigvalsh(partial_transpose(s.matrix))
    assert np.allclose(eig, [-0.5, 0.5, 0.5, 0.5])
    assert negativity(s).value == pytest.approx(0.5, abs=1e-14)


def test_product_state_is_ppt():
    a, b = np.diag([0.7, 0.3, 0.0]), np.diag([0.1, 0.4, 0.5])
    assert negativity(TwoModeDensityMatrix.product(a, b)).value == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_separable_mixtures_are_ppt(seed):
    rng = np.random.default_rng(seed)
    d = 3
    rho = np.zeros((d * d, d * d), dtype=complex)
    for w in rng.dirichlet(np.ones(3)):
        va = rng.normal(size=d) + 1j * rng.normal(size=d)
        vb = rng.normal(size=d) + 1j * rng.normal(size=d)
        ra, rb = np.outer(va, va.conj()), np.outer(vb, vb.conj())
        rho += w * np.kron(ra / np.trace(ra), rb / np.trace(rb))
    rho = 0.5 * (rho + rho.conj().T)
    assert negativity(rho).value < 1e-10


def test_local_unitary_invariance(fig2):
    from optodistill.measurement import conditional_state

    rho = conditional_state(fig2, 1.5).conditional_state.matrix
    d = fig2.dim
    ph = np.exp(1j * np.random.default_rng(1).uniform(0, 2 * np.pi, d))
    u = np.kron(np.eye(d), np.diag(ph))
    assert abs(negativity(u @ rho @ u.conj().T).value - negativity(rho).value) < 1e-9


def test_baseline_three_sevenths():
    n0 = baseline_negativity(0.3, 12)
    assert abs(n0 - 3 / 7) < 1e-6
    assert n0 == pytest.approx(tmsv_negativity_closed_form(0.3, 12), abs=1e-12)
    for lam in (0.1, 0.2, 0.3):
        assert abs(baseline_negativity(lam, 14) - lam / (1 - lam)) < 1e-6
    # the n_max = 14 truncation alone moves lam = 0.4 by 2.5e-6
    assert abs(baseline_negativity(0.4, 14) - tmsv_negativity_closed_form(0.4, 14)) < 1e-12
    assert abs(baseline_negativity(0.4, 18) - 0.4 / 0.6) < 1e-6


def test_batched_matches_single(fig2):
    from optodistill.measurement import conditional_states

    rho, tr = conditional_states(fig2, [0.0, 1.5])
    batch = negativities(rho / tr[:, None, None])
    assert batch[1] == pytest.approx(negativity(rho[1] / tr[1]).value, abs=1e-13)


def test_distillation_frozen(fig2):
    n_d, n_0, ratio = distillation_ratio(fig2, 1.5)
    assert n_d == pytest.approx(0.8139136509399711, rel=1e-9)
    assert ratio > 1


def test_zero_baseline():
    with pytest.raises(ZeroBaseline):
        distillation_ratio(ProtocolParams(lam=0.0), 0.0)


def test_negativity_shift_with_alpha(fig2):
    import cmath
    from math import pi, sqrt

    alpha = 0.5 * cmath.exp(1j * pi / 3)
    z = 1j + fig2.kappa / 2
    shift = sqrt(2) * (alpha * cmath.exp(-z * fig2.t)).real
    q = np.linspace(-1, 3, 21)
    a = ratio_scan(fig2.replace(alpha=alpha), q + shift).n_d
    b = ratio_scan(fig2, q).n_d
    assert np.max(np.abs(a - b)) < 1e-3


def test_no_interaction_never_succeeds():
    p = ProtocolParams(g=0.0, alpha=0j)
    scan = ratio_scan(p, np.linspace(-2, 2, 9))
    assert np.ptp(scan.n_d) < 1e-12 and np.all(scan.n_d <= scan.n_0)
    assert success_probability(p) == 0.0


def test_success_frozen_and_ordering(fig2):
    res = success_probability_detail(fig2)
    assert res.probability == pytest.approx(0.25474899103545134, rel=1e-9)
    assert len(res.boundaries) == 2


@pytest.mark.slow
def test_success_grid_refinement(fig2):
    coarse = success_probability(fig2)
    fine = success_probability(fig2, step=fig2.delta_q / 20)
    assert abs(coarse - fine) < 1e-3


def test_sweep_row_order_and_status(fig2):
    rows = sweep([0.1, 0.2], [0.3, 0.5], fig2, 1.5, success=False, scan=False)
    assert [(r.g, r.lam) for r in rows] == [(0.1, 0.3), (0.1, 0.5), (0.2, 0.3), (0.2, 0.5)]
    assert rows[0].status == "ok"
    assert rows[1].status.startswith("TruncationError")
    one = sweep([0.2], [0.3], fig2, 1.5, success=False, scan=False)[0]
    assert one.ratio_at_q == pytest.approx(distillation_ratio(fig2, 1.5)[2], rel=1e-14)
    bad = sweep([0.2], [1.5], fig2, 1.5, success=False, scan=False)[0]
    assert bad.status.startswith("ValueError")
