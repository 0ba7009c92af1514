"""Negativity, distillation ratio, success probability and (g, lam) sweeps."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .dynamics import joint_coefficients
from .errors import DegenerateOutcome, GridTooCoarse, OptoDistillError, ZeroBaseline
from .fock_core import (
    HERMITIAN_RTOL,
    TwoModeDensityMatrix,
    check_hermitian,
    hermitian_eigenvalues,
    partial_transpose,
)
from .measurement import DEGENERATE_TRACE, _pdf_from_labels, conditional_states, pdf_support


@dataclass(frozen=True)
class NegativityResult:
    value: float
    negative_eigenvalues: np.ndarray
    n_max_used: int


def negativity(rho):
    """``sum |eps_i|`` over the negative eigenvalues of the mode-1 partial transpose."""
    if not isinstance(rho, TwoModeDensityMatrix):
        m = np.asarray(rho)
        rho = TwoModeDensityMatrix(m, int(round(sqrt(m.shape[0]))) - 1)
    eig = hermitian_eigenvalues(partial_transpose(rho.matrix))
    neg = eig[eig < 0.0]
    return NegativityResult(value=float(-np.sum(neg)), negative_eigenvalues=neg, n_max_used=rho.n_max)


def negativities(stack):
    """Negativity of each matrix in a ``(ns, d*d, d*d)`` stack of normalized states."""
    stack = np.asarray(stack)
    for m in stack:
        check_hermitian(m, HERMITIAN_RTOL)
    pt = partial_transpose(stack)
    eig = np.linalg.eigvalsh(0.5 * (pt + np.conj(np.swapaxes(pt, -1, -2))))
    return -np.sum(np.where(eig < 0.0, eig, 0.0), axis=-1)


def tmsv_state(lam, n_max):
    """Normalized two-mode squeezed vacuum truncated at ``n_max``."""
    d = n_max + 1
    psi = np.zeros((d, d))
    c = sqrt(1.0 - lam * lam) * lam ** np.arange(d)
    psi[np.arange(d), np.arange(d)] = c
    state = TwoModeDensityMatrix.from_pure(psi, n_max)
    return state.normalized()


def tmsv_negativity_closed_form(lam, n_max=None):
    """Negativity of the squeezed vacuum from its Schmidt coefficients.

    For a pure state with Schmidt coefficients ``c_n`` the negativity is
    ``((sum c_n)^2 - 1) / 2``; with no cutoff this is ``lam / (1 - lam)``.
    """
    if n_max is None:
        return lam / (1.0 - lam)
    c = lam ** np.arange(n_max + 1)
    c = c / np.sqrt(np.sum(c * c))
    return 0.5 * (np.sum(c) ** 2 - 1.0)


def baseline_negativity(lam, n_max):
    """Initial negativity ``N_0`` at the same cutoff as the conditional states."""
    return negativity(tmsv_state(lam, n_max)).value


@dataclass(frozen=True)
class RatioScan:
    q: np.ndarray
    pdf: np.ndarray
    n_d: np.ndarray
    n_0: float

    @property
    def ratio(self):
        return self.n_d / self.n_0

    def argmax(self, mask=None):
        r = np.where(mask, self.ratio, -np.inf) if mask is not None else self.ratio
        i = int(np.argmax(r))
        return float(self.q[i]), float(self.ratio[i])


def _distilled_negativities(params, qs, coeffs, chunk=64):
    qs = np.asarray(qs, dtype=float)
    out = np.empty(qs.size)
    for start in range(0, qs.size, chunk):
        sl = slice(start, start + chunk)
        rho, tr = conditional_states(params, qs[sl], coeffs)
        bad = ~(tr > DEGENERATE_TRACE)
        if np.any(bad):
            raise DegenerateOutcome(f"conditional trace underflow at q={qs[sl][bad][0]}")
        out[sl] = negativities(rho / tr[:, None, None])
    return out


def ratio_scan(params, qs):
    """``N_D(q)``, ``p(q)`` and ``N_0`` on a grid of outcomes."""
    if params.lam == 0.0:
        raise ZeroBaseline("lam = 0 has no initial entanglement")
    coeffs = joint_coefficients(params)
    qs = np.asarray(qs, dtype=float)
    n_d = _distilled_negativities(params, qs, coeffs)
    return RatioScan(
        q=qs,
        pdf=np.asarray(_pdf_from_labels(params, coeffs.phi, qs)),
        n_d=n_d,
        n_0=baseline_negativity(params.lam, params.n_max),
    )


def distillation_ratio(params, q):
    """``(N_D, N_0, N_D / N_0)`` at outcome ``q``."""
    scan = ratio_scan(params, [q])
    n_d = float(scan.n_d[0])
    return n_d, scan.n_0, n_d / scan.n_0


def outcome_grid_bounds(params, coeffs=None, n_sigma=6.0):
    """Grid span covering every mixture centre ``sqrt(2) Re phi_l`` by ``n_sigma`` widths."""
    coeffs = coeffs or joint_coefficients(params)
    centers = sqrt(2.0) * coeffs.phi.real
    half = n_sigma * sqrt(0.5 * (1.0 + 2.0 * params.delta_q ** 2))
    return float(centers.min() - half), float(centers.max() + half)


@dataclass(frozen=True)
class SuccessResult:
    probability: float
    boundaries: tuple
    n_points: int


def success_probability_detail(params, step=None, bisect_tol=1e-6, max_bisect=80):
    """Probability mass of outcomes with ``N_D(q) > N_0``.

    The outcome axis is sampled with spacing ``delta_q / 10`` across the
    whole mixture support; sign changes of ``N_D - N_0`` are refined by
    bisection to ``bisect_tol`` and inserted as grid points, and ``p(q)`` is
    integrated with the trapezoid rule over the accepted segments.
    """
    if params.lam == 0.0:
        raise ZeroBaseline("lam = 0 has no initial entanglement")
    coeffs = joint_coefficients(params)
    n0 = baseline_negativity(params.lam, params.n_max)
    step = step or params.delta_q / 10.0
    lo, hi = outcome_grid_bounds(params, coeffs)
    n_pts = int(np.ceil((hi - lo) / step)) + 1
    qs = lo + step * np.arange(n_pts)
    excess = _distilled_negativities(params, qs, coeffs) - n0

    def excess_at(q):
        return float(_distilled_negativities(params, [q], coeffs)[0] - n0)

    boundaries = []
    flips = np.nonzero((excess[:-1] > 0) != (excess[1:] > 0))[0]
    for i in flips:
        a, b = qs[i], qs[i + 1]
        fa_pos = excess[i] > 0
        it = 0
        while b - a > bisect_tol:
            if it >= max_bisect:
                raise GridTooCoarse(f"bisection budget exhausted near q={a}")
            mid = 0.5 * (a + b)
            if (excess_at(mid) > 0) == fa_pos:
                a = mid
            else:
                b = mid
            it += 1
        boundaries.append(0.5 * (a + b))

    # integrate p over each accepted run of the refined grid
    pts = np.concatenate([qs, boundaries])
    accept = np.concatenate([excess > 0, np.ones(len(boundaries), dtype=bool)])
    order = np.argsort(pts, kind="stable")
    pts, accept = pts[order], accept[order]
    pdf = np.asarray(_pdf_from_labels(params, coeffs.phi, pts))
    seg = accept[:-1] & accept[1:]
    prob = float(np.sum(0.5 * (pdf[:-1] + pdf[1:]) * np.diff(pts) * seg))
    return SuccessResult(probability=min(max(prob, 0.0), 1.0), boundaries=tuple(boundaries), n_points=n_pts)


def success_probability(params, **kwargs):
    """Distillation success probability for the given parameters."""
    return success_probability_detail(params, **kwargs).probability


@dataclass(frozen=True)
class SweepResultRow:
    g: float
    lam: float
    success_prob: float
    ratio_at_q: float
    n0: float
    max_ratio: float
    argmax_q: float
    status: str = "ok"

    FIELDS = ("g", "lam", "success_prob", "ratio_at_q", "n0", "max_ratio", "argmax_q", "status")

    def as_tuple(self):
        return tuple(getattr(self, f) for f in self.FIELDS)


@dataclass(frozen=True)
class _SweepCell:
    params: object
    designated_q: float
    success: bool
    scan: bool
    scan_points: int = 161
    extra: dict = field(default_factory=dict)


def _sweep_cell(cell):
    p = cell.params
    nan = float("nan")
    try:
        n_d, n0, ratio = distillation_ratio(p, cell.designated_q)
        max_ratio = argmax_q = nan
        if cell.scan:
            lo, hi = pdf_support(p)
            scan = ratio_scan(p, np.linspace(lo, hi, cell.scan_points))
            argmax_q, max_ratio = scan.argmax()
        prob = success_probability(p) if cell.success else nan
        return SweepResultRow(p.g, p.lam, prob, ratio, n0, max_ratio, argmax_q)
    except OptoDistillError as exc:
        return SweepResultRow(p.g, p.lam, nan, nan, nan, nan, nan, status=f"{type(exc).__name__}: {exc}")


def sweep(g_values, lambda_values, fixed, designated_q, success=True, scan=True, scan_points=161, jobs=1):
    """One row per ``(g, lam)`` in row-major order over the two grids.

    Cell failures are recorded in the row ``status`` instead of aborting.
    ``jobs > 1`` evaluates cells in worker processes; results are gathered
    in grid order so the output does not depend on scheduling.
    """
    g_values, lambda_values = list(g_values), list(lambda_values)
    if not g_values or not lambda_values:
        raise ValueError("sweep grids must be non-empty")
    cells = []
    for g in g_values:
        for lam in lambda_values:
            try:
                p = fixed.replace(g=float(g), lam=float(lam))
            except ValueError as exc:
                cells.append(exc)
                continue
            cells.append(_SweepCell(p, designated_q, success, scan, scan_points))
    todo = [c for c in cells if isinstance(c, _SweepCell)]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = iter(list(pool.map(_sweep_cell, todo)))
    else:
        done = iter([_sweep_cell(c) for c in todo])
    rows = []
    i = 0
    for g in g_values:
        for lam in lambda_values:
            c = cells[i]
            i += 1
            if isinstance(c, _SweepCell):
                rows.append(next(done))
            else:
                nan = float("nan")
                rows.append(SweepResultRow(float(g), float(lam), nan, nan, nan, nan, nan, status=f"ValueError: {c}"))
    return rows
