"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""
import cmath
import os
import sys
import tempfile
import time
from math import pi, sqrt

import numpy as np
import pytest

from optodistill.cli import main as cli_main
from optodistill.dynamics import (
    ProtocolParams,
    decoherence_exponent,
    decoherence_exponent_quad,
    ideal_evolution_oracle,
    joint_coefficients,
)
from optodistill.entanglement import (
    baseline_negativity,
    outcome_grid_bounds,
    ratio_scan,
    sweep,
    tmsv_negativity_closed_form,
)
from optodistill.measurement import conditional_states, outcome_pdf, overlap_matrix, pdf_support, povm_overlap_quad
from optodistill.quadrature import integrate
from optodistill.teleportation import average_fidelity, diagnose_eq6, fidelity_ratio_map

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution outside the tests directory
    ACCEPTANCE_LINES = {}


def report(k, ok, detail):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line, flush=True)
    assert ok, line


FIG2 = ProtocolParams.fig2()
FIG3 = ProtocolParams.fig3()


def test_criterion_01_baseline_negativity():
    t0 = time.perf_counter()
    n0 = baseline_negativity(0.3, 12)
    dt = time.perf_counter() - t0
    closed = tmsv_negativity_closed_form(0.3, 12)
    ok = abs(n0 - 3 / 7) < 1e-6 and abs(n0 - closed) < 1e-12 and dt < 1.0
    report(1, ok, f"N_0 = {n0:.10f}, |N_0 - 3/7| = {abs(n0 - 3 / 7):.2e}, |eig - Schmidt| = {abs(n0 - closed):.1e}, {dt:.3f} s")


def test_criterion_02_pdf_normalization():
    worst_int = worst_tr = 0.0
    for g in (0.01, 0.2, 1.0):
        p = FIG2.replace(g=g)
        lo, hi = outcome_grid_bounds(p, n_sigma=12)
        val = integrate(lambda q: outcome_pdf(p, q), lo, hi, rtol=1e-12, atol=1e-15, initial_panels=8).value
        worst_int = max(worst_int, abs(val - 1.0))
        qs = np.linspace(*pdf_support(p), 50)
        _, tr = conditional_states(p, qs)
        pdf = outcome_pdf(p, qs)
        worst_tr = max(worst_tr, float(np.max(np.abs(tr - pdf) / pdf)))
    ok = worst_int < 1e-8 and worst_tr < 1e-8
    report(2, ok, f"max |int p - 1| = {worst_int:.1e}, max rel |Tr - p| = {worst_tr:.1e}")


def test_criterion_03_fig2a_shape():
    t0 = time.perf_counter()
    out = {}
    for g in (0.01, 0.2, 1.0):
        p = FIG2.replace(g=g)
        lo, hi = pdf_support(p)  # 4 sigma
        scan = ratio_scan(p, np.linspace(lo, hi, 401))
        q_star, r_max = scan.argmax()
        probable = scan.pdf > 1e-3
        out[g] = (q_star, r_max, float(np.max(scan.ratio[probable])), lo, hi)
    dt = time.perf_counter() - t0
    a = 1.0 < out[0.01][1] < 1.05
    b = out[0.2][1] > 1.1 and out[0.2][3] <= out[0.2][0] <= out[0.2][4]
    c = out[1.0][2] <= 1.02
    detail = (
        f"g=0.01 max {out[0.01][1]:.4f} ({'ok' if a else 'outside (1, 1.05)'}); "
        f"g=0.2 max {out[0.2][1]:.3f} at q={out[0.2][0]:.3f} in [{out[0.2][3]:.2f}, {out[0.2][4]:.2f}] ({'ok' if b else 'miss'}); "
        f"g=1 probable max {out[1.0][2]:.4f} ({'ok' if c else 'above 1.02'}); {dt:.1f} s"
    )
    report(3, a and b and c and dt < 60, detail)


def test_criterion_04_optimal_region():
    t0 = time.perf_counter()
    grid = (0.25, 0.3, 0.35)
    rows = sweep(grid, grid, FIG2, 1.5, success=True, scan=True)
    dt = time.perf_counter() - t0
    ok = all(r.status == "ok" and r.success_prob > 0.15 and r.max_ratio > 1 for r in rows) and dt < 600
    worst = min(rows, key=lambda r: r.success_prob)
    report(4, ok, f"min Pr_s = {worst.success_prob:.4f} at (g, lam) = ({worst.g}, {worst.lam}), "
                  f"min max-ratio = {min(r.max_ratio for r in rows):.3f}, {dt:.1f} s")


def test_criterion_05_success_ordering():
    from optodistill.entanglement import success_probability

    a = success_probability(FIG2.replace(g=0.2))
    b = success_probability(FIG2.replace(g=1.0))
    report(5, a > b, f"Pr_s(g=0.2) = {a:.5f}, Pr_s(g=1) = {b:.5f}")


def test_criterion_06_oracles():
    lam, g, alpha, t = 0.3, 0.2, 0.4 - 0.9j, pi
    p = ProtocolParams(lam=lam, g=g, kappa=0.0, theta=pi, t=t, alpha=alpha, n_max=8)
    c = joint_coefficients(p)
    orc = ideal_evolution_oracle(lam, g, alpha, t, 8)
    amps = np.array([a for _, a, _ in orc])
    labels = np.array([lab for _, _, lab in orc])
    coeff = c.weight * c.C * np.exp(-c.D) * c.G[:, :, 0]
    da = max(float(np.max(np.abs(coeff - np.outer(amps, amps.conj())))), float(np.max(np.abs(c.phi - labels))))
    db = max(abs(decoherence_exponent(q, n, m) - decoherence_exponent_quad(q, n, m))
             for q in (FIG2, FIG3) for n, m in ((2, 0), (1, 3), (7, 12)))
    labs = joint_coefficients(FIG3).phi
    dc = max(abs(overlap_matrix(labs[[n, m]], q, 0.11)[0, 1] - povm_overlap_quad(labs[n], labs[m], q, 0.11))
             for n, m, q in ((0, 0, 0.5), (2, 5, 1.0), (9, 4, 3.5)))
    xs = np.linspace(-2, 2, 5)
    pp = ProtocolParams(g=0.2, lam=0.3, kappa=0.01, theta=pi)
    reports = {r.convention: r for r in diagnose_eq6(pp, 0.0, 0.5, xs, xs)}
    sym, bk = reports["symmetric_phase"], reports["difference_port_x"]
    dd = sym.max_rel_deviation < 1e-6  # matches, and the report quantifies the default convention
    ok = da < 1e-12 and db < 1e-8 and dc < 1e-10 and dd
    report(6, ok, f"(a) {da:.1e} (b) {db:.1e} (c) {dc:.1e} (d) closed form vs symmetric-phase oracle "
                  f"{sym.max_rel_deviation:.1e}; discrepancy report vs default convention: max rel "
                  f"{bk.max_rel_deviation:.3f}, first at {bk.first_differing}")


def test_criterion_07_shift():
    alpha = 0.5 * cmath.exp(1j * pi / 3)
    pa = FIG2.replace(alpha=alpha)
    z = 1j + FIG2.kappa / 2
    shift = sqrt(2) * (alpha * cmath.exp(-z * FIG2.t)).real
    q = np.linspace(-3, 4, 71)
    dp = float(np.max(np.abs(outcome_pdf(pa, q) - outcome_pdf(FIG2, q - shift))))
    qn = np.linspace(-1, 3, 41)
    dn = float(np.max(np.abs(ratio_scan(pa, qn + shift).n_d - ratio_scan(FIG2, qn).n_d)))
    report(7, dp < 1e-12 and dn < 1e-3, f"pdf shift {dp:.1e}, negativity shift {dn:.1e} (shift {shift:.4f})")


def _contiguous_region(mask):
    # largest 4-connected component, phase axis periodic
    nm, nph = mask.shape
    seen = np.zeros_like(mask)
    best = 0
    for i, j in zip(*np.nonzero(mask)):
        if seen[i, j]:
            continue
        stack, size = [(i, j)], 0
        seen[i, j] = True
        while stack:
            a, b = stack.pop()
            size += 1
            for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                x, y = a + da, (b + db) % nph
                if 0 <= x < nm and mask[x, y] and not seen[x, y]:
                    seen[x, y] = True
                    stack.append((x, y))
        best = max(best, size)
    return best


def test_criterion_08_teleportation():
    vac = ProtocolParams(lam=0.0, g=0.0, kappa=0.0, theta=pi)
    f_cl = average_fidelity(vac, 0.0, 1.0)
    t0 = time.perf_counter()
    mags = np.linspace(0, 2, 12)
    phases = np.linspace(0, 2 * pi, 12)
    rows = fidelity_ratio_map(FIG3, 0.0, mags, phases)
    dt = time.perf_counter() - t0
    ratio = np.array([r.ratio for r in rows]).reshape(12, 12)
    region = _contiguous_region(ratio > 1.0)
    ok = abs(f_cl - 0.5) < 0.01 and region >= 2 and dt < 900
    report(8, ok, f"classical <F> = {f_cl:.6f}; fig3-preset ratio range [{np.nanmin(ratio):.4f}, {np.nanmax(ratio):.4f}], "
                  f"largest ratio>1 region {region} cells; {dt:.0f} s for 12x12")


def test_criterion_09_truncation():
    worst_n = 0.0
    for lam in (0.3, 0.4):
        p = FIG2.replace(lam=lam)
        q = np.linspace(*pdf_support(p), 41)
        a = ratio_scan(p, q)
        b = ratio_scan(p.replace(n_max=14), q)
        worst_n = max(worst_n, float(np.max(np.abs(a.n_d - b.n_d))), abs(a.n_0 - b.n_0))
    worst_f = 0.0
    for beta in (0.0, 1.0 + 0.5j, 2.0j):
        fa = average_fidelity(FIG3, 0.0, beta)
        fb = average_fidelity(FIG3.replace(n_max=14), 0.0, beta)
        worst_f = max(worst_f, abs(fa - fb))
    report(9, worst_n < 1e-3 and worst_f < 1e-3, f"max |dN| = {worst_n:.1e}, max |dF| = {worst_f:.1e} for n_max 12 -> 14")


def test_criterion_10_determinism():
    def run():
        d = tempfile.mkdtemp()
        assert cli_main(["fig2a", "--out", d]) == 0
        with open(os.path.join(d, "fig2a.csv"), "rb") as fh:
            return [l for l in fh.read().split(b"\n") if not l.startswith(b"# timestamp")]

    a, b = run(), run()
    report(10, a == b, f"fig2a CSV identical over {len(a)} lines with the timestamp masked")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
