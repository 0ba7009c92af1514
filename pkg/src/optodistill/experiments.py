"""Dispatch a RunConfig to the physics modules and collect a ResultTable."""
from datetime import datetime, timezone

import numpy as np

from . import __version__, kernels
from .entanglement import ratio_scan, success_probability_detail, sweep
from .errors import ComputeError, OptoDistillError
from .measurement import outcome_pdf
from .table import TIMESTAMP_KEY, PlotSpec, ResultTable
from .teleportation import CONVENTIONS, diagnose_eq6, fidelity_ratio_map


def _guard(cell, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OptoDistillError as exc:
        raise ComputeError(f"{type(exc).__name__}: {exc}", cell=cell) from exc


def _pdf_scan(cfg):
    rows = []
    for g in cfg.grid("g"):
        p = _guard({"g": g}, cfg.params.replace, g=g)
        pdf = _guard({"g": g}, outcome_pdf, p, np.asarray(cfg.grid("q")))
        rows += [(g, q, float(v)) for q, v in zip(cfg.grid("q"), pdf)]
    spec = PlotSpec("lines", x="q", y_left="pdf", group="g", title="outcome density")
    return ["g", "q", "pdf"], rows, spec


def _ratio_scan(cfg):
    rows = []
    for g in cfg.grid("g"):
        p = _guard({"g": g}, cfg.params.replace, g=g)
        scan = _guard({"g": g}, ratio_scan, p, cfg.grid("q"))
        ratio = scan.ratio
        for i, q in enumerate(cfg.grid("q")):
            rows.append((g, q, float(scan.pdf[i]), float(scan.n_d[i]), float(scan.n_0), float(ratio[i])))
    spec = PlotSpec("lines", x="q", y_left="ratio", y_right="pdf", group="g",
                    title="N_D / N_0 (solid) and p(q) (dashed)")
    return ["g", "q", "pdf", "n_d", "n_0", "ratio"], rows, spec


def _success_prob(cfg):
    rows = []
    for g in cfg.grid("g"):
        p = _guard({"g": g}, cfg.params.replace, g=g)
        res = _guard({"g": g}, success_probability_detail, p, bisect_tol=cfg.option("bisect_tol"))
        rows.append((g, p.lam, res.probability, len(res.boundaries), res.n_points))
    spec = PlotSpec("lines", x="g", y_left="success_prob", title="success probability")
    return ["g", "lam", "success_prob", "n_boundaries", "n_points"], rows, spec


def _sweep(cfg):
    result = sweep(
        cfg.grid("g"),
        cfg.grid("lam"),
        cfg.params,
        cfg.option("designated_q"),
        success=cfg.option("success"),
        scan=cfg.option("scan"),
        scan_points=cfg.option("scan_points"),
        jobs=cfg.option("jobs"),
    )
    cols = list(result[0].FIELDS) if result else []
    value = "success_prob" if cfg.option("success") else "ratio_at_q"
    spec = PlotSpec("heatmap", x="g", y="lam", value=value, title=value)
    return cols, [r.as_tuple() for r in result], spec


def _convention(cfg):
    return CONVENTIONS[cfg.option("convention")]


def _teleport_map(cfg):
    rows = _guard(
        {"q": cfg.option("q")},
        fidelity_ratio_map,
        cfg.params,
        cfg.option("q"),
        cfg.grid("beta_mag"),
        cfg.grid("beta_phase"),
        baseline=cfg.option("baseline"),
        convention=_convention(cfg),
        gain=cfg.option("gain"),
        half_width=cfg.option("half_width"),
        rtol=cfg.option("quad_rtol"),
    )
    spec = PlotSpec("heatmap", x="beta_mag", y="beta_phase", value="ratio", title="<F_D> / <F_0>")
    return list(rows[0].FIELDS), [r.as_tuple() for r in rows], spec


def _diagnose(cfg):
    reports = _guard(
        {"q": cfg.option("q"), "beta": str(cfg.option("beta"))},
        diagnose_eq6,
        cfg.params,
        cfg.option("q"),
        cfg.option("beta"),
        cfg.grid("x_bar"),
        cfg.grid("p_bar"),
    )
    nan = float("nan")
    rows = []
    for r in reports:
        first = r.first_differing or (nan, nan, -1, -1)
        rows.append((r.convention, r.max_rel_deviation, *first, r.points))
    cols = ["convention", "max_rel_deviation", "first_x_bar", "first_p_bar", "first_n", "first_m", "points"]
    return cols, rows, None


_DISPATCH = {
    "pdf-scan": _pdf_scan,
    "ratio-scan": _ratio_scan,
    "success-prob": _success_prob,
    "sweep": _sweep,
    "teleport-map": _teleport_map,
    "diagnose-eq6": _diagnose,
}


def run_experiment(cfg, timestamp=None):
    """Return ``(table, plot_spec)``; ``plot_spec`` is None when there is nothing to draw."""
    cols, rows, spec = _DISPATCH[cfg.experiment](cfg)
    stamp = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    prov = [("optodistill", __version__), ("kernel_backend", kernels.BACKEND)]
    prov += cfg.provenance()
    prov.append((TIMESTAMP_KEY, stamp))
    return ResultTable(cols, rows, prov), spec
