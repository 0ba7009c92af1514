"""Result tables and their CSV / SVG renderings."""
import csv
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import SpecError

TIMESTAMP_KEY = "timestamp"


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    provenance: list = field(default_factory=list)  # (key, value) pairs

    def __post_init__(self):
        width = len(self.columns)
        for r in self.rows:
            if len(r) != width:
                raise ValueError(f"row of length {len(r)} in a table with {width} columns")

    def column(self, name):
        if name not in self.columns:
            raise SpecError(f"unknown column {name!r}")
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def format_cell(v):
    """Shortest round-trip decimal for floats; ``repr`` of a double parses back exactly."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if hasattr(v, "dtype"):
        return format_cell(v.item())
    return str(v)


def emit_csv(table, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in table.provenance:
            fh.write(f"# {key} = {value}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for r in table.rows:
            w.writerow([format_cell(v) for v in r])


def read_csv(path):
    """Inverse of :func:`emit_csv` for tests: ``(provenance, columns, rows)`` with cells as text."""
    prov, lines = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                k, _, v = line[2:].rstrip("\n").partition(" = ")
                prov.append((k, v))
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return prov, rows[0], rows[1:]


@dataclass(frozen=True)
class PlotSpec:
    """``lines``: x vs y_left (and y_right on a second axis), one curve per ``group`` value.
    ``heatmap``: cells at (x, y) coloured by ``value``."""

    kind: str
    x: str
    y_left: str = None
    y_right: str = None
    group: str = None
    value: str = None
    y: str = None
    title: str = ""


W, H = 640, 420
ML, MR, MT, MB = 70, 90, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _numeric(vals):
    out = []
    for v in vals:
        try:
            out.append(float(v))
        except (TypeError, ValueError):
            out.append(float("nan"))
    return out


def _range(vals):
    good = [v for v in vals if math.isfinite(v)]
    if not good:
        return 0.0, 1.0
    lo, hi = min(good), max(good)
    if lo == hi:
        pad = abs(lo) * 0.05 or 0.5
        return lo - pad, hi + pad
    return lo, hi


def _fmt_tick(v):
    return f"{v:.3g}"


def _svg_root(title):
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H),
                      viewBox=f"0 0 {W} {H}")
    ET.SubElement(root, "rect", x="0", y="0", width=str(W), height=str(H), fill="white")
    if title:
        t = ET.SubElement(root, "text", x=str(W / 2), y="22", fill="black")
        t.set("text-anchor", "middle")
        t.set("font-size", "14")
        t.text = title
    return root


def _axis(root, x0, x1, y0, y1, xlabel, ylabel, side="left", color="black"):
    px0, px1, py0, py1 = ML, W - MR, H - MB, MT
    if side == "left":
        ET.SubElement(root, "line", x1=str(px0), y1=str(py0), x2=str(px1), y2=str(py0), stroke="black")
        for i in range(5):
            v = x0 + (x1 - x0) * i / 4
            xp = px0 + (px1 - px0) * i / 4
            t = ET.SubElement(root, "text", x=f"{xp:.2f}", y=str(py0 + 16), fill="black")
            t.set("text-anchor", "middle")
            t.set("font-size", "11")
            t.text = _fmt_tick(v)
        t = ET.SubElement(root, "text", x=str((px0 + px1) / 2), y=str(H - 12), fill="black")
        t.set("text-anchor", "middle")
        t.text = xlabel
    xa = px0 if side == "left" else px1
    ET.SubElement(root, "line", x1=str(xa), y1=str(py0), x2=str(xa), y2=str(py1), stroke=color)
    for i in range(5):
        v = y0 + (y1 - y0) * i / 4
        yp = py0 + (py1 - py0) * i / 4
        off = -6 if side == "left" else 6
        t = ET.SubElement(root, "text", x=str(xa + off), y=f"{yp + 4:.2f}", fill=color)
        t.set("text-anchor", "end" if side == "left" else "start")
        t.set("font-size", "11")
        t.text = _fmt_tick(v)
    lx = 16 if side == "left" else W - 16
    t = ET.SubElement(root, "text", x=str(lx), y=str((py0 + py1) / 2), fill=color)
    t.set("text-anchor", "middle")
    t.set("transform", f"rotate(-90 {lx} {(py0 + py1) / 2})")
    t.text = ylabel


def _project(v, lo, hi, a, b):
    return a + (v - lo) / (hi - lo) * (b - a)


def _lines(table, spec):
    for col in (spec.x, spec.y_left, spec.y_right, spec.group):
        if col is not None:
            table.column(col)
    if spec.y_left is None:
        raise SpecError("line plot needs y_left")
    xs = _numeric(table.column(spec.x))
    groups = table.column(spec.group) if spec.group else [None] * len(xs)
    keys = list(dict.fromkeys(groups))
    root = _svg_root(spec.title)
    x0, x1 = _range(xs)

    def draw(ycol, side, dash):
        ys = _numeric(table.column(ycol))
        y0, y1 = _range(ys)
        _axis(root, x0, x1, y0, y1, spec.x, ycol, side=side)
        for gi, key in enumerate(keys):
            pts = [
                (_project(x, x0, x1, ML, W - MR), _project(y, y0, y1, H - MB, MT))
                for x, y, g in zip(xs, ys, groups)
                if g == key and math.isfinite(x) and math.isfinite(y)
            ]
            color = PALETTE[gi % len(PALETTE)]
            if len(pts) == 1:
                ET.SubElement(root, "circle", cx=f"{pts[0][0]:.2f}", cy=f"{pts[0][1]:.2f}", r="3", fill=color)
            elif pts:
                pl = ET.SubElement(root, "polyline", fill="none", stroke=color,
                                   points=" ".join(f"{a:.2f},{b:.2f}" for a, b in pts))
                pl.set("stroke-width", "1.5")
                if dash:
                    pl.set("stroke-dasharray", "5,3")
            if key is not None and side == "left":
                t = ET.SubElement(root, "text", x=str(ML + 8), y=str(MT + 14 + 14 * gi), fill=color)
                t.set("font-size", "11")
                t.text = f"{spec.group} = {format_cell(key)}"

    draw(spec.y_left, "left", False)
    if spec.y_right:
        draw(spec.y_right, "right", True)
    return root


def _color(frac):
    # linear blue -> yellow ramp
    f = min(max(frac, 0.0), 1.0)
    r = int(round(40 + f * (250 - 40)))
    g = int(round(40 + f * (230 - 40)))
    b = int(round(160 + f * (40 - 160)))
    return f"#{r:02x}{g:02x}{b:02x}"


def _heatmap(table, spec):
    for col in (spec.x, spec.y, spec.value):
        if col is None:
            raise SpecError("heatmap needs x, y and value")
        table.column(col)
    xs = _numeric(table.column(spec.x))
    ys = _numeric(table.column(spec.y))
    vs = _numeric(table.column(spec.value))
    ux, uy = sorted(set(xs)), sorted(set(ys))
    v0, v1 = _range(vs)
    root = _svg_root(spec.title)
    pw, ph = (W - MR - ML) / max(len(ux), 1), (H - MB - MT) / max(len(uy), 1)
    for x, y, v in zip(xs, ys, vs):
        i, j = ux.index(x), uy.index(y)
        fill = _color((v - v0) / (v1 - v0)) if math.isfinite(v) else "#bbbbbb"
        ET.SubElement(root, "rect", x=f"{ML + i * pw:.2f}", y=f"{H - MB - (j + 1) * ph:.2f}",
                      width=f"{pw:.2f}", height=f"{ph:.2f}", fill=fill)
    _axis(root, ux[0] if ux else 0.0, ux[-1] if ux else 1.0, uy[0] if uy else 0.0,
          uy[-1] if uy else 1.0, spec.x, spec.y)
    # colorbar
    cx = W - MR + 30
    steps = 32
    bh = (H - MB - MT) / steps
    for s in range(steps):
        ET.SubElement(root, "rect", x=str(cx), y=f"{H - MB - (s + 1) * bh:.2f}", width="14",
                      height=f"{bh + 0.5:.2f}", fill=_color((s + 0.5) / steps))
    for frac, yv in ((0.0, H - MB), (1.0, MT)):
        t = ET.SubElement(root, "text", x=str(cx + 18), y=str(yv + 4), fill="black")
        t.set("font-size", "10")
        t.text = _fmt_tick(v0 + frac * (v1 - v0))
    t = ET.SubElement(root, "text", x=str(cx), y=str(MT - 8), fill="black")
    t.set("font-size", "11")
    t.text = spec.value
    return root


def emit_svg(table, spec, path):
    if spec.kind == "lines":
        root = _lines(table, spec)
    elif spec.kind == "heatmap":
        root = _heatmap(table, spec)
    else:
        raise SpecError(f"unknown plot kind {spec.kind!r}")
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
