"""Run configuration: INI parsing, validation, presets and the resolved echo.

A config has four sections::

    [run]      experiment, name
    [params]   every ProtocolParams field (theta or reflectivity)
    [grid]     one line per scanned variable, "start:stop:count" or "a, b, c"
    [options]  experiment options and numeric tolerances

Complex values are written ``re+imi`` (``1.4142+1.4142i``).
"""
import configparser
import re
from dataclasses import dataclass, field, fields, replace
from math import acos, pi

import numpy as np

from .dynamics import ProtocolParams
from .errors import ConfigError
from .teleportation import CONVENTIONS

EXPERIMENTS = ("pdf-scan", "ratio-scan", "sweep", "success-prob", "teleport-map", "diagnose-eq6")

# grids each experiment needs; values are the fallback when absent (None = required)
REQUIRED_GRIDS = {
    "pdf-scan": {"g": "params", "q": None},
    "ratio-scan": {"g": "params", "q": None},
    "sweep": {"g": None, "lam": None},
    "success-prob": {"g": None},
    "teleport-map": {"beta_mag": None, "beta_phase": None},
    "diagnose-eq6": {"x_bar": None, "p_bar": None},
}

DEFAULT_OPTIONS = {
    "designated_q": 1.5,
    "success": True,
    "scan": True,
    "scan_points": 161,
    "q": 0.0,
    "beta": 0.5 + 0j,
    "baseline": "tmsv",
    "convention": "difference_port_x",
    "gain": 1.0,
    "half_width": 6.0,
    "quad_rtol": 1e-5,
    "bisect_tol": 1e-6,
    "jobs": 1,
}

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"\s*(?:(?P<im>[+-]\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*[ij])?\s*$"
)


def parse_complex(text):
    """``"1.5-0.25i"``, ``"2"``, ``"-3i"`` -> complex."""
    s = text.strip()
    if re.fullmatch(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\s*[ij]", s):
        return complex(0.0, float(s[:-1]))
    m = _COMPLEX_RE.match(s)
    if not s or m is None or (m.group("re") is None and m.group("im") is None):
        raise ConfigError(f"cannot parse complex value {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_txt = (m.group("im") or "0").replace(" ", "")
    if im_txt in ("+", "-"):
        im_txt += "1"
    return complex(re_part, float(im_txt))


def format_complex(z):
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and str(z.imag).startswith("-")) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_grid(text, name="grid"):
    """``"a:b:n"`` (n points, endpoints included) or a comma list."""
    s = text.strip()
    if not s:
        raise ConfigError(f"grid {name!r} is empty")
    try:
        if ":" in s:
            parts = s.split(":")
            if len(parts) != 3:
                raise ConfigError(f"grid {name!r} must be start:stop:count")
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ConfigError(f"grid {name!r} needs at least one point")
            if n > 1 and a == b:
                raise ConfigError(f"grid {name!r} has a degenerate range")
            return tuple(float(v) for v in np.linspace(a, b, n))
        vals = tuple(float(v) for v in s.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"grid {name!r}: {exc}") from None
    if not vals:
        raise ConfigError(f"grid {name!r} is empty")
    return vals


def _parse_bool(text, key):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"option {key!r} expects a boolean, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    name: str
    params: ProtocolParams
    grids: dict
    options: dict = field(default_factory=dict)

    def option(self, key):
        return self.options.get(key, DEFAULT_OPTIONS[key])

    def grid(self, key):
        return self.grids[key]

    def with_n_max(self, n_max):
        try:
            return replace(self, params=self.params.replace(n_max=int(n_max)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def provenance(self):
        """Flat ``(key, value)`` echo of every resolved input."""
        items = [("run.experiment", self.experiment), ("run.name", self.name)]
        for f in fields(ProtocolParams):
            items.append((f"params.{f.name}", _fmt(getattr(self.params, f.name))))
        for k in sorted(self.grids):
            items.append((f"grid.{k}", ", ".join(repr(v) for v in self.grids[k])))
        for k in sorted(DEFAULT_OPTIONS):
            items.append((f"options.{k}", _fmt(self.option(k))))
        return items

    def to_ini(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        sections = {"run": {}, "params": {}, "grid": {}, "options": {}}
        for key, val in self.provenance():
            sec, k = key.split(".", 1)
            sections[sec][k] = val
        for sec, vals in sections.items():
            cp[sec] = vals
        from io import StringIO

        buf = StringIO()
        cp.write(buf)
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


_PARAM_TYPES = {
    "lam": float,
    "g": float,
    "kappa": float,
    "theta": float,
    "t": float,
    "alpha": parse_complex,
    "delta_q": float,
    "n_max": int,
    "truncation_tol": float,
    "label_variant": str,
}


def _convert_option(key, text):
    default = DEFAULT_OPTIONS[key]
    try:
        if isinstance(default, bool):
            return _parse_bool(text, key)
        if isinstance(default, complex):
            return parse_complex(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"option {key!r}: cannot parse {text!r}") from None
    return text.strip()


def _parse_value(text):
    t = text.strip()
    if t.lower() == "pi":
        return pi
    return float(t)


def config_from_mapping(sections, base=None):
    """Build a RunConfig from ``{section: {key: text}}``, overlaying ``base``."""
    run = dict(sections.get("run", {}))
    experiment = run.get("experiment", base.experiment if base else None)
    if experiment is None:
        raise ConfigError("[run] experiment is required")
    experiment = experiment.strip()
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    name = run.get("name", base.name if base else experiment).strip()
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        raise ConfigError(f"run name {name!r} is not a safe file stem")

    pvals = {}
    if base is not None:
        pvals = {f.name: getattr(base.params, f.name) for f in fields(ProtocolParams)}
    for key, text in sections.get("params", {}).items():
        if key == "reflectivity":
            try:
                r = _parse_value(text)
            except ValueError:
                raise ConfigError(f"reflectivity: cannot parse {text!r}") from None
            if not 0.0 <= r <= 1.0:
                raise ConfigError("reflectivity must lie in [0, 1]")
            pvals["theta"] = 2.0 * acos(r)
            continue
        if key not in _PARAM_TYPES:
            raise ConfigError(f"unknown parameter {key!r}")
        conv = _PARAM_TYPES[key]
        try:
            pvals[key] = text.strip() if conv is str else (_parse_value(text) if conv is float else conv(text))
        except ValueError:
            raise ConfigError(f"parameter {key!r}: cannot parse {text!r}") from None
    try:
        params = ProtocolParams(**pvals)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None

    grids = dict(base.grids) if base is not None and base.experiment == experiment else {}
    for key, text in sections.get("grid", {}).items():
        grids[key] = parse_grid(text, key)
    for key, fallback in REQUIRED_GRIDS[experiment].items():
        if key not in grids:
            if fallback == "params":
                grids[key] = (float(getattr(params, key)),)
            else:
                raise ConfigError(f"experiment {experiment!r} needs a [grid] {key} entry")
    unknown = set(grids) - set(REQUIRED_GRIDS[experiment])
    if unknown:
        raise ConfigError(f"grids {sorted(unknown)} are not used by {experiment!r}")

    options = dict(base.options) if base is not None else {}
    for key, text in sections.get("options", {}).items():
        if key not in DEFAULT_OPTIONS:
            raise ConfigError(f"unknown option {key!r}")
        options[key] = _convert_option(key, text)
    if options.get("baseline", "tmsv") not in ("tmsv", "unmeasured"):
        raise ConfigError("baseline must be 'tmsv' or 'unmeasured'")
    if options.get("convention", "difference_port_x") not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {sorted(CONVENTIONS)}")
    for key in ("quad_rtol", "bisect_tol", "half_width"):
        if key in options and not options[key] > 0:
            raise ConfigError(f"option {key!r} must be positive")
    if options.get("jobs", 1) < 1:
        raise ConfigError("jobs must be >= 1")
    return RunConfig(experiment, name, params, grids, options)


def load_config(path, base=None):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    unknown = set(cp.sections()) - {"run", "params", "grid", "options"}
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}")
    return config_from_mapping({s: dict(cp[s]) for s in cp.sections()}, base=base)


def parse_config_text(text, base=None):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_mapping({s: dict(cp[s]) for s in cp.sections()}, base=base)


def _preset(text):
    return lambda: parse_config_text(text)


PRESETS = {
    "fig2a": _preset(
        """
[run]
experiment = ratio-scan
name = fig2a
[params]
lam = 0.3
kappa = 0.01
reflectivity = 0.1
t = pi
delta_q = 0.11
n_max = 12
[grid]
g = 0.01, 0.2, 1.0
q = -3:4:141
"""
    ),
    "fig2b": _preset(
        """
[run]
experiment = sweep
name = fig2b
[params]
kappa = 0.01
reflectivity = 0.1
t = pi
delta_q = 0.11
n_max = 14
[grid]
g = 0.05, 0.2, 0.4, 0.6, 0.8, 1.0
lam = 0.1:0.5:5
[options]
designated_q = 1.5
success = true
scan = false
"""
    ),
    "fig2c": _preset(
        """
[run]
experiment = sweep
name = fig2c
[params]
kappa = 0.01
reflectivity = 0.1
t = pi
delta_q = 0.11
n_max = 18
[grid]
g = 0.01:1:25
lam = 0.05:0.6:23
[options]
designated_q = 1.5
success = false
scan = false
"""
    ),
    "fig3": _preset(
        """
[run]
experiment = teleport-map
name = fig3
[params]
lam = 0.3
g = 0.2
kappa = 0.01
reflectivity = 0.1
t = pi
alpha = 1.4142135623730951+1.414213562373095i
delta_q = 0.11
n_max = 12
[grid]
beta_mag = 0:2:12
beta_phase = 0:6.283185307179586:12
[options]
q = 0
baseline = tmsv
"""
    ),
}
