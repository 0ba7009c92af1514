"""Command-line driver.

    optodistill <preset|run> [--config FILE] [--out DIR] [--svg] [--n-max N] [--show-config]

Exit status is 0 on success, 2 for configuration errors and 3 for
failures during the computation; errors are also written to stderr as a
one-line JSON record.
"""
import argparse
import json
import os
import sys

from .config import PRESETS, load_config
from .errors import ComputeError, ConfigError, OptoDistillError, SpecError
from .experiments import run_experiment
from .table import emit_csv, emit_svg

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3


def build_parser():
    ap = argparse.ArgumentParser(prog="optodistill", description=__doc__.split("\n\n")[0])
    ap.add_argument("target", help=f"preset ({', '.join(PRESETS)}) or 'run'")
    ap.add_argument("--config", help="INI file; with a preset it overrides the preset's values")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--svg", action="store_true", help="also write an SVG plot")
    ap.add_argument("--n-max", type=int, help="override the Fock cutoff")
    ap.add_argument("--show-config", action="store_true", help="print the resolved config and exit")
    return ap


def resolve_config(args):
    if args.target == "run":
        if not args.config:
            raise ConfigError("'run' needs --config FILE")
        cfg = load_config(args.config)
    elif args.target in PRESETS:
        cfg = PRESETS[args.target]()
        if args.config:
            cfg = load_config(args.config, base=cfg)
    else:
        raise ConfigError(f"unknown target {args.target!r}; use one of {', '.join(PRESETS)} or 'run'")
    if args.n_max is not None:
        cfg = cfg.with_n_max(args.n_max)
    return cfg


def _fail(code, exc, cell=None):
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if cell is not None:
        rec["cell"] = cell
    print(json.dumps(rec, sort_keys=True, default=str), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    if args.show_config:
        sys.stdout.write(cfg.to_ini())
        return EXIT_OK
    if not os.path.isdir(args.out) or not os.access(args.out, os.W_OK):
        return _fail(EXIT_CONFIG, ConfigError(f"output directory {args.out!r} is not writable"))

    try:
        table, spec = run_experiment(cfg)
    except ComputeError as exc:
        return _fail(EXIT_COMPUTE, exc, exc.cell)
    except OptoDistillError as exc:
        return _fail(EXIT_COMPUTE, exc)

    stem = os.path.join(args.out, cfg.name)
    try:
        emit_csv(table, stem + ".csv")
        with open(stem + ".config.echo", "w", encoding="utf-8") as fh:
            fh.write(cfg.to_ini())
        if args.svg and spec is not None:
            emit_svg(table, spec, stem + ".svg")
    except SpecError as exc:
        return _fail(EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail(EXIT_COMPUTE, exc)
    print(f"wrote {stem}.csv ({len(table.rows)} rows)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
