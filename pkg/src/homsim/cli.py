"""Command-line interface: ``homsim <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 sweep finished with some failed points.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .config import apply_overrides, load_config, sweep_from
from .errors import ConfigError, HomSimError
from .oracle import AXES, IdealParams, ideal_g2hom, ideal_threshold
from .outputs import IoFailure, emit_outputs, write_timings
from .presets import FIGURES, build_figure, table1
from .sweep import RunRecord, SweepSpec, evaluate_point, find_threshold, run_sweep
from .units import TIME_UNITS, parse_quantity

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4
log = logging.getLogger("homsim")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML scenario/sweep file")
    p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                   help="override a scenario parameter, e.g. emitter2.lifetime='1 ns' (repeatable)")
    p.add_argument("--out", help="output directory (nothing is written without it)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.add_argument("--precision", choices=("fast", "default", "high"), default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent points")
    p.add_argument("--bin-width", default=None,
                   help="histogram bin width with units, e.g. '16 ps' (bare numbers: ps for fig2)")
    p.add_argument("--seedless", action="store_true",
                   help="accepted for reproducibility scripts; the simulator has no random components")
    p.add_argument("--hz-convention", choices=("angular", "cycles"), default=None,
                   help="read GHz-type inputs as angular frequency (default) or as cycles per second")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"homsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="evaluate a single scenario")
    _common(p)
    p = sub.add_parser("sweep", help="run the sweep described in --config")
    _common(p)
    p = sub.add_parser("threshold", help="largest mismatch keeping g2 below a target")
    _common(p)
    p.add_argument("--axis", required=True, choices=AXES)
    p.add_argument("--target", required=True, type=float)
    p.add_argument("--span", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    p = sub.add_parser("figure", help="data for one of the standard figures")
    _common(p)
    p.add_argument("name", choices=FIGURES)
    p = sub.add_parser("table1", help="tolerance thresholds for all axes and targets")
    _common(p)
    p = sub.add_parser("oracle", help="closed-form ideal-pulse results only")
    _common(p)
    p.add_argument("--gamma-ratio", type=float, default=1.0)
    p.add_argument("--delta-omega", type=float, default=0.0)
    p.add_argument("--delta-tau", type=float, default=0.0)
    p.add_argument("--gamma-deph", type=float, default=0.0, help="summed dephasing rate")
    p.add_argument("--threshold", nargs=2, metavar=("AXIS", "TARGET"), default=None)
    return parser


def _bin_width_ps(text) -> float:
    value, unit = parse_quantity(text)
    if unit == "":
        return value
    if unit not in TIME_UNITS:
        raise ConfigError(f"--bin-width needs a time unit, got {unit!r}")
    return value * TIME_UNITS[unit] / TIME_UNITS["ps"]


def _print(obj) -> None:
    print(json.dumps(obj, indent=1, sort_keys=True, default=float))


def _write(args, records, stem, config=None, curves=None) -> None:
    if not args.out:
        return
    paths = emit_outputs(records, args.out, args.format, stem, config, curves)
    paths.append(write_timings(records, args.out, stem))
    for p in paths:
        log.info("wrote %s", p)


def _spec(args) -> tuple[SweepSpec, dict]:
    doc, units = load_config(args.config, args.hz_convention)
    bw = units.time(args.bin_width) if args.bin_width else None
    spec = sweep_from(doc, units, args.precision, bw)
    base = apply_overrides(spec.base, units, args.set)
    spec = SweepSpec(base, spec.axes, spec.outputs, spec.precision, spec.bin_width)
    return spec, doc


def cmd_point(args) -> int:
    spec, doc = _spec(args)
    spec = SweepSpec(spec.base, (), spec.outputs, spec.precision, spec.bin_width)
    rec = evaluate_point(spec, (), {})
    if not rec.ok:
        print(rec.reason, file=sys.stderr)
        return EXIT_NUMERIC
    _print({"scalars": rec.scalars, "grid": rec.grid})
    _write(args, [rec], "point", {"scenario": spec.base.to_dict(), "file": doc})
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec, doc = _spec(args)
    if not spec.axes:
        raise ConfigError("the sweep needs at least one [[sweep.axis]] table in --config")

    def progress(done, total):
        log.info("point %d/%d", done, total)

    records = run_sweep(spec, args.jobs, progress)
    failed = [r for r in records if not r.ok]
    _write(args, records, "sweep", {"scenario": spec.base.to_dict(), "file": doc})
    ok = len(records) - len(failed)
    print(f"{ok}/{len(records)} points succeeded")
    for r in failed:
        print(f"failed {r.index}: {r.reason}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_threshold(args) -> int:
    spec, doc = _spec(args)
    value = find_threshold(args.axis, args.target, spec.base, spec.precision, span=args.span)
    ideal = ideal_threshold(args.axis, args.target)
    _print({"axis": args.axis, "target": args.target, "threshold": value, "ideal_threshold": ideal})
    rec = RunRecord((), {"axis": args.axis, "target": args.target}, "ok",
                    {"threshold": value, "ideal_threshold": ideal})
    _write(args, [rec], "threshold", {"scenario": spec.base.to_dict(), "file": doc})
    return EXIT_OK


def cmd_figure(args) -> int:
    precision = args.precision or "default"
    bw = _bin_width_ps(args.bin_width) if args.bin_width else 16.0
    data = build_figure(args.name, precision, args.jobs, bw, args.hz_convention or "angular")
    _print({"figure": data.name, "records": len(data.records), "notes": data.notes})
    _write(args, data.records, data.name, {"figure": args.name, "precision": precision, "notes": data.notes},
           data.curves)
    return EXIT_PARTIAL if any(not r.ok for r in data.records) else EXIT_OK


def cmd_table1(args) -> int:
    precision = args.precision or "default"
    data = table1(precision, args.jobs)
    print(f"{'axis':<12} {'target':>6} {'threshold':>12} {'ideal':>10}")
    for r in data.records:
        value = r.scalars.get("threshold", float("nan"))
        ideal = r.scalars.get("ideal_threshold", float("nan"))
        print(f"{r.params['axis']:<12} {r.params['target']:>6.2f} {value:>12.4f} {ideal:>10.4f}  {r.reason}")
    _write(args, data.records, "table1", {"precision": precision})
    return EXIT_PARTIAL if any(not r.ok for r in data.records) else EXIT_OK


def cmd_oracle(args) -> int:
    if args.threshold:
        axis, target = args.threshold
        if axis not in AXES:
            raise ConfigError(f"unknown axis {axis!r}; choose from {AXES}")
        _print({"axis": axis, "target": float(target), "ideal_threshold": ideal_threshold(axis, float(target))})
        return EXIT_OK
    try:
        p = IdealParams(1.0, args.gamma_ratio, args.delta_omega, args.delta_tau, args.gamma_deph)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _print({"params": vars(p), "g2_ideal": ideal_g2hom(p)})
    return EXIT_OK


COMMANDS = {
    "point": cmd_point, "sweep": cmd_sweep, "threshold": cmd_threshold,
    "figure": cmd_figure, "table1": cmd_table1, "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, IoFailure) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HomSimError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
