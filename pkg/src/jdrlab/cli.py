"""Command-line interface: sweep the library and emit tables, figures, reports.

Subcommands: pie-curves, ber-curves, jdr2-gain, theorem-one, design-point,
self-check. Tables go to --out (or stdout) as CSV or JSON; the curve commands
also render a PNG figure next to the data file unless --no-plot is given.

Exit codes: 0 success, 2 configuration error, 3 numerical-convergence or
self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import plots, sweeps
from .exceptions import ConfigError, ConvergenceError
from .sweeps import SweepConfig, Table

_DEFAULTS = SweepConfig()


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12e")
    return str(value)


def serialize_csv(table: Table) -> str:
    """CSV with a header row, '.' decimals and >= 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def serialize_json(table: Table) -> str:
    """JSON matching the shipped schema (schemas/table.schema.json)."""
    payload = {
        "command": table.command,
        "parameters": table.parameters,
        "columns": list(table.columns),
        "rows": [list(row) for row in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _emit(table: Table, fmt: str, out: str | None, no_plot: bool = False) -> None:
    text = serialize_csv(table) if fmt == "csv" else serialize_json(table)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    if not no_plot:
        plots.render(table, path.with_suffix(".png"))


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output file (default stdout)")


def _add_grid_args(parser: argparse.ArgumentParser, nbar_min: float,
                   nbar_max: float) -> None:
    parser.add_argument("--nbar-min", type=float, default=nbar_min,
                        help=f"grid lower edge (default {nbar_min})")
    parser.add_argument("--nbar-max", type=float, default=nbar_max,
                        help=f"grid upper edge (default {nbar_max})")
    parser.add_argument("--points-per-decade", type=int,
                        default=_DEFAULTS.points_per_decade,
                        help=f"grid density (default {_DEFAULTS.points_per_decade})")
    parser.add_argument("--seed", type=int, default=_DEFAULTS.seed,
                        help="seed for any Monte Carlo columns")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip the PNG figure next to --out")
    _add_output_args(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jdrlab",
        description="Coherent-state channel capacities and structured "
                    "joint-detection receivers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pie-curves",
                       help="photon-information-efficiency curves vs nbar")
    _add_grid_args(p, _DEFAULTS.nbar_min, _DEFAULTS.nbar_max)
    p.add_argument("--l-max", type=int, default=_DEFAULTS.l_max,
                   help="largest Hadamard code order for the envelope")

    p = sub.add_parser("ber-curves",
                       help="bit-error-rate curves for the Hadamard butterfly receiver")
    _add_grid_args(p, _DEFAULTS.nbar_min, _DEFAULTS.nbar_max)
    p.add_argument("--l", type=int, default=_DEFAULTS.l,
                   help=f"Hadamard code order (default {_DEFAULTS.l})")
    p.add_argument("--frames", type=int, default=_DEFAULTS.frames,
                   help="Monte Carlo frames per grid point")
    p.add_argument("--include-dr-ml", action="store_true",
                   help="add the symbol-by-symbol + ML-decoding Monte Carlo "
                        "column (slow at large --l and --frames)")

    p = sub.add_parser("jdr2-gain",
                       help="two-symbol superadditive gain over the best "
                            "single-symbol receiver")
    _add_grid_args(p, 1e-3, 1.0)

    p = sub.add_parser("theorem-one",
                       help="verify the joint measurement factors into a codeword "
                            "unitary plus per-symbol measurements")
    p.add_argument("--n", type=int, default=2, help="codeword length")
    p.add_argument("--k", type=int, default=3, help="codebook size")
    p.add_argument("--nbar", type=float, default=1.0,
                   help="mean photon number per symbol")
    p.add_argument("--trials", type=int, default=1, help="random codebooks to test")
    p.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    _add_output_args(p)

    p = sub.add_parser("design-point", help="photon flux and bit rate of a link")
    p.add_argument("--pie", type=float, default=10.0,
                   help="photon information efficiency, bits/photon")
    p.add_argument("--power-watts", type=float, default=3.4e-12,
                   help="received optical power")
    p.add_argument("--wavelength-m", type=float, default=1.55e-6,
                   help="carrier wavelength")
    _add_output_args(p)

    p = sub.add_parser("self-check", help="run the oracle suite")
    _add_output_args(p)

    return parser


def _sweep_config(args: argparse.Namespace, **overrides) -> SweepConfig:
    values = {
        "nbar_min": args.nbar_min,
        "nbar_max": args.nbar_max,
        "points_per_decade": args.points_per_decade,
        "seed": args.seed,
        "output_format": args.format,
    }
    values.update(overrides)
    return SweepConfig(**values)


def _run_pie(args) -> int:
    cfg = _sweep_config(args, l_max=args.l_max)
    _emit(sweeps.pie_table(cfg), args.format, args.out, args.no_plot)
    return 0


def _run_ber(args) -> int:
    cfg = _sweep_config(args, l=args.l, frames=args.frames)
    table = sweeps.ber_table(cfg, include_dr_ml=args.include_dr_ml)
    _emit(table, args.format, args.out, args.no_plot)
    return 0


def _run_jdr2(args) -> int:
    cfg = _sweep_config(args)
    _emit(sweeps.jdr2_gain_table(cfg), args.format, args.out, args.no_plot)
    return 0


def _run_theorem(args) -> int:
    table = sweeps.theorem_table(args.n, args.k, nbar=args.nbar, seed=args.seed,
                                 trials=args.trials)
    _emit(table, args.format, args.out)
    return 0


def _run_design(args) -> int:
    table = sweeps.design_table(args.pie, args.power_watts, args.wavelength_m)
    _emit(table, args.format, args.out)
    return 0


def _run_self_check(args) -> int:
    table, all_ok = sweeps.self_check()
    for name, status, detail in table.rows:
        print(f"{status:>4}  {name}: {detail}")
    if args.out is not None:
        _emit(table, args.format, args.out)
    return 0 if all_ok else 3


_HANDLERS = {
    "pie-curves": _run_pie,
    "ber-curves": _run_ber,
    "jdr2-gain": _run_jdr2,
    "theorem-one": _run_theorem,
    "design-point": _run_design,
    "self-check": _run_self_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"jdrlab: configuration error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"jdrlab: convergence failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
