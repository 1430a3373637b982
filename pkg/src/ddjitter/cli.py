"""Command-line entry point.

    ddjitter run PLANFILE [--out DIR] [--seed U64] [--realizations N] [--workers K] [--quiet]
    ddjitter areas [--out DIR] [--alpha A]

Exit codes: 0 success, 2 plan error, 3 numerical error, 1 I/O error.  Every
failure prints exactly one line on stderr starting with ``error:<category>:``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .montecarlo import SimulationError, SweepError, run
from .output import OutputError, PlotStyle, emit_area_tables, emit_csv, emit_plot_script
from .planfile import PlanError, read_plan_file

log = logging.getLogger("ddjitter")

EXIT_OK = 0
EXIT_IO = 1
EXIT_PLAN = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("usage", message, EXIT_PLAN)


def _fail(category: str, message: str, code: int):
    text = " ".join(str(message).split())
    print(f"error:{category}: {text}", file=sys.stderr)
    raise SystemExit(code)


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ddjitter", description="Dephasing under ideal and jittered pulse sequences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="run every plan of a plan file and write CSVs")
    p_run.add_argument("planfile")
    p_run.add_argument("--out", help="output directory (overrides output.path)")
    p_run.add_argument("--seed", type=_u64, help="overrides mc.seed")
    p_run.add_argument("--realizations", type=_positive_int, help="overrides mc.realizations")
    p_run.add_argument("--workers", type=_positive_int, default=1, help="worker processes (default 1)")
    p_run.add_argument("--quiet", action="store_true")

    p_area = sub.add_parser("areas", help="tabulate spectral areas versus s and gamma")
    p_area.add_argument("--out", default="areas")
    p_area.add_argument("--alpha", type=float, default=0.1)
    p_area.add_argument("--quiet", action="store_true")
    return parser


def _cmd_run(args) -> int:
    try:
        plans, out_path = read_plan_file(args.planfile, seed=args.seed, realizations=args.realizations)
    except PlanError as exc:
        _fail("plan", exc, EXIT_PLAN)
    except OSError as exc:
        _fail("io", f"cannot read {args.planfile}: {exc.strerror or exc}", EXIT_IO)
    out_dir = Path(args.out or out_path)

    curves, failures = [], []
    for k, plan in enumerate(plans):
        log.info("plan %d/%d: %s", k + 1, len(plans), plan.describe())
        try:
            curves.append(run(plan, workers=args.workers))
        except SimulationError as exc:
            failures.append((k, exc))
    try:
        if curves:
            manifest = emit_csv(curves, out_dir)
            emit_plot_script(manifest, PlotStyle.COHERENCE_PANELS)
            log.info("wrote %d CSV file(s) and %s", len(curves), manifest)
    except OutputError as exc:
        _fail("io", exc, EXIT_IO)
    if failures:
        _fail("numerical", str(SweepError([None] * len(plans), dict(failures))), EXIT_NUMERICAL)
    return EXIT_OK


def _cmd_areas(args) -> int:
    try:
        manifest = emit_area_tables(args.out, alpha=args.alpha)
        emit_plot_script(manifest, PlotStyle.SPECTRAL_AREAS)
    except OutputError as exc:
        _fail("io", exc, EXIT_IO)
    except ValueError as exc:
        _fail("plan", exc, EXIT_PLAN)
    log.info("wrote %s", manifest)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_areas(args)


if __name__ == "__main__":
    sys.exit(main())
