"""Command line front end: ``wpt run``, ``wpt region``, ``wpt validate``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .harness import ExperimentSpec, SpecError

EXIT_OK, EXIT_SPEC, EXIT_SOLVER = 0, 2, 3


def _load(args):
    spec = ExperimentSpec.from_json(args.spec)
    if args.timing:
        spec.record_timing = True
    return spec


def _output(args, spec):
    return args.out or spec.output


def cmd_run(args) -> int:
    spec = _load(args)
    rows = harness.run_experiment(spec, seed=args.seed, threads=args.threads)
    text = harness.rows_to_json(rows) if args.format == "json" else harness.rows_to_csv(rows)
    out = _output(args, spec)
    if out:
        harness._write(out, text)
    else:
        sys.stdout.write(text)
    failed = sum(not r.converged for r in rows)
    if failed:
        logging.getLogger("wpt").warning("%d of %d solver runs hit max_iters", failed, len(rows))
        return EXIT_SOLVER
    return EXIT_OK


def cmd_region(args) -> int:
    spec = _load(args)
    pts = harness.run_region(spec, seed=args.seed)
    if args.format == "json":
        import json
        text = json.dumps([p.row() for p in pts], indent=1)
    else:
        text = harness.region_to_csv(pts)
    out = _output(args, spec)
    if out:
        harness._write(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_all
    return EXIT_OK if run_all() else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wpt", description="Multi-sine WPT waveform optimization experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (("run", cmd_run, "Monte-Carlo voltage sweep"),
                            ("region", cmd_region, "two-user voltage region")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--spec", required=True, help="experiment spec (JSON)")
        p.add_argument("--out", help="output file (default: spec.output or stdout)")
        p.add_argument("--seed", type=int, help="override the spec seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--timing", action="store_true", help="record wall time per solve (breaks byte-identical output)")
        if name == "run":
            p.add_argument("--threads", type=int, default=1, help="worker processes")
        else:
            p.add_argument("--threads", type=int, default=1, help="accepted for symmetry; region runs serially")
        p.set_defaults(func=fn)
    p = sub.add_parser("validate", help="oracle-equivalence self checks")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
