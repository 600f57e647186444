"""Command line entry point: ``ptkr-otoc {run,sweep,oracle,scan-lambda}``."""
from __future__ import annotations

import argparse
import sys

from .experiments import PRESETS, make_config, run


def _csv_list(cast):
    return lambda text: tuple(cast(x) for x in text.split(",") if x)


def _common(p):
    p.add_argument("--out", help="output directory (default runs/<preset>)")
    p.add_argument("--check", action="store_true", help="exit nonzero unless every acceptance check passes")
    p.add_argument("--workers", type=int, help="parallel worker processes for sweep points")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. --override lam=0.5 (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptkr-otoc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a preset or a key=value config file")
    p.add_argument("target", help=f"preset ({', '.join(PRESETS)}) or config file path")
    _common(p)

    p = sub.add_parser("sweep", help="C(t_n) versus N for each m, with fitted log-log slopes")
    p.add_argument("--m", type=_csv_list(int), dest="m_values")
    p.add_argument("--N", type=_csv_list(int), dest="N_values")
    p.add_argument("--t", type=int, dest="n_kicks", help="pivot kick count")
    _common(p)

    p = sub.add_parser("oracle", help="FFT pipeline against the dense-matrix oracle")
    _common(p)

    p = sub.add_parser("scan-lambda", help="norm growth rate versus lambda")
    p.add_argument("--lambdas", type=_csv_list(float), dest="lambda_values")
    p.add_argument("--steps", type=int, dest="scan_steps")
    _common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    extra = dict(out=args.out, workers=args.workers)
    target = {"sweep": "fig1b", "oracle": "oracle", "scan-lambda": "lambda_scan"}.get(args.command)
    if args.command == "run":
        target = args.target
    for name in ("m_values", "N_values", "n_kicks", "lambda_values", "scan_steps"):
        extra[name] = getattr(args, name, None)
    if extra["out"] is None and args.command != "run":
        extra["out"] = f"runs/{args.command}"
    try:
        cfg = make_config(target, args.override, **extra)
    except (ValueError, TypeError) as exc:
        print(f"ptkr-otoc: error: {exc}", file=sys.stderr)
        return 2

    manifest = run(cfg, check=args.check)
    for c in manifest["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}")
    if not manifest["finite"]:
        print("FAIL  non-finite values in results", file=sys.stderr)
    print(f"wrote {len(manifest['files'])} file(s) and manifest.json to {cfg.out}")
    if not manifest["finite"]:
        return 1
    if args.check and not manifest["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
