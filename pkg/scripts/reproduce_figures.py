"""Run every figure preset into runs/ and print the check lines.

    python scripts/reproduce_figures.py [--workers 4] [--only fig1a fig2]
"""
import argparse

from ptkr_otoc.experiments import PRESETS, make_config, run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", nargs="*", default=list(PRESETS))
    parser.add_argument("--root", default="runs")
    args = parser.parse_args()

    failed = 0
    for name in args.only:
        cfg = make_config(name, out=f"{args.root}/{name}", workers=args.workers)
        manifest = run(cfg, check=True)
        print(f"[{name}] -> {cfg.out}")
        for c in manifest["checks"]:
            print(f"  {'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}")
        failed += not manifest["passed"]
    print(f"{len(args.only) - failed}/{len(args.only)} presets passed their checks")


if __name__ == "__main__":
    main()
