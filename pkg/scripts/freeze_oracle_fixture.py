"""Regenerate tests/fixtures/oracle_regression.json from the dense oracle.

The fixture is only ever written by this script; the stored config hash lets
the regression test notice a config edit without a regeneration.
"""
import hashlib
import json
from dataclasses import asdict
from pathlib import Path

from ptkr_otoc import SimParams
from ptkr_otoc.oracle import dense_oracle

CASES = [
    dict(params=dict(K=1.0, lam=0.0, hbar=1.0, sigma=10.0, N=32, n_kicks=1), m=1, t_n=1),
    dict(params=dict(K=1.0, lam=0.0, hbar=1.0, sigma=10.0, N=32, n_kicks=0), m=1, t_n=0),
    dict(params=dict(K=1.0, lam=0.0, hbar=1.0, sigma=10.0, N=32, n_kicks=3), m=2, t_n=3),
]


def config_hash(case) -> str:
    return hashlib.sha256(json.dumps(case, sort_keys=True).encode()).hexdigest()[:16]


def main():
    out = []
    for case in CASES:
        res = dense_oracle(SimParams(**case["params"]), case["m"], case["t_n"])
        out.append(dict(case=case, config_hash=config_hash(case), values={
            k: repr(float(v)) for k, v in asdict(res).items()}))
    path = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "oracle_regression.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(f"wrote {len(out)} fixture(s) to {path}")


if __name__ == "__main__":
    main()
