"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ptkr_otoc import OtocRequest, SimParams, fit_power_law_tail, otoc_point, prepare, snapshot
from ptkr_otoc import checks
from ptkr_otoc.experiments import make_config, run
from ptkr_otoc.oracle import dense_oracle

SWEEP_N = (2**10, 2**11, 2**12, 2**13, 2**14)
M_VALUES = (1, 2, 3)
T_PIVOT = 10


def report(number: int, check: checks.Check):
    line = f"[{number:2d}] {check.line()}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert check.passed, line


@pytest.fixture(scope="module")
def sweep():
    """OtocPoint at t_10 for every (N, m) of the scaling sweep."""
    out = {}
    for N in SWEEP_N:
        setup = prepare(SimParams(N=N))
        for m in M_VALUES:
            out[N, m] = otoc_point(OtocRequest(setup.params, m, T_PIVOT), setup)[0]
    return out


def test_criterion_01_main_scaling_law(sweep):
    report(1, checks.main_scaling({m: sweep[2**13, m].C for m in M_VALUES}, 2**13))


def test_criterion_02_scaling_exponent(sweep):
    report(2, checks.scaling_exponent(SWEEP_N, {m: [sweep[N, m].C for N in SWEEP_N] for m in M_VALUES}))


def test_criterion_03_directed_current(ref_echo, ref_params):
    e = ref_echo
    report(3, checks.directed_current(e.forward.mean_p, e.backward.t, e.backward.mean_p, ref_params.K))


def test_criterion_04_theta_localization(ref_echo):
    report(4, checks.theta_localization(ref_echo.forward.mean_theta, ref_echo.perturbed_norm))


def test_criterion_05_power_law_tail(ref_echo, ref_setup):
    fit = fit_power_law_tail(snapshot(ref_echo.perturbed, ref_setup.grid, "p"))
    report(5, checks.tail_exponent(fit.exponent))


def test_criterion_06_C2_plateau(sweep):
    report(6, checks.c2_plateau({m: sweep[2**13, m].C2 for m in M_VALUES}))


def test_criterion_07_C3_parity(sweep):
    report(7, checks.c3_parity(
        SWEEP_N,
        [sweep[N, 1].ReC3 for N in SWEEP_N],
        [sweep[N, 1].C1 for N in SWEEP_N],
        [sweep[N, 2].ReC3 for N in SWEEP_N],
    ))


def test_criterion_08_oracle_equivalence():
    rows = []
    for m in (1, 2):
        for t in range(0, 4):
            p = SimParams(K=1.0, lam=0.0, hbar=1.0, N=32)
            pt = otoc_point(OtocRequest(p, m, t, normalize=False))[0]
            rows.append(((m, t), pt, dense_oracle(p, m, t)))
            p = SimParams(lam=0.0, N=32)  # the default K and hbar on the same grid
            pt = otoc_point(OtocRequest(p, m, t, normalize=False))[0]
            rows.append(((m, t), pt, dense_oracle(p, m, t)))
    report(8, checks.oracle_agreement(rows))


def test_criterion_09_numerical_hygiene():
    report(9, checks.numerical_hygiene(N=256, steps=100))


def test_criterion_10_determinism(tmp_path):
    same, detail = True, []
    for preset in ("fig1a", "fig2", "fig3"):
        texts = []
        for k in range(2):
            out = tmp_path / f"{preset}_{k}"
            manifest = run(make_config(preset, out=str(out)))
            texts.append({f["path"]: (out / f["path"]).read_bytes() for f in manifest["files"]})
        ok = texts[0] == texts[1]
        same &= ok
        detail.append(f"{preset}: {len(texts[0])} file(s) {'identical' if ok else 'DIFFER'}")
    report(10, checks.Check("determinism", same, "; ".join(detail)))
