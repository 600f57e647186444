"""Figure-reproduction presets, sweeps and their on-disk output.

Trajectory, distribution and lambda-scan runs use the single dimension ``N``;
the OTOC, sweep, C3 and oracle runs loop over ``N_values``.

A run writes ``series.csv`` (plus ``snapshots/*.csv`` for distribution runs)
and then ``manifest.json``, which is written last and atomically.  Every
default is the reference operating point K=2π, λ=0.9, ħ=0.1, σ=10, N=2¹³.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import hashlib
import io
import json
import math
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, checks
from . import analysis
from .analysis import broken_phase, fit_power_law_tail, norm_growth_scan, predict
from .observables import snapshot
from .oracle import dense_oracle
from .otoc import OtocRequest, echo, otoc_point, prepare
from .state import SimParams

KINDS = ("otoc_series", "scaling_sweep", "trajectory", "distributions", "c3_scaling", "lambda_scan", "oracle")
ETA_REFERENCE = 6.05e-7


@dataclass
class RunConfig:
    kind: str = "otoc_series"
    K: float = 2 * math.pi
    lam: float = 0.9
    hbar: float = 0.1
    sigma: float = 10.0
    N: int = 2**13
    n_kicks: int = 10
    m_values: tuple = (1, 2, 3)
    N_values: tuple = (2**13,)
    pivots: tuple = ()  # empty means 1..n_kicks
    lambda_values: tuple = tuple(round(0.1 * k, 1) for k in range(13))
    scan_steps: int = 40
    eta: float = ETA_REFERENCE
    out: str = "runs/default"
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {', '.join(KINDS)}")
        for name in ("m_values", "N_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.params(self.N)  # validates the physical constants

    def params(self, N: int | None = None, lam: float | None = None) -> SimParams:
        return SimParams(K=self.K, lam=self.lam if lam is None else lam, hbar=self.hbar,
                         sigma=self.sigma, N=self.N if N is None else N, n_kicks=self.n_kicks)

    @property
    def pivot_times(self) -> tuple:
        return tuple(self.pivots) or tuple(range(1, self.n_kicks + 1))


PRESETS = {
    "fig1a": dict(kind="otoc_series", m_values=(1, 2, 3), N_values=(2**13,)),
    "fig1b": dict(kind="scaling_sweep", m_values=(1, 2, 3), N_values=tuple(2**k for k in range(10, 15))),
    "fig2": dict(kind="trajectory", m_values=(1,)),
    "fig3": dict(kind="distributions", m_values=(1, 2, 3)),
    "fig4": dict(kind="otoc_series", m_values=(1, 2, 3), N_values=(2**13,)),
    "fig6": dict(kind="c3_scaling", m_values=(1, 2, 3), N_values=tuple(2**k for k in range(10, 15))),
    "lambda_scan": dict(kind="lambda_scan", N=1024),
    "oracle": dict(kind="oracle", K=1.0, lam=0.0, hbar=1.0, N=32, N_values=(32,), n_kicks=3, m_values=(1, 2)),
}


# ---------------------------------------------------------------- config I/O

def _coerce(f: dataclasses.Field, text: str):
    default = f.default
    if isinstance(default, tuple):
        parts = [x for x in text.replace(" ", "").split(",") if x]
        elem = type(default[0]) if default else int
        if f.name == "lambda_values":
            elem = float
        return tuple(elem(x) for x in parts)
    if isinstance(default, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def parse_settings(pairs) -> dict:
    """``key=value`` strings to typed RunConfig keyword arguments."""
    by_name = {f.name: f for f in fields(RunConfig)}
    by_name["lambda"] = by_name["lam"]
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"expected key=value, got {pair!r}")
        key, value = (x.strip() for x in pair.split("=", 1))
        if key == "preset":
            out["preset"] = value
            continue
        if key not in by_name:
            raise ValueError(f"unknown setting {key!r}")
        f = by_name[key]
        out[f.name] = _coerce(f, value)
    return out


def read_config_file(path) -> dict:
    lines = Path(path).read_text().splitlines()
    pairs = [ln.split("#", 1)[0].strip() for ln in lines]
    return parse_settings(p for p in pairs if p)


def make_config(name_or_path: str, overrides=(), **extra) -> RunConfig:
    """Preset name or flat key=value file, then ``overrides`` on top."""
    if name_or_path in PRESETS:
        settings = dict(PRESETS[name_or_path])
        settings.setdefault("out", f"runs/{name_or_path}")
    elif os.path.isfile(name_or_path):
        settings = read_config_file(name_or_path)
        base = settings.pop("preset", None)
        if base is not None:
            if base not in PRESETS:
                raise ValueError(f"unknown preset {base!r}")
            settings = {**PRESETS[base], **settings}
        settings.setdefault("out", f"runs/{Path(name_or_path).stem}")
    else:
        raise ValueError(f"{name_or_path!r} is neither a preset ({', '.join(PRESETS)}) nor a config file")
    settings.update({k: v for k, v in extra.items() if v is not None})
    settings.update(parse_settings(overrides))
    settings.pop("preset", None)
    return RunConfig(**settings)


# ---------------------------------------------------------------- CSV output

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


@dataclass
class Result:
    columns: list
    rows: list
    checks: list = field(default_factory=list)
    extra_files: dict = field(default_factory=dict)  # relative path -> text
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------- experiments

OTOC_COLUMNS = ["t", "m", "N", "C", "C1", "C2", "ReC3", "norm", "mean_theta", "mean_p", "tail_exponent",
                "C_pred", "C1_pred", "C2_pred", "C3_pred"]


def _otoc_job(args):
    cfg, m, N, times = args
    setup = prepare(cfg.params(N))
    rows = []
    for t in times:
        pt = otoc_point(OtocRequest(setup.params, m, t), setup)[0]
        rows.append(dict(
            t=t, m=m, N=N, C=pt.C, C1=pt.C1, C2=pt.C2, ReC3=pt.ReC3,
            norm=pt.backward_plateau, mean_theta=pt.mean_theta_pivot, mean_p=pt.mean_p_pivot,
            tail_exponent=pt.tail_exponent,
            C_pred=predict("C", N, m), C1_pred=predict("C1", N, m),
            C2_pred=predict("C2", N, m, cfg.sigma, cfg.hbar),
            C3_pred=predict("C3", N, m, eta=cfg.eta),
        ))
    return rows


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _otoc_rows(cfg, times):
    jobs = [(cfg, m, N, tuple(times)) for N in cfg.N_values for m in cfg.m_values]
    return [row for rows in _map(_otoc_job, jobs, cfg.workers) for row in rows]


def run_otoc_series(cfg: RunConfig) -> Result:
    rows = _otoc_rows(cfg, cfg.pivot_times)
    res = Result(OTOC_COLUMNS, rows)
    last = max(cfg.pivot_times)
    for N in cfg.N_values:
        final = {r["m"]: r for r in rows if r["N"] == N and r["t"] == last}
        res.checks.append(checks.main_scaling({m: r["C"] for m, r in final.items()}, N))
        res.checks.append(checks.c2_plateau({m: r["C2"] for m, r in final.items()}, cfg.sigma, cfg.hbar))
    return res


def run_scaling_sweep(cfg: RunConfig) -> Result:
    rows = _otoc_rows(cfg, (cfg.n_kicks,))
    Ns = list(cfg.N_values)
    by_m = {m: [r["C"] for r in rows if r["m"] == m] for m in cfg.m_values}
    res = Result(OTOC_COLUMNS, rows)
    if len(Ns) >= 2:
        slopes = [dict(m=m, slope=checks.loglog_slope(Ns, Cs), expected=2 * m - 1) for m, Cs in by_m.items()]
        res.extra_files["slopes.csv"] = csv_text(["m", "slope", "expected"], slopes)
        res.summary["slopes"] = {str(s["m"]): s["slope"] for s in slopes}
        res.checks.append(checks.scaling_exponent(Ns, by_m))
    return res


def run_c3_scaling(cfg: RunConfig) -> Result:
    rows = _otoc_rows(cfg, (cfg.n_kicks,))
    Ns = list(cfg.N_values)
    res = Result(OTOC_COLUMNS, rows)
    col = lambda m, k: [r[k] for r in rows if r["m"] == m]  # noqa: E731
    for m in cfg.m_values:
        if m % 2 == 0 and len(Ns) >= 2:
            res.summary[f"eta_fit_m{m}"] = float(np.polyfit(np.array(Ns, float) ** (m - 1), col(m, "ReC3"), 1)[0])
    if {1, 2} <= set(cfg.m_values) and len(Ns) >= 2:
        res.checks.append(checks.c3_parity(Ns, col(1, "ReC3"), col(1, "C1"), col(2, "ReC3")))
    return res


TRAJ_COLUMNS = ["direction", "t", "log_norm", "norm", "mean_theta", "mean_p"]


def run_trajectory(cfg: RunConfig) -> Result:
    setup = prepare(cfg.params(cfg.N))
    e = echo(setup.initial, setup, cfg.n_kicks)
    rows = []
    for tr in (e.forward, e.backward):
        for k in range(len(tr.t)):
            rows.append(dict(direction=tr.direction, t=tr.t[k], log_norm=tr.log_norm[k],
                             norm=tr.norm[k], mean_theta=tr.mean_theta[k], mean_p=tr.mean_p[k]))
    return Result(TRAJ_COLUMNS, rows, [
        checks.directed_current(e.forward.mean_p, e.backward.t, e.backward.mean_p, cfg.K),
        checks.theta_localization(e.forward.mean_theta, e.perturbed_norm),
    ])


def _snapshot_csv(snap) -> str:
    rows = [dict(value=v, probability=q) for v, q in zip(snap.values, snap.probabilities)]
    return csv_text(["value", "probability"], rows)


def run_distributions(cfg: RunConfig) -> Result:
    """Snapshots along the echo of psi, theta psi at the pivot, and psi_R / phi_R at t_0."""
    from .otoc import apply_p_power

    n = cfg.n_kicks
    marks = sorted({0, n // 2, n})
    setup = prepare(cfg.params(cfg.N))
    files, rows = {}, []

    def add(name, snap, fit=False):
        files[f"snapshots/{name}.csv"] = _snapshot_csv(snap)
        row = dict(name=name, axis=snap.axis, t=snap.t, direction=snap.direction,
                   p_c=math.nan, tail_exponent=math.nan, residual=math.nan)
        if fit:
            try:
                f = fit_power_law_tail(snap)
                row.update(p_c=f.p_c, tail_exponent=f.exponent, residual=f.residual)
            except ValueError:
                pass
        rows.append(row)

    e = echo(setup.initial, setup, n, snapshot_at=marks)
    for tr in (e.forward, e.backward):
        for s in tr.snapshots:
            add(f"psi_{s.direction}_t{s.t}_{s.axis}", s, fit=s.axis == "p" and s.direction == "backward")
    pert_p = snapshot(e.perturbed, setup.grid, "p", t=n, direction="pivot")
    add(f"theta_psi_t{n}_p", pert_p, fit=True)
    add(f"psi_t{n}_p", snapshot(e.pivot, setup.grid, "p", t=n, direction="pivot"))
    for m in cfg.m_values:
        e2 = echo(apply_p_power(setup.initial, setup.grid, m), setup, n, snapshot_at=marks)
        for s in e2.forward.snapshots:
            if s.axis == "theta":
                add(f"phi_m{m}_forward_t{s.t}_theta", s)
        for axis in ("theta", "p"):
            add(f"psiR_m{m}_t0_{axis}", snapshot(e.echoed, setup.grid, axis, t=0, direction="backward"),
                fit=axis == "p")
            add(f"phiR_m{m}_t0_{axis}", snapshot(e2.echoed, setup.grid, axis, t=0, direction="backward"),
                fit=axis == "p")
    columns = ["name", "axis", "t", "direction", "p_c", "tail_exponent", "residual"]
    fit = next(r for r in rows if r["name"] == f"theta_psi_t{n}_p")
    return Result(columns, rows, [checks.tail_exponent(fit["tail_exponent"])], files)


def run_lambda_scan(cfg: RunConfig) -> Result:
    table = norm_growth_scan(cfg.params(cfg.N), cfg.lambda_values, cfg.scan_steps)
    rates = table[:, 1]
    rows = [dict(lam=lam, growth_rate=rate, broken=b) for (lam, rate), b in zip(table, broken_phase(rates))]
    ok = bool(np.all(np.diff(rates) >= -1e-9))
    detail = f"rates from {rates.min():.3g} to {rates.max():.3g} per kick, monotone={ok}"
    if 0.0 in cfg.lambda_values:
        r0 = rates[list(cfg.lambda_values).index(0.0)]
        ok &= abs(r0) < 1e-10
        detail += f", rate at lam=0: {r0:.2g}"
    return Result(["lam", "growth_rate", "broken"], rows, [checks.Check("norm growth scan", ok, detail)])


ORACLE_COLUMNS = ["m", "t", "N", "C", "C1", "C2", "ReC3", "oracle_C", "oracle_C1", "oracle_C2", "oracle_ReC3",
                  "oracle_C_commutator", "max_rel_err"]


def run_oracle(cfg: RunConfig) -> Result:
    rows, triples = [], []
    for N in cfg.N_values:
        params = cfg.params(N)
        setup = prepare(params)
        for m in cfg.m_values:
            for t in range(0, cfg.n_kicks + 1):
                pt = otoc_point(OtocRequest(params, m, t, normalize=False), setup)[0]
                orc = dense_oracle(params, m, t)
                err = max(checks.relative_error(getattr(pt, k), getattr(orc, k)) for k in ("C", "C1", "C2", "ReC3"))
                rows.append(dict(m=m, t=t, N=N, C=pt.C, C1=pt.C1, C2=pt.C2, ReC3=pt.ReC3,
                                 oracle_C=orc.C, oracle_C1=orc.C1, oracle_C2=orc.C2, oracle_ReC3=orc.ReC3,
                                 oracle_C_commutator=orc.C_commutator, max_rel_err=err))
                triples.append(((m, t, N), pt, orc))
    return Result(ORACLE_COLUMNS, rows, [checks.oracle_agreement(triples)])


RUNNERS = {
    "otoc_series": run_otoc_series,
    "scaling_sweep": run_scaling_sweep,
    "trajectory": run_trajectory,
    "distributions": run_distributions,
    "c3_scaling": run_c3_scaling,
    "lambda_scan": run_lambda_scan,
    "oracle": run_oracle,
}

OWNED = ("series.csv", "slopes.csv", "manifest.json")


# columns that are legitimately nan when a fit or mode does not apply
OPTIONAL = {"tail_exponent", "p_c", "residual", "oracle_C_commutator"}


def _all_finite(rows) -> bool:
    for row in rows:
        for k, v in row.items():
            if isinstance(v, (float, np.floating)) and not math.isfinite(v) and k not in OPTIONAL:
                return False
    return True


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run(cfg: RunConfig, check: bool = False) -> dict:
    """Execute one experiment, write its files and return the manifest dict."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in OWNED:
        (out / name).unlink(missing_ok=True)
    shutil.rmtree(out / "snapshots", ignore_errors=True)

    res = RUNNERS[cfg.kind](cfg)
    files = {"series.csv": csv_text(res.columns, res.rows), **res.extra_files}
    index = []
    for rel, text in sorted(files.items()):
        _write(out / rel, text)
        index.append(dict(path=rel, sha256=hashlib.sha256(text.encode()).hexdigest(), bytes=len(text.encode())))

    finite = _all_finite(res.rows)
    passed = finite and all(c.passed for c in res.checks)
    manifest = dict(
        config=dataclasses.asdict(cfg),
        version=__version__,
        started=started,
        finished=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        files=index,
        tolerances={k: v for k, v in checks.TOLERANCES.items()},
        summary=res.summary,
        finite=finite,
        checks=[dict(name=c.name, passed=c.passed, detail=c.detail) for c in res.checks],
        checked=check,
        passed=passed,
        tail_fit_window=dict(core_cells=analysis.CORE_CELLS, floor=analysis.FLOOR,
                             min_points=analysis.MIN_POINTS, max_reach="quarter period from p_c"),
    )
    _write(out / "manifest.json", json.dumps(manifest, indent=2, default=_fmt) + "\n")
    return manifest
