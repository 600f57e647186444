"""Forward/backward echo protocols for C(t) = -<[theta(t), p^m]^2>.

The squared commutator splits into

    C = C1 + C2 - 2 Re C3
    C1 = <psi_R| p^(2m) |psi_R>,       psi_R = U^dag(t) theta U(t) psi
    C2 = <phi_R|phi_R>,                phi_R = U^dag(t) theta U(t) p^m psi
    C3 = <psi_R| p^m |phi_R>

Each echo evolves forward with the norm pinned to that of its starting
vector, applies theta, then evolves backward with the norm pinned to
<theta^2> at the pivot.  With ``normalize=False`` the evolution is raw and the
split is an exact operator identity (useful against a dense oracle).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import fit_power_law_tail
from .observables import expectation, snapshot
from .propagator import RAW, NormPolicy, PhaseFactors, TrajectoryRecord, build_phase_factors, evolve
from .state import Grid, Rep, SimParams, WaveState, as_rep, gaussian_initial, inner, make_grid, norm_squared


@dataclass(frozen=True)
class OtocRequest:
    params: SimParams
    m: int = 1
    t_n: int = 10
    normalize: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.t_n < 0:
            raise ValueError(f"t_n must be >= 0, got {self.t_n}")


@dataclass(frozen=True, eq=False)
class Setup:
    params: SimParams
    grid: Grid
    factors: PhaseFactors
    initial: WaveState


def prepare(params: SimParams) -> Setup:
    grid = make_grid(params)
    return Setup(params, grid, build_phase_factors(grid, params), gaussian_initial(grid, params.sigma))


def apply_theta(state: WaveState, grid: Grid) -> WaveState:
    s = as_rep(state, grid, Rep.POSITION)
    return s.with_amplitudes(s.amplitudes * grid.theta)


def apply_p_power(state: WaveState, grid: Grid, m: int) -> WaveState:
    if m < 0:
        raise ValueError(f"p power must be >= 0, got {m}")
    if m == 0:
        return state
    s = as_rep(state, grid, Rep.MOMENTUM)
    return s.with_amplitudes(s.amplitudes * grid.p**m)


@dataclass(eq=False)
class Echo:
    """Everything produced by one forward / theta / backward run."""

    pivot: WaveState  # U(t) start
    perturbed: WaveState  # theta U(t) start
    perturbed_norm: float  # <theta^2> at the pivot times the pivot norm
    echoed: WaveState  # U^dag(t) theta U(t) start
    forward: TrajectoryRecord
    backward: TrajectoryRecord


def echo(start: WaveState, setup: Setup, t_n: int, normalize: bool = True,
         snapshot_at=()) -> Echo:
    grid, factors = setup.grid, setup.factors
    policy = NormPolicy.pin_to(norm_squared(start)) if normalize else RAW
    pivot, fwd = evolve(start, factors, t_n, "forward", policy, 0, snapshot_at)
    perturbed = apply_theta(pivot, grid)
    pert_norm = norm_squared(perturbed)
    policy = NormPolicy.pin_to(pert_norm) if normalize else RAW
    echoed, bwd = evolve(perturbed, factors, t_n, "backward", policy, t_n, snapshot_at)
    return Echo(pivot, perturbed, pert_norm, echoed, fwd, bwd)


def _setup_for(req: OtocRequest, setup: Setup | None) -> Setup:
    if setup is None:
        return prepare(req.params)
    if setup.params != req.params:
        raise ValueError("setup was prepared for different parameters")
    return setup


def compute_C1(req: OtocRequest, setup: Setup | None = None) -> tuple[float, Echo]:
    """C1 = <psi_R|p^(2m)|psi_R>, not divided by the norm of psi_R."""
    setup = _setup_for(req, setup)
    e = echo(setup.initial, setup, req.t_n, req.normalize)
    return norm_squared(apply_p_power(e.echoed, setup.grid, req.m)), e


def compute_C2(req: OtocRequest, setup: Setup | None = None) -> tuple[float, Echo]:
    """C2 = <phi_R|phi_R>; under pinning this equals <phi(t)|theta^2|phi(t)>."""
    setup = _setup_for(req, setup)
    start = apply_p_power(setup.initial, setup.grid, req.m)
    e = echo(start, setup, req.t_n, req.normalize)
    return norm_squared(e.echoed), e


def compute_C3(req: OtocRequest, psi_R: WaveState, phi_R: WaveState,
               setup: Setup | None = None) -> complex:
    grid = make_grid(req.params) if setup is None else _setup_for(req, setup).grid
    if psi_R.amplitudes.shape != (grid.N,) or phi_R.amplitudes.shape != (grid.N,):
        raise ValueError("echoed states do not live on the request's grid")
    u = as_rep(psi_R, grid, Rep.MOMENTUM)
    return inner(u, apply_p_power(phi_R, grid, req.m))


@dataclass(frozen=True)
class OtocPoint:
    t: int
    C: float
    C1: float
    C2: float
    ReC3: float
    ImC3: float
    backward_plateau: float  # pinned backward norm of psi_R, i.e. <psi(t)|theta^2|psi(t)>
    theta2_pivot: float  # norm-divided <theta^2> at the pivot
    mean_theta_pivot: float
    mean_p_pivot: float
    tail_exponent: float  # momentum tail of theta psi(t); nan when no window fits


def otoc_point(req: OtocRequest, setup: Setup | None = None) -> tuple[OtocPoint, Echo, Echo]:
    setup = _setup_for(req, setup)
    C1, e1 = compute_C1(req, setup)
    C2, e2 = compute_C2(req, setup)
    C3 = compute_C3(req, e1.echoed, e2.echoed, setup)
    try:
        tail = fit_power_law_tail(snapshot(e1.perturbed, setup.grid, "p")).exponent
    except ValueError:
        tail = math.nan
    point = OtocPoint(
        t=req.t_n,
        C=C1 + C2 - 2 * C3.real,
        C1=C1,
        C2=C2,
        ReC3=C3.real,
        ImC3=C3.imag,
        backward_plateau=e1.perturbed_norm,
        theta2_pivot=expectation(e1.pivot, setup.grid, "theta", 2),
        mean_theta_pivot=expectation(e1.pivot, setup.grid, "theta"),
        mean_p_pivot=expectation(e1.pivot, setup.grid, "p"),
        tail_exponent=tail,
    )
    return point, e1, e2


@dataclass
class OtocSeries:
    params: SimParams
    m: int
    points: list[OtocPoint] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(pt, name) for pt in self.points])

    @property
    def t(self):
        return self.column("t")

    @property
    def C(self):
        return self.column("C")


def compute_otoc_series(req: OtocRequest, t_values=None, setup: Setup | None = None) -> OtocSeries:
    """C(t) for every pivot t = 1..t_n, each echo recomputed from t_0."""
    setup = _setup_for(req, setup)
    if t_values is None:
        t_values = range(1, req.t_n + 1)
    series = OtocSeries(req.params, req.m)
    for t in t_values:
        sub = OtocRequest(req.params, req.m, int(t), req.normalize)
        series.points.append(otoc_point(sub, setup)[0])
    return series
