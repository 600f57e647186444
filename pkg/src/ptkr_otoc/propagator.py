"""Split-operator Floquet steps for the PT-symmetric kicked rotor.

One forward period is U = exp(-i p^2 / 2hbar) exp(-i V(theta) / hbar) with
V(theta) = K [cos(theta) + i lam sin(theta)]: the kick is applied in the
position representation, then the free rotation in momentum.  The backward
step is the operator adjoint U^dagger, i.e. the conjugated free phase followed
by the conjugated kick.  For lam > 0 the conjugated kick is *not* the inverse
kick; both directions amplify around theta = pi/2.

The kick modulus exp(K lam sin(theta) / hbar) peaks at exp(K lam / hbar),
which is ~e^56 at the default parameters.  That constant is stripped from the
stored kick arrays and added to the state's log_scale instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .observables import DistributionSnapshot, expectation, snapshot
from .state import (
    Grid,
    Rep,
    SimParams,
    WaveState,
    as_rep,
    fold_scale,
    log_norm_squared,
    norm_squared,
    set_norm,
)


@dataclass(frozen=True, eq=False)
class PhaseFactors:
    grid: Grid
    kick_forward: np.ndarray
    kick_backward: np.ndarray
    free_forward: np.ndarray
    free_backward: np.ndarray
    kick_log_gain: float


def kick_potential(theta, K, lam):
    return K * (np.cos(theta) + 1j * lam * np.sin(theta))


def build_phase_factors(grid: Grid, params: SimParams) -> PhaseFactors:
    gain = params.K * params.lam / params.hbar
    # exp(-iV/hbar) = exp(-iK cos/hbar) * exp(K lam sin/hbar); the gain is kept
    # in the exponent so the peak modulus is exactly 1
    phase = -params.K * np.cos(grid.theta) / params.hbar
    log_mod = gain * (np.sin(grid.theta) - 1.0)
    kick = np.exp(log_mod + 1j * phase)
    free = np.exp(-1j * grid.p**2 / (2 * params.hbar))
    arrays = [kick, np.conj(kick), free, np.conj(free)]
    for a in arrays:
        a.setflags(write=False)
    return PhaseFactors(grid, *arrays, kick_log_gain=gain)


@dataclass(frozen=True)
class NormPolicy:
    """``target=None`` evolves raw amplitudes; otherwise <s|s> is pinned to target after every period."""

    target: float | None = None

    def __post_init__(self):
        if self.target is not None and not self.target > 0:
            raise ValueError(f"pinned norm must be positive, got {self.target}")

    @classmethod
    def pin_to(cls, target: float) -> NormPolicy:
        return cls(float(target))


RAW = NormPolicy()


def _apply(state: WaveState, factors: PhaseFactors, policy: NormPolicy, forward: bool):
    grid = factors.grid
    if forward:
        s = as_rep(state, grid, Rep.POSITION)
        s = s.with_amplitudes(s.amplitudes * factors.kick_forward,
                              log_scale=s.log_scale + factors.kick_log_gain)
        s = as_rep(s, grid, Rep.MOMENTUM)
        s = s.with_amplitudes(s.amplitudes * factors.free_forward)
    else:
        s = as_rep(state, grid, Rep.MOMENTUM)
        s = s.with_amplitudes(s.amplitudes * factors.free_backward)
        s = as_rep(s, grid, Rep.POSITION)
        s = s.with_amplitudes(s.amplitudes * factors.kick_backward,
                              log_scale=s.log_scale + factors.kick_log_gain)
    log_norm = log_norm_squared(s)
    if not math.isfinite(log_norm):
        raise FloatingPointError("non-finite or vanishing state after a Floquet step")
    if policy.target is None:
        s = fold_scale(s)
    else:
        s = set_norm(s, policy.target)
    return s, log_norm


def step_forward(state: WaveState, factors: PhaseFactors, policy: NormPolicy = RAW) -> WaveState:
    return _apply(state, factors, policy, True)[0]


def step_backward(state: WaveState, factors: PhaseFactors, policy: NormPolicy = RAW) -> WaveState:
    return _apply(state, factors, policy, False)[0]


@dataclass
class TrajectoryRecord:
    """Per-time-label observables; index k is the state after k steps.

    ``log_norm`` is log<s|s> before the policy rescale, ``norm`` is <s|s> after
    it.  Expectations are norm-divided.
    """

    direction: str
    t: np.ndarray
    log_norm: np.ndarray
    norm: np.ndarray
    mean_theta: np.ndarray
    mean_p: np.ndarray
    snapshots: list[DistributionSnapshot] = field(default_factory=list)

    @property
    def log_norm_increments(self) -> np.ndarray:
        return np.diff(self.log_norm)


def evolve(state: WaveState, factors: PhaseFactors, n_steps: int, direction: str = "forward",
           policy: NormPolicy = RAW, t_start: int = 0,
           snapshot_at=()) -> tuple[WaveState, TrajectoryRecord]:
    """Apply ``n_steps`` periods and record observables at every time label.

    Forward labels run t_start, t_start+1, ...; backward labels count down.
    ``snapshot_at`` selects time labels at which both distributions are kept.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    forward = direction == "forward"
    grid = factors.grid
    sign = 1 if forward else -1
    wanted = set(snapshot_at)

    ts, log_norms, norms, thetas, ps, snaps = [], [], [], [], [], []

    def record(s, t, ln):
        ts.append(t)
        log_norms.append(ln)
        norms.append(norm_squared(s))
        thetas.append(expectation(s, grid, "theta"))
        ps.append(expectation(s, grid, "p"))
        if t in wanted:
            for axis in ("theta", "p"):
                snaps.append(snapshot(s, grid, axis, t=t, direction=direction))

    s = state
    record(s, t_start, log_norm_squared(s))
    for k in range(1, n_steps + 1):
        s, ln = _apply(s, factors, policy, forward)
        record(s, t_start + sign * k, ln)
    traj = TrajectoryRecord(direction, np.array(ts), np.array(log_norms), np.array(norms),
                            np.array(thetas), np.array(ps), snaps)
    return s, traj
