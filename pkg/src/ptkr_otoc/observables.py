"""Norm-divided expectation values and probability snapshots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import Grid, Rep, WaveState, as_rep


def expectation(state: WaveState, grid: Grid, which: str, power: int = 1) -> float:
    """<Q> = <s|Q|s> / <s|s> for Q = theta**power or p**power.

    Dividing by the running norm removes the norm's contribution, so the
    value is blind to log_scale and to any global rescaling.
    """
    if which == "theta":
        a = as_rep(state, grid, Rep.POSITION).amplitudes
        axis = grid.theta
    elif which == "p":
        a = as_rep(state, grid, Rep.MOMENTUM).amplitudes
        axis = grid.p
    else:
        raise ValueError(f"unknown observable {which!r}; use 'theta' or 'p'")
    w = a.real**2 + a.imag**2
    total = w.sum()
    if total == 0.0:
        raise ValueError("expectation value of a zero state")
    return float(np.dot(w, axis**power) / total)


@dataclass(frozen=True, eq=False)
class DistributionSnapshot:
    axis: str  # "theta" or "p"
    values: np.ndarray
    probabilities: np.ndarray
    normalized: bool = True
    t: int = 0
    direction: str = "forward"

    @property
    def peak_index(self) -> int:
        return int(np.argmax(self.probabilities))


def snapshot(state: WaveState, grid: Grid, axis: str = "p", normalized: bool = True,
             t: int = 0, direction: str = "forward") -> DistributionSnapshot:
    if axis == "theta":
        a = as_rep(state, grid, Rep.POSITION).amplitudes
        values = grid.theta
    elif axis == "p":
        a = as_rep(state, grid, Rep.MOMENTUM).amplitudes
        values = grid.p
    else:
        raise ValueError(f"axis must be 'theta' or 'p', got {axis!r}")
    prob = a.real**2 + a.imag**2
    if normalized:
        prob = prob / prob.sum()
    else:
        prob = prob * np.exp(2 * state.log_scale)
    return DistributionSnapshot(axis, values, prob, normalized, t, direction)
