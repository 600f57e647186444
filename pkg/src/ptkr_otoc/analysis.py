"""Tail fits, closed-form scaling predictions and the norm-growth scan."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .observables import DistributionSnapshot
from .propagator import RAW, build_phase_factors, evolve
from .state import SimParams, gaussian_initial, make_grid

THETA_C = math.pi / 2

# tail-fit window: skip this many cells past the peak, stop where the
# probability drops below FLOOR * peak, and stay within a quarter period of
# p_c so the periodic image of the peak does not bend the tail
CORE_CELLS = 4
FLOOR = 1e-12
MIN_POINTS = 8
# log-log RMS residual above which a fit is not called a power law
POWER_LAW_RESIDUAL = 0.1


@dataclass(frozen=True)
class PowerLawFit:
    p_c: float
    exponent: float
    fit_window: tuple[tuple[int, int], ...]  # half-open index ranges, one per fitted side
    residual: float
    side_exponents: tuple[float, ...]

    @property
    def is_power_law(self) -> bool:
        return self.residual < POWER_LAW_RESIDUAL


def _peak_center(values, prob, k):
    if 0 < k < len(prob) - 1:
        a, b, c = prob[k - 1], prob[k], prob[k + 1]
        denom = a - 2 * b + c
        if denom < 0:
            shift = 0.5 * (a - c) / denom
            return values[k] + float(np.clip(shift, -0.5, 0.5)) * (values[k + 1] - values[k])
    return float(values[k])


def fit_power_law_tail(dist: DistributionSnapshot, core_cells: int = CORE_CELLS,
                       floor: float = FLOOR, min_points: int = MIN_POINTS) -> PowerLawFit:
    """Least-squares slope of log P against log|p - p_c| on the decaying side(s).

    Sides with at least ``min_points`` usable cells are fitted separately and
    their exponents averaged.
    """
    values = np.asarray(dist.values, dtype=float)
    prob = np.asarray(dist.probabilities, dtype=float)
    k = int(np.argmax(prob))
    peak = prob[k]
    if not peak > 0:
        raise ValueError("distribution has no positive peak")
    p_c = _peak_center(values, prob, k)
    span = values[-1] - values[0] + (values[1] - values[0])
    reach = span / 4

    windows, slopes, residuals = [], [], []
    for step in (1, -1):
        idx = []
        i = k + step * core_cells
        while 0 <= i < len(prob) and prob[i] >= floor * peak and abs(values[i] - p_c) <= reach:
            idx.append(i)
            i += step
        if len(idx) < min_points:
            continue
        idx = np.array(idx)
        x = np.log(np.abs(values[idx] - p_c))
        y = np.log(prob[idx])
        slope, intercept = np.polyfit(x, y, 1)
        residuals.append(y - (slope * x + intercept))
        slopes.append(float(slope))
        lo, hi = int(idx.min()), int(idx.max()) + 1
        windows.append((lo, hi))
    if not slopes:
        raise ValueError(f"tail window holds fewer than {min_points} points on both sides")
    resid = float(np.sqrt(np.mean(np.concatenate(residuals) ** 2)))
    return PowerLawFit(p_c, float(np.mean(slopes)), tuple(windows), resid, tuple(slopes))


def double_factorial(k: int) -> int:
    """k!! with (-1)!! = 0!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    return math.prod(range(k, 0, -2))


def gaussian_p_moment(m: int, sigma: float, hbar: float) -> float:
    """<p^(2m)> of the initial Gaussian: (2m-1)!! / (2 alpha)^m with alpha = 1/(sigma hbar^2)."""
    alpha = 1.0 / (sigma * hbar**2)
    return double_factorial(2 * m - 1) / (2**m * alpha**m)


def predict(kind: str, N: int, m: int, sigma: float = 10.0, hbar: float = 0.1,
            eta: float | None = None) -> float:
    """Closed-form scaling values for C, C1, C2 and C3."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if kind in ("C", "C1"):
        return float(N) ** (2 * m - 1) * THETA_C**2
    if kind == "C2":
        return THETA_C**2 * gaussian_p_moment(m, sigma, hbar)
    if kind == "C3":
        if m % 2:
            return 0.0
        if eta is None:
            raise ValueError("C3 prediction for even m needs the prefactor eta")
        return eta * float(N) ** (m - 1)
    raise ValueError(f"unknown prediction kind {kind!r}")


def growth_rate(log_norm: np.ndarray, transient: int = 2) -> float:
    """Slope of log-norm per kick over the last half of the record, after the transient."""
    t = np.arange(len(log_norm))
    start = max(transient, len(log_norm) // 2)
    if len(log_norm) - start < 2:
        raise ValueError("record too short for a growth-rate fit")
    return float(np.polyfit(t[start:], log_norm[start:], 1)[0])


def norm_growth_scan(params: SimParams, lambdas, n_steps: int = 40,
                     transient: int = 2) -> np.ndarray:
    """Rows of (lam, growth rate of log<psi|psi> per kick) under raw evolution."""
    rows = []
    for lam in lambdas:
        p = replace(params, lam=float(lam))
        grid = make_grid(p)
        factors = build_phase_factors(grid, p)
        _, traj = evolve(gaussian_initial(grid, p.sigma), factors, n_steps, "forward", RAW)
        rows.append((float(lam), growth_rate(traj.log_norm, transient)))
    return np.array(rows)


def broken_phase(rates: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    return np.asarray(rates) > tol
