"""Grids, wavefunctions and the position/momentum transform.

Position samples live on theta_j = -pi + 2*pi*j/N.  Momentum coefficients are
stored in ascending order n = -N/2 ... N/2-1, so ``amplitudes[k]`` pairs with
``grid.p[k]`` in the momentum representation.  The transform is

    c_n = N**-0.5 * sum_j psi_j exp(-i n theta_j)

which makes a momentum delta at n map to exp(i n theta_j)/sqrt(N) exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

# amplitudes are rescaled into log_scale once their peak leaves this band
FOLD_HIGH = 1e100
FOLD_LOW = 1e-100


@dataclass(frozen=True)
class SimParams:
    K: float = 2 * math.pi
    lam: float = 0.9
    hbar: float = 0.1
    sigma: float = 10.0
    N: int = 2**13
    n_kicks: int = 10

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        _check_dimension(self.N)
        if self.n_kicks < 0:
            raise ValueError(f"n_kicks must be >= 0, got {self.n_kicks}")


def _check_dimension(N):
    if not isinstance(N, (int, np.integer)) or N <= 0 or N % 2:
        raise ValueError(f"N must be a positive even integer, got {N!r}")
    if N & (N - 1):
        raise ValueError(f"N must be a power of two, got {N}")


class Rep(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True, eq=False)
class Grid:
    N: int
    hbar: float
    theta: np.ndarray
    n: np.ndarray
    p: np.ndarray
    # (-1)**n in FFT bin order; absorbs the theta_0 = -pi origin shift
    _sign: np.ndarray = field(repr=False)

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.N


def make_grid(params: SimParams | None = None, *, N: int | None = None, hbar: float | None = None) -> Grid:
    """Build the paired theta/p lattices for ``params`` (or explicit N, hbar)."""
    if params is not None:
        N = params.N if N is None else N
        hbar = params.hbar if hbar is None else hbar
    if N is None or hbar is None:
        raise TypeError("make_grid needs params or both N and hbar")
    _check_dimension(N)
    if hbar <= 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    j = np.arange(N)
    theta = -np.pi + 2 * np.pi * j / N
    n = np.arange(-N // 2, N // 2)
    p = n * hbar
    bins = np.fft.fftfreq(N, 1.0 / N).astype(np.int64)
    sign = np.where(bins % 2 == 0, 1.0, -1.0)
    for a in (theta, n, p, sign):
        a.setflags(write=False)
    return Grid(N=N, hbar=float(hbar), theta=theta, n=n, p=p, _sign=sign)


@dataclass(frozen=True, eq=False)
class WaveState:
    """Physical state = amplitudes * exp(log_scale)."""

    amplitudes: np.ndarray
    rep: Rep = Rep.POSITION
    log_scale: float = 0.0
    target_norm: float | None = None

    def __post_init__(self):
        # read-only view; the caller's array stays writable
        a = np.asarray(self.amplitudes, dtype=np.complex128).view()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def with_amplitudes(self, amplitudes, rep=None, log_scale=None) -> WaveState:
        return replace(
            self,
            amplitudes=amplitudes,
            rep=self.rep if rep is None else rep,
            log_scale=self.log_scale if log_scale is None else log_scale,
        )


def gaussian_initial(grid: Grid, sigma: float) -> WaveState:
    """(sigma/pi)^(1/4) exp(-sigma theta^2 / 2) sampled on the grid, unit norm."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    psi = (sigma / np.pi) ** 0.25 * np.exp(-sigma * grid.theta**2 / 2)
    psi = psi / math.sqrt(np.sum(psi**2))
    return WaveState(psi.astype(np.complex128), Rep.POSITION, 0.0, 1.0)


def to_momentum(state: WaveState, grid: Grid) -> WaveState:
    if state.rep is not Rep.POSITION:
        raise ValueError("to_momentum expects a position-representation state")
    c = np.fft.fft(state.amplitudes, norm="ortho") * grid._sign
    return state.with_amplitudes(np.fft.fftshift(c), rep=Rep.MOMENTUM)


def to_position(state: WaveState, grid: Grid) -> WaveState:
    if state.rep is not Rep.MOMENTUM:
        raise ValueError("to_position expects a momentum-representation state")
    c = np.fft.ifftshift(state.amplitudes) * grid._sign
    return state.with_amplitudes(np.fft.ifft(c, norm="ortho"), rep=Rep.POSITION)


def as_rep(state: WaveState, grid: Grid, rep: Rep) -> WaveState:
    if state.rep is rep:
        return state
    return to_momentum(state, grid) if rep is Rep.MOMENTUM else to_position(state, grid)


def _raw_norm2(a: np.ndarray) -> float:
    return float(np.vdot(a, a).real)


def log_norm_squared(state: WaveState) -> float:
    raw = _raw_norm2(state.amplitudes)
    if raw == 0.0:
        return -math.inf
    return math.log(raw) + 2 * state.log_scale


def norm_squared(state: WaveState) -> float:
    """<s|s> including log_scale; overflows to inf where log_norm_squared would not."""
    ln = log_norm_squared(state)
    return math.exp(ln) if ln < 709.0 else math.inf


def inner(u: WaveState, v: WaveState) -> complex:
    """<u|v>, antilinear in u."""
    if u.rep is not v.rep:
        raise ValueError("inner product of states in different representations")
    if u.amplitudes.shape != v.amplitudes.shape:
        raise ValueError("inner product of states on different grids")
    return complex(np.vdot(u.amplitudes, v.amplitudes)) * math.exp(u.log_scale + v.log_scale)


def set_norm(state: WaveState, target: float) -> WaveState:
    """Rescale so that <s|s> == target, folding log_scale into the amplitudes."""
    if not target > 0:
        raise ValueError(f"target norm must be positive, got {target}")
    raw = _raw_norm2(state.amplitudes)
    if raw == 0.0 or not math.isfinite(raw):
        raise ValueError("cannot renormalize a state with zero or non-finite norm")
    a = state.amplitudes * math.sqrt(target / raw)
    return replace(state, amplitudes=a, log_scale=0.0, target_norm=float(target))


def fold_scale(state: WaveState) -> WaveState:
    """Move the amplitude magnitude into log_scale when it drifts out of range."""
    peak = float(np.max(np.abs(state.amplitudes))) if state.amplitudes.size else 0.0
    if peak == 0.0 or FOLD_LOW <= peak <= FOLD_HIGH:
        return state
    return state.with_amplitudes(state.amplitudes / peak, log_scale=state.log_scale + math.log(peak))
