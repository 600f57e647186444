"""Dense-matrix reference for the OTOC pipeline on small grids.

Everything here is built from explicit N x N matrices (an explicit DFT, the
raw kick with its gain left in, matrix powers of U) and shares no code with
the FFT propagator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import SimParams

MAX_N = 128


@dataclass(frozen=True)
class OracleResult:
    C: float  # C1 + C2 - 2 Re C3
    C1: float
    C2: float
    ReC3: float
    ImC3: float
    C_commutator: float  # -<psi|[A(t), p^m]^2|psi> straight from the commutator (raw mode only)


def dense_operators(params: SimParams):
    """(theta, p, DFT matrix F, U) with F[n, j] = exp(-i n theta_j)/sqrt(N), U in the position basis."""
    N = params.N
    if N > MAX_N:
        raise ValueError(f"dense oracle limited to N <= {MAX_N}, got {N}")
    theta = -np.pi + 2 * np.pi * np.arange(N) / N
    n = np.arange(-N // 2, N // 2)
    p = n * params.hbar
    F = np.exp(-1j * np.outer(n, theta)) / np.sqrt(N)
    V = params.K * (np.cos(theta) + 1j * params.lam * np.sin(theta))
    kick = np.diag(np.exp(-1j * V / params.hbar))
    free = np.diag(np.exp(-1j * p**2 / (2 * params.hbar)))
    U = F.conj().T @ free @ F @ kick
    return theta, p, F, U


def _initial(theta, sigma):
    psi = np.exp(-sigma * theta**2 / 2).astype(complex)
    return psi / np.linalg.norm(psi)


def dense_oracle(params: SimParams, m: int, t_n: int, normalize: bool = False) -> OracleResult:
    theta, p, F, U = dense_operators(params)
    Th = np.diag(theta)
    P = F.conj().T @ np.diag(p**m) @ F
    psi = _initial(theta, params.sigma)

    if normalize:
        def echo(v):
            target = np.vdot(v, v).real
            for _ in range(t_n):
                v = U @ v
                v *= np.sqrt(target / np.vdot(v, v).real)
            v = Th @ v
            target = np.vdot(v, v).real
            Ud = U.conj().T
            for _ in range(t_n):
                v = Ud @ v
                v *= np.sqrt(target / np.vdot(v, v).real)
            return v

        psi_R = echo(psi)
        phi_R = echo(P @ psi)
        C_comm = np.nan
    else:
        Ut = np.linalg.matrix_power(U, t_n)
        A = Ut.conj().T @ Th @ Ut
        comm = A @ P - P @ A
        C_comm = -np.vdot(psi, comm @ comm @ psi).real
        psi_R = A @ psi
        phi_R = A @ P @ psi

    Ppsi = P @ psi_R
    C1 = np.vdot(Ppsi, Ppsi).real
    C2 = np.vdot(phi_R, phi_R).real
    C3 = np.vdot(psi_R, P @ phi_R)
    return OracleResult(C1 + C2 - 2 * C3.real, C1, C2, C3.real, C3.imag, C_comm)
