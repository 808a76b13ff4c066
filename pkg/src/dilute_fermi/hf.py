"""Hartree-Fock energy of the free Fermi gas on the torus.

For filled balls ``B_up``, ``B_down`` the energy of the Slater determinant is

    E_HF = sum_sigma sum_{k in B_sigma} |k|^2
           + (L^3/2) Vhat(0) (rho_up + rho_down)^2
           - (1/(2 L^3)) sum_sigma sum_{k, k' in B_sigma} Vhat(k - k').

The exchange double sum is evaluated exactly.  Pairs are binned by the
integer ``|n - n'|^2`` so each distinct transform value is computed once and
the reduction is independent of how the pair loop is partitioned.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import FermiBall, fermi_ball
from .potential import FourierPotential, RadialPotential

__all__ = [
    "EnergyBreakdown",
    "kinetic_energy",
    "direct_term",
    "exchange_term",
    "taylor_exchange_residual",
    "hf_energy",
    "hf_density",
    "free_kinetic_density",
    "pair_distance_histogram",
    "hf_energy_from_counts",
]

_CHUNK = 512


def _as_fourier(v) -> FourierPotential:
    return FourierPotential(v) if isinstance(v, RadialPotential) else v


def kinetic_energy(balls) -> float:
    """``sum_sigma sum_{k in B_sigma} |k|^2`` accumulated on integers, then scaled."""
    total = 0.0
    for ball in balls:
        nsq = int(np.einsum("ij,ij->", ball.n, ball.n))
        total += (2.0 * math.pi / ball.L) ** 2 * nsq
    return total


def direct_term(rho_up: float, rho_down: float, vhat0: float, L: float) -> float:
    if rho_up < 0 or rho_down < 0:
        raise ValueError("densities must be nonnegative")
    return 0.5 * L**3 * vhat0 * (rho_up + rho_down) ** 2


def _histogram_block(n: np.ndarray, start: int, stop: int, size: int) -> np.ndarray:
    d = n[start:stop, None, :] - n[None, :, :]
    dsq = np.einsum("ijk,ijk->ij", d, d).ravel()
    return np.bincount(dsq, minlength=size)


def pair_distance_histogram(ball: FermiBall, threads: int = 1) -> np.ndarray:
    """``hist[m]`` = number of ordered pairs ``(k, k')`` in the ball with ``|n - n'|^2 = m``.

    Counts are integers, so any partition of the pair loop gives the same result.
    """
    n = np.asarray(ball.n, dtype=np.int64)
    size = 4 * ball.nsq_max + 1
    starts = range(0, n.shape[0], _CHUNK)
    jobs = [(s, min(s + _CHUNK, n.shape[0])) for s in starts]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _histogram_block(n, j[0], j[1], size), jobs))
    else:
        parts = [_histogram_block(n, a, b, size) for a, b in jobs]
    return np.sum(parts, axis=0, dtype=np.int64)


def _weighted_pair_sum(ball: FermiBall, vhat: FourierPotential, shift: float, threads: int) -> float:
    """``sum_{k,k'} (Vhat(k - k') - shift)`` with fixed summation order."""
    hist = pair_distance_histogram(ball, threads)
    scale = 2.0 * math.pi / ball.L
    terms = [int(c) * (vhat(scale * math.sqrt(m)) - shift) for m, c in enumerate(hist) if c]
    return math.fsum(terms)


def exchange_term(balls, fourier, L: float | None = None, threads: int = 1) -> float:
    """``-(1/(2 L^3)) sum_sigma sum_{k,k' in B_sigma} Vhat(k - k')``."""
    vhat = _as_fourier(fourier)
    total = 0.0
    for ball in balls:
        L = ball.L if L is None else L
        total -= _weighted_pair_sum(ball, vhat, 0.0, threads) / (2.0 * L**3)
    return total


def taylor_exchange_residual(balls, fourier, L: float | None = None, threads: int = 1) -> float:
    """``exchange + (L^3/2) sum_sigma Vhat(0) rho_sigma^2``.

    The ``Vhat(0)`` part is subtracted pair by pair rather than after the
    fact, so the small residual does not suffer cancellation.
    """
    vhat = _as_fourier(fourier)
    v0 = vhat(0.0)
    total = 0.0
    for ball in balls:
        L = ball.L if L is None else L
        total -= _weighted_pair_sum(ball, vhat, v0, threads) / (2.0 * L**3)
    return total


@dataclass(frozen=True)
class EnergyBreakdown:
    """Hartree-Fock energy and its parts for one pair of filled balls."""

    kinetic: float
    direct: float
    exchange: float
    total: float
    L: float
    density_total: float
    N_up: int = 0
    N_down: int = 0
    taylor_residual: float = math.nan

    @property
    def rho_up(self) -> float:
        return self.N_up / self.L**3

    @property
    def rho_down(self) -> float:
        return self.N_down / self.L**3


def hf_energy(ball_up: FermiBall, ball_down: FermiBall, fourier, threads: int = 1) -> EnergyBreakdown:
    if ball_up.L != ball_down.L:
        raise ValueError("both balls must live in the same box")
    vhat = _as_fourier(fourier)
    L = ball_up.L
    kin = kinetic_energy((ball_up, ball_down))
    direct = direct_term(ball_up.density, ball_down.density, vhat(0.0), L)
    exch = exchange_term((ball_up, ball_down), vhat, L, threads)
    resid = taylor_exchange_residual((ball_up, ball_down), vhat, L, threads)
    total = kin + direct + exch
    return EnergyBreakdown(
        kinetic=kin,
        direct=direct,
        exchange=exch,
        total=total,
        L=L,
        density_total=total / L**3,
        N_up=ball_up.N,
        N_down=ball_down.N,
        taylor_residual=resid,
    )


def hf_energy_from_counts(L: float, N_up: int, N_down: int, fourier, threads: int = 1) -> EnergyBreakdown:
    return hf_energy(fermi_ball(L, N_up, "up"), fermi_ball(L, N_down, "down"), fourier, threads)


def hf_density(breakdown: EnergyBreakdown) -> tuple[float, float]:
    """``(kinetic / L^3, (direct + exchange) / L^3)``."""
    vol = breakdown.L**3
    return breakdown.kinetic / vol, (breakdown.direct + breakdown.exchange) / vol


def free_kinetic_density(rho_up: float, rho_down: float) -> float:
    """Continuum value ``(3/5)(6 pi^2)^(2/3)(rho_up^(5/3) + rho_down^(5/3))``."""
    return 0.6 * (6.0 * math.pi**2) ** (2.0 / 3.0) * (rho_up ** (5.0 / 3.0) + rho_down ** (5.0 / 3.0))
