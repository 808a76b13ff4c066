"""Momentum lattice (2pi/L) Z^3 and completely filled Fermi balls.

Momenta are stored as integer index triples ``n`` with ``k = (2 pi / L) n``.
All shell bookkeeping uses the integer ``|n|^2`` so degeneracies are never
split by floating point noise.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Spin",
    "Momentum",
    "Shell",
    "FermiBall",
    "CapacityError",
    "IncompleteShell",
    "enumerate_shells",
    "fermi_ball",
    "ideal_fermi_momentum",
    "admissible_counts",
    "admissible_densities",
    "nearest_admissible_below",
    "cubic_point_group",
    "lattice_points",
    "DEFAULT_MAX_POINTS",
]

DEFAULT_MAX_POINTS = 5_000_000


class CapacityError(RuntimeError):
    """Raised when a requested enumeration exceeds a configured size limit."""


class IncompleteShell(ValueError):
    """``N`` would leave a degenerate momentum shell partially filled."""

    def __init__(self, N: int, below: int | None, above: int):
        self.N = N
        self.below = below
        self.above = above
        msg = f"N={N} does not fill a complete shell; nearest admissible counts are "
        msg += f"{below} and {above}" if below is not None else f"{above}"
        super().__init__(msg)


class Spin(str, enum.Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class Momentum:
    """Lattice momentum ``k = (2 pi / L) n``."""

    n: tuple[int, int, int]
    L: float

    @property
    def nsq(self) -> int:
        return sum(c * c for c in self.n)

    @property
    def k(self) -> np.ndarray:
        return (2.0 * np.pi / self.L) * np.asarray(self.n, dtype=float)

    @property
    def ksq(self) -> float:
        return (2.0 * np.pi / self.L) ** 2 * self.nsq


@dataclass(frozen=True)
class Shell:
    nsq: int
    ksq: float
    momenta: tuple[Momentum, ...]


def lattice_points(nsq_max: int) -> np.ndarray:
    """Integer vectors with |n|^2 <= nsq_max, ordered by (|n|^2, n) lexicographically."""
    if nsq_max < 0:
        return np.zeros((0, 3), dtype=np.int64)
    m = math.isqrt(nsq_max)
    axis = np.arange(-m, m + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    nsq = np.einsum("ij,ij->i", grid, grid)
    grid = grid[nsq <= nsq_max]
    nsq = nsq[nsq <= nsq_max]
    # lexsort uses the last key as primary
    order = np.lexsort((grid[:, 2], grid[:, 1], grid[:, 0], nsq))
    return grid[order]


def _nsq_bound(L: float, kmax: float) -> int:
    x = (kmax * L / (2.0 * np.pi)) ** 2
    # guard exact shell radii against round-off, e.g. kmax = 1 at L = 2 pi
    return int(math.floor(x * (1.0 + 1e-12) + 1e-12))


def enumerate_shells(L: float, kmax: float, max_points: int = DEFAULT_MAX_POINTS) -> list[Shell]:
    """All lattice momenta with ``|k| <= kmax``, grouped into shells of equal ``|k|^2``.

    Shells are sorted by ``|k|^2``; momenta within a shell are sorted
    lexicographically by ``n``.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    nsq_max = _nsq_bound(L, kmax)
    estimate = 4.0 / 3.0 * np.pi * (math.sqrt(nsq_max) + 1.0) ** 3
    if estimate > max_points:
        raise CapacityError(f"about {estimate:.0f} lattice points requested, limit is {max_points}")
    pts = lattice_points(nsq_max)
    nsq = np.einsum("ij,ij->i", pts, pts)
    scale = (2.0 * np.pi / L) ** 2
    shells = []
    for value in np.unique(nsq):
        sel = pts[nsq == value]
        momenta = tuple(Momentum(tuple(int(c) for c in row), L) for row in sel)
        shells.append(Shell(int(value), scale * int(value), momenta))
    return shells


@lru_cache(maxsize=64)
def _cumulative_counts(nsq_max: int) -> tuple[np.ndarray, np.ndarray]:
    pts = lattice_points(nsq_max)
    nsq = np.einsum("ij,ij->i", pts, pts)
    values, counts = np.unique(nsq, return_counts=True)
    return values, np.cumsum(counts)


def _nsq_for_count(N: int) -> int:
    # radius comfortably beyond the continuum estimate
    r = (3.0 * N / (4.0 * np.pi)) ** (1.0 / 3.0) + 3.0
    return int(math.ceil(r * r))


def admissible_counts(Nmax: int) -> list[int]:
    """Filled-shell particle numbers ``<= Nmax`` (1, 7, 19, 27, 33, ...)."""
    if Nmax < 1:
        return []
    _, cum = _cumulative_counts(_nsq_for_count(Nmax))
    return [int(c) for c in cum if c <= Nmax]


def nearest_admissible_below(N: int) -> int:
    counts = admissible_counts(N)
    if not counts:
        raise ValueError(f"no admissible particle number <= {N}")
    return counts[-1]


def admissible_densities(L: float, Nmax: int) -> list[tuple[int, float]]:
    return [(N, N / L**3) for N in admissible_counts(Nmax)]


@dataclass(frozen=True, eq=False)
class FermiBall:
    """A completely filled set of lattice momenta for one spin species.

    ``n`` holds the integer momentum indices ordered by ``(|n|^2, n)``.
    """

    spin: Spin
    L: float
    n: np.ndarray
    nsq_max: int

    @property
    def N(self) -> int:
        return int(self.n.shape[0])

    @property
    def kF(self) -> float:
        return 2.0 * np.pi / self.L * math.sqrt(self.nsq_max)

    @property
    def k(self) -> np.ndarray:
        return (2.0 * np.pi / self.L) * self.n

    @property
    def ksq(self) -> np.ndarray:
        return (2.0 * np.pi / self.L) ** 2 * np.einsum("ij,ij->i", self.n, self.n)

    @property
    def density(self) -> float:
        return self.N / self.L**3

    @property
    def momenta(self) -> tuple[Momentum, ...]:
        return tuple(Momentum(tuple(int(c) for c in row), self.L) for row in self.n)

    def index_set(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(tuple(int(c) for c in row) for row in self.n)

    def __contains__(self, n) -> bool:
        n = np.asarray(n, dtype=np.int64)
        return int(n @ n) <= self.nsq_max


def fermi_ball(L: float, N: int, spin: Spin | str = Spin.UP) -> FermiBall:
    """The ``N`` lowest lattice momenta, provided they fill complete shells."""
    if L <= 0:
        raise ValueError("L must be positive")
    if N < 1:
        raise ValueError("N must be at least 1")
    spin = Spin(spin)
    values, cum = _cumulative_counts(_nsq_for_count(N))
    pos = int(np.searchsorted(cum, N))
    if cum[pos] != N:
        below = int(cum[pos - 1]) if pos > 0 else None
        raise IncompleteShell(N, below, int(cum[pos]))
    nsq_max = int(values[pos])
    pts = lattice_points(nsq_max)
    pts.setflags(write=False)
    return FermiBall(spin, float(L), pts, nsq_max)


def ideal_fermi_momentum(rho: float) -> float:
    """Continuum Fermi momentum ``(6 pi^2 rho)^(1/3)`` of one spin species."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return (6.0 * np.pi**2) ** (1.0 / 3.0) * rho ** (1.0 / 3.0)


@lru_cache(maxsize=1)
def cubic_point_group() -> tuple[np.ndarray, ...]:
    """The 48 signed permutation matrices of the cube."""
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = np.zeros((3, 3), dtype=np.int64)
            for row, (col, s) in enumerate(zip(perm, signs)):
                m[row, col] = s
            mats.append(m)
    return tuple(mats)

