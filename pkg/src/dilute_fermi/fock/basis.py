"""Occupation-number bases: the full Fock space or number/momentum sectors."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..lattice import CapacityError
from .modes import DOWN, UP, ModeSet

__all__ = ["FockBasis", "EmptySector", "popcount", "DEFAULT_MAX_DIM"]

DEFAULT_MAX_DIM = 1 << 16


class EmptySector(ValueError):
    pass


def popcount(x) -> np.ndarray:
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def _momentum_of(ms: ModeSet, states: np.ndarray) -> np.ndarray:
    bits = (states[:, None] >> np.arange(ms.M, dtype=np.uint64)[None, :]) & np.uint64(1)
    return bits.astype(np.int64) @ ms.n


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Sorted bitstrings over a :class:`ModeSet`.

    ``picture`` records how the sector labels are read: ``"particle"`` means
    the bitstring itself has ``N_sigma`` particles; ``"excitation"`` means
    ``m ^ ball_mask`` does, i.e. the basis is the image of the particle
    sector under the particle-hole map.
    """

    modes: ModeSet
    states: np.ndarray
    picture: str = "particle"
    sector: tuple[int, int] | None = None
    momentum: tuple[int, int, int] | None = None
    _hash: str = field(default="", repr=False)

    def __post_init__(self):
        self.states.setflags(write=False)
        h = hashlib.sha256(self.modes.descriptor().encode())
        h.update(f"{self.picture}|{self.sector}|{self.momentum}".encode())
        h.update(self.states.tobytes())
        object.__setattr__(self, "_hash", h.hexdigest())

    @classmethod
    def full(cls, ms: ModeSet, max_dim: int = DEFAULT_MAX_DIM) -> "FockBasis":
        if (1 << ms.M) > max_dim:
            raise CapacityError(f"2^{ms.M} states exceed the limit {max_dim}")
        return cls(ms, np.arange(1 << ms.M, dtype=np.uint64))

    @classmethod
    def build(
        cls,
        ms: ModeSet,
        sector: tuple[int, int] | None = None,
        momentum=None,
        picture: str = "particle",
        max_dim: int = DEFAULT_MAX_DIM,
    ) -> "FockBasis":
        """Basis restricted to ``(N_up, N_down)`` and optionally a total momentum ``n``."""
        if picture not in ("particle", "excitation"):
            raise ValueError(f"unknown picture {picture!r}")
        if sector is None and momentum is None and picture == "particle":
            return cls.full(ms, max_dim)
        if ms.M > 30:
            raise CapacityError(f"{ms.M} modes are too many to enumerate")
        allm = np.arange(1 << ms.M, dtype=np.uint64)
        flip = np.uint64(ms.ball_mask if picture == "excitation" else 0)
        occ = allm ^ flip
        keep = np.ones(allm.shape, dtype=bool)
        if sector is not None:
            n_up, n_down = sector
            avail = (int((ms.spin == UP).sum()), int((ms.spin == DOWN).sum()))
            if not (0 <= n_up <= avail[0] and 0 <= n_down <= avail[1]):
                raise EmptySector(f"sector {sector} impossible with {avail} modes per spin")
            keep &= popcount(occ & np.uint64(ms.spin_mask(UP))) == n_up
            keep &= popcount(occ & np.uint64(ms.spin_mask(DOWN))) == n_down
        states = allm[keep]
        if momentum is not None:
            momentum = tuple(int(c) for c in momentum)
            P = _momentum_of(ms, states ^ flip)
            states = states[np.all(P == np.array(momentum), axis=1)]
        if states.size == 0:
            raise EmptySector(f"no states with sector={sector}, momentum={momentum}")
        if states.size > max_dim:
            raise CapacityError(f"{states.size} states exceed the limit {max_dim}")
        return cls(ms, states, picture, tuple(sector) if sector else None, momentum)

    @classmethod
    def excitation(cls, ms: ModeSet, sector=None, momentum=None, max_dim: int = DEFAULT_MAX_DIM) -> "FockBasis":
        """Image of the particle sector ``(N_up, N_down)`` under ``R^*``; defaults to the ball counts."""
        sector = ms.ball_counts if sector is None else sector
        return cls.build(ms, sector, momentum, "excitation", max_dim)

    @property
    def dim(self) -> int:
        return int(self.states.size)

    def __len__(self) -> int:
        return self.dim

    @property
    def descriptor(self) -> str:
        return self._hash

    def lookup(self, states) -> tuple[np.ndarray, np.ndarray]:
        """Indices of ``states`` and a mask of which ones are present."""
        states = np.asarray(states, dtype=np.uint64)
        pos = np.searchsorted(self.states, states)
        pos = np.minimum(pos, self.dim - 1)
        found = self.states[pos] == states
        return pos, found

    def index_of(self, state: int) -> int:
        pos, found = self.lookup(np.array([state], dtype=np.uint64))
        if not found[0]:
            raise KeyError(f"state {state:#b} not in basis")
        return int(pos[0])

    def basis_vector(self, state: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(state)] = 1.0
        return v

    def occupations(self) -> np.ndarray:
        """``(dim, M)`` 0/1 array of occupation numbers."""
        shifts = np.arange(self.modes.M, dtype=np.uint64)
        return ((self.states[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int64)

    def excitation_number(self) -> np.ndarray:
        """Number of occupied modes when the bitstrings are read in the excitation picture."""
        return popcount(self.states)

    def random_state(self, rng: np.random.Generator) -> np.ndarray:
        v = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        return v / np.linalg.norm(v)
