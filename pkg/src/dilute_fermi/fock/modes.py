"""Truncated single-particle mode sets ``(k, sigma)`` on the torus."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ..lattice import CapacityError, FermiBall, Spin, lattice_points

__all__ = ["ModeSet", "DEFAULT_MAX_MODES", "UP", "DOWN"]

DEFAULT_MAX_MODES = 16
UP, DOWN = 0, 1


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Ordered spin-orbitals: all spin-up modes first, each spin sorted lexicographically in ``n``.

    Bit ``j`` of an occupation bitstring refers to mode ``j``; every sign
    convention downstream follows this order.
    """

    L: float
    n: np.ndarray
    spin: np.ndarray
    in_ball: np.ndarray
    nsq_fermi: tuple[int, int]
    ball_counts: tuple[int, int]
    _index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        for arr in (self.n, self.spin, self.in_ball):
            arr.setflags(write=False)
        index = {(int(s), tuple(int(c) for c in row)): j for j, (s, row) in enumerate(zip(self.spin, self.n))}
        if len(index) != self.M:
            raise ValueError("modes must be distinct")
        self._index.update(index)

    @classmethod
    def from_balls(
        cls,
        ball_up: FermiBall,
        ball_down: FermiBall,
        extra_up=(),
        extra_down=(),
        max_modes: int = DEFAULT_MAX_MODES,
    ) -> "ModeSet":
        """Both filled balls plus optional extra momenta (integer triples) per spin."""
        if ball_up.L != ball_down.L:
            raise ValueError("balls must share the box length")
        rows, spins, flags = [], [], []
        for s, ball, extra in ((UP, ball_up, extra_up), (DOWN, ball_down, extra_down)):
            pts = {tuple(int(c) for c in row): True for row in ball.n}
            for e in extra:
                e = tuple(int(c) for c in e)
                if e in pts:
                    raise ValueError(f"extra momentum {e} already lies in the ball")
                pts[e] = False
            for key in sorted(pts):
                rows.append(key)
                spins.append(s)
                flags.append(pts[key])
        if len(rows) > max_modes:
            raise CapacityError(f"{len(rows)} spin-orbitals requested, limit is {max_modes}")
        return cls(
            float(ball_up.L),
            np.array(rows, dtype=np.int64).reshape(-1, 3),
            np.array(spins, dtype=np.int64),
            np.array(flags, dtype=bool),
            (ball_up.nsq_max, ball_down.nsq_max),
            (ball_up.N, ball_down.N),
        )

    @classmethod
    def shells(cls, ball_up: FermiBall, ball_down: FermiBall, nsq_outer: int, max_modes: int = DEFAULT_MAX_MODES):
        """Balls plus every lattice momentum with ``nsq_fermi < |n|^2 <= nsq_outer``."""
        pts = lattice_points(nsq_outer)
        nsq = np.einsum("ij,ij->i", pts, pts)
        up = pts[nsq > ball_up.nsq_max]
        down = pts[nsq > ball_down.nsq_max]
        return cls.from_balls(ball_up, ball_down, up, down, max_modes)

    @property
    def M(self) -> int:
        return int(self.n.shape[0])

    @property
    def k(self) -> np.ndarray:
        return (2.0 * np.pi / self.L) * self.n

    @property
    def ksq(self) -> np.ndarray:
        return (2.0 * np.pi / self.L) ** 2 * np.einsum("ij,ij->i", self.n, self.n).astype(float)

    @property
    def nsq(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.n, self.n)

    def kF(self, spin: int) -> float:
        return 2.0 * math.pi / self.L * math.sqrt(self.nsq_fermi[spin])

    @property
    def ball_mask(self) -> int:
        return sum(1 << j for j in np.flatnonzero(self.in_ball).tolist())

    def spin_mask(self, spin: int) -> int:
        return sum(1 << j for j in np.flatnonzero(self.spin == spin).tolist())

    def index(self, spin, n) -> int | None:
        """Position of mode ``(n, spin)`` or ``None`` if it is not in the set."""
        s = spin if isinstance(spin, (int, np.integer)) else (UP if Spin(spin) is Spin.UP else DOWN)
        return self._index.get((int(s), tuple(int(c) for c in n)))

    def modes_of(self, spin: int) -> np.ndarray:
        return np.flatnonzero(self.spin == spin)

    def descriptor(self) -> str:
        """Stable hash of box length, momenta, spins and ball flags."""
        h = hashlib.sha256()
        h.update(repr(float(self.L)).encode())
        for arr in (self.n, self.spin, self.in_ball.astype(np.int64)):
            h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
        return h.hexdigest()
