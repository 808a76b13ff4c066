"""Symbolic fermionic ladder polynomials and their sparse matrices.

A :class:`FermionOperator` is a dictionary from ladder strings to complex
coefficients.  A ladder string is a tuple of ``(mode, dagger)`` pairs read
left to right as an operator product, e.g. ``((3, 1), (0, 0))`` is
``a*_3 a_0``.  Matrices use the Jordan-Wigner convention

    a_j |m> = (-1)^{popcount(m & (2^j - 1))} |m ^ 2^j>   if bit j of m is set,

so the canonical mode order of the :class:`~dilute_fermi.fock.modes.ModeSet`
fixes every sign.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .basis import FockBasis, popcount

__all__ = [
    "FermionOperator",
    "SparseOperator",
    "OutOfBasis",
    "ladder",
    "creation",
    "annihilation",
    "number_operator",
    "momentum_operator",
    "identity",
]


class OutOfBasis(ValueError):
    """An operator maps a basis state outside the target basis."""


class FermionOperator:
    """Finite linear combination of ladder strings."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple, complex] = dict(terms or {})

    @classmethod
    def constant(cls, c: complex) -> "FermionOperator":
        return cls({(): complex(c)}) if c else cls()

    def copy(self) -> "FermionOperator":
        return FermionOperator(self.terms)

    def add_term(self, term: tuple, coeff: complex) -> None:
        self.terms[term] = self.terms.get(term, 0.0) + coeff

    def __iadd__(self, other):
        if isinstance(other, FermionOperator):
            for t, c in other.terms.items():
                self.add_term(t, c)
        else:
            self.add_term((), complex(other))
        return self

    def __add__(self, other):
        out = self.copy()
        out += other
        return out

    def __neg__(self):
        return FermionOperator({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            out = FermionOperator()
            for t1, c1 in self.terms.items():
                for t2, c2 in other.terms.items():
                    out.add_term(t1 + t2, c1 * c2)
            return out
        return FermionOperator({t: c * other for t, c in self.terms.items()})

    def __rmul__(self, other):
        return FermionOperator({t: other * c for t, c in self.terms.items()})

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"FermionOperator({len(self.terms)} terms)"

    def adjoint(self) -> "FermionOperator":
        return FermionOperator(
            {tuple((m, 1 - d) for m, d in reversed(t)): np.conj(c) for t, c in self.terms.items()}
        )

    def map_modes(self, fn) -> "FermionOperator":
        """Apply ``fn((mode, dagger)) -> (mode, dagger)`` to every ladder factor."""
        out = FermionOperator()
        for t, c in self.terms.items():
            out.add_term(tuple(fn(op) for op in t), c)
        return out

    def compress(self, tol: float = 0.0) -> "FermionOperator":
        return FermionOperator({t: c for t, c in self.terms.items() if abs(c) > tol})

    def normal_ordered(self) -> "FermionOperator":
        """Creators left of annihilators, each group by decreasing mode index."""
        out = FermionOperator()
        for t, c in self.terms.items():
            for tt, cc in _normal_order(t, c).items():
                out.add_term(tt, cc)
        return out.compress()

    def by_degree(self) -> dict[int, "FermionOperator"]:
        parts: dict[int, FermionOperator] = defaultdict(FermionOperator)
        for t, c in self.terms.items():
            parts[len(t)].add_term(t, c)
        return dict(parts)

    def filter(self, predicate) -> "FermionOperator":
        return FermionOperator({t: c for t, c in self.terms.items() if predicate(t)})

    def to_sparse(self, basis: FockBasis, target: FockBasis | None = None, strict: bool = True) -> "SparseOperator":
        """Matrix with columns indexed by ``basis`` and rows by ``target`` (default ``basis``).

        With ``strict`` an image leaving ``target`` raises :class:`OutOfBasis`;
        otherwise such images are dropped.
        """
        target = basis if target is None else target
        rows, cols, vals = [], [], []
        col_index = np.arange(basis.dim)
        for term, coeff in self.terms.items():
            if coeff == 0:
                continue
            st, sign, ok = _apply(term, basis.states)
            if not ok.any():
                continue
            pos, found = target.lookup(st[ok])
            if strict and not found.all():
                raise OutOfBasis(f"term {term} leaves the target basis")
            sel = np.flatnonzero(ok)[found]
            rows.append(pos[found])
            cols.append(col_index[sel])
            vals.append(coeff * sign[sel])
        if rows:
            r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        else:
            r = c = np.zeros(0, dtype=np.int64)
            v = np.zeros(0, dtype=complex)
        mat = sp.coo_matrix((v.astype(complex), (r, c)), shape=(target.dim, basis.dim)).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        return SparseOperator(mat, basis, target)


def _normal_order(term: tuple, coeff: complex) -> dict:
    ops = list(term)
    out: dict[tuple, complex] = {}
    for i in range(1, len(ops)):
        for j in range(i, 0, -1):
            left, right = ops[j - 1], ops[j]
            if right[1] and not left[1]:
                ops[j - 1], ops[j] = right, left
                coeff = -coeff
                if right[0] == left[0]:
                    # a_i a*_i = 1 - a*_i a_i
                    for t, c in _normal_order(tuple(ops[: j - 1] + ops[j + 1 :]), -coeff).items():
                        out[t] = out.get(t, 0.0) + c
            elif right[1] == left[1]:
                if right[0] == left[0]:
                    return out
                if right[0] > left[0]:
                    ops[j - 1], ops[j] = right, left
                    coeff = -coeff
    key = tuple(ops)
    out[key] = out.get(key, 0.0) + coeff
    return out


def _apply(term: tuple, states: np.ndarray):
    st = states.copy()
    sign = np.ones(states.shape, dtype=np.int64)
    ok = np.ones(states.shape, dtype=bool)
    for mode, dag in reversed(term):
        bit = np.uint64(1) << np.uint64(mode)
        occupied = (st & bit) != 0
        ok &= occupied != bool(dag)
        below = st & (bit - np.uint64(1))
        sign *= 1 - 2 * (popcount(below) & 1)
        st ^= bit
    return st, sign, ok


def ladder(mode: int, dagger: bool) -> FermionOperator:
    return FermionOperator({((int(mode), int(bool(dagger))),): 1.0})


@dataclass(eq=False)
class SparseOperator:
    """CSR matrix from ``basis`` (columns) to ``target`` (rows)."""

    matrix: sp.csr_matrix
    basis: FockBasis
    target: FockBasis
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def H(self) -> "SparseOperator":
        return SparseOperator(self.matrix.conj().T.tocsr(), self.target, self.basis)

    def _check(self, other: "SparseOperator"):
        if other.basis is not self.basis or other.target is not self.target:
            if other.shape != self.shape:
                raise ValueError("operators act on different bases")

    def __add__(self, other):
        if isinstance(other, SparseOperator):
            self._check(other)
            return SparseOperator((self.matrix + other.matrix).tocsr(), self.basis, self.target)
        return self + identity(self.basis) * other

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        return SparseOperator((self.matrix * scalar).tocsr(), self.basis, self.target)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator((self.matrix @ other.matrix).tocsr(), other.basis, self.target)
        return self.matrix @ other

    def commutator(self, other: "SparseOperator") -> "SparseOperator":
        return self @ other - other @ self

    def anticommutator(self, other: "SparseOperator") -> "SparseOperator":
        return self @ other + other @ self

    def expect(self, psi) -> complex:
        return complex(np.vdot(psi, self.matrix @ psi))

    def max_abs(self) -> float:
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0

    def hermiticity_defect(self) -> float:
        return float(abs(self.matrix - self.matrix.conj().T).max()) if self.matrix.nnz else 0.0

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def identity(basis: FockBasis) -> SparseOperator:
    return SparseOperator(sp.identity(basis.dim, dtype=complex, format="csr"), basis, basis)


def creation(basis: FockBasis, mode: int, target: FockBasis | None = None) -> SparseOperator:
    return ladder(mode, True).to_sparse(basis, target, strict=target is None and basis.sector is None and basis.momentum is None)


def annihilation(basis: FockBasis, mode: int, target: FockBasis | None = None) -> SparseOperator:
    return ladder(mode, False).to_sparse(basis, target, strict=target is None and basis.sector is None and basis.momentum is None)


def _diag(basis: FockBasis, values) -> SparseOperator:
    return SparseOperator(sp.diags(np.asarray(values, dtype=complex), format="csr"), basis, basis)


def number_operator(basis: FockBasis, spin: int | None = None) -> SparseOperator:
    """Particle number (bitstrings read literally); restricted to one spin if given."""
    ms = basis.modes
    mask = (1 << ms.M) - 1 if spin is None else ms.spin_mask(spin)
    return _diag(basis, popcount(basis.states & np.uint64(mask)))


def momentum_operator(basis: FockBasis, axis: int, picture: str | None = None) -> SparseOperator:
    """Component ``axis`` of the total lattice momentum index.

    In the excitation picture an occupied ball mode is a hole and carries
    ``-n``; the result equals ``R^* P R`` up to the constant momentum of the
    filled balls (zero for point-symmetric balls).
    """
    picture = basis.picture if picture is None else picture
    ms = basis.modes
    weights = ms.n[:, axis].astype(float)
    if picture == "excitation":
        weights = np.where(ms.in_ball, -weights, weights)
    return _diag(basis, basis.occupations() @ weights)
