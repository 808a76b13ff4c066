"""Second-quantized Hamiltonian on a truncated mode set.

    H = sum_{k,sigma} |k|^2 a*_{k,sigma} a_{k,sigma}
        + 1/(2 L^3) sum_{sigma,sigma'} sum_{k,k',p} Vhat(p)
              a*_{k+p,sigma} a*_{k'-p,sigma'} a_{k',sigma'} a_{k,sigma}

Only quadruples whose four modes all belong to the set are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .basis import FockBasis
from .modes import ModeSet
from .operators import FermionOperator, SparseOperator

__all__ = ["HamiltonianTerms", "hamiltonian_terms", "build_hamiltonian"]


@dataclass(frozen=True)
class HamiltonianTerms:
    """Symbolic pieces of ``H``.

    ``dropped`` counts quadruples ``(k, k', p)`` with ``k``, ``k'`` and
    ``k + p`` in the set but ``k' - p`` outside it.
    """

    kinetic: FermionOperator
    same_spin: FermionOperator
    opposite_spin: FermionOperator
    dropped: int

    @property
    def interaction(self) -> FermionOperator:
        return self.same_spin + self.opposite_spin

    @property
    def total(self) -> FermionOperator:
        return self.kinetic + self.same_spin + self.opposite_spin


def _vhat_lookup(fourier, L: float):
    cache: dict[int, float] = {}
    scale = 2.0 * math.pi / L

    def vhat(nsq: int) -> float:
        if nsq not in cache:
            cache[nsq] = float(fourier(scale * math.sqrt(nsq)))
        return cache[nsq]

    return vhat


def hamiltonian_terms(ms: ModeSet, fourier) -> HamiltonianTerms:
    kinetic = FermionOperator()
    for j, ksq in enumerate(ms.ksq):
        if ksq:
            kinetic.add_term(((j, 1), (j, 0)), float(ksq))
    vhat = _vhat_lookup(fourier, ms.L)
    pref = 1.0 / (2.0 * ms.L**3)
    parts = {True: FermionOperator(), False: FermionOperator()}
    dropped = 0
    n = [tuple(int(c) for c in row) for row in ms.n]
    spins = [int(s) for s in ms.spin]
    for i, (s, k) in enumerate(zip(spins, n)):
        for i2, (s2, k2) in enumerate(zip(spins, n)):
            if i == i2:
                continue
            for q in ms.modes_of(s):
                q = int(q)
                nq = n[q]
                p = (nq[0] - k[0], nq[1] - k[1], nq[2] - k[2])
                q2 = ms.index(s2, (k2[0] - p[0], k2[1] - p[1], k2[2] - p[2]))
                if q2 is None:
                    dropped += 1
                    continue
                if q2 == q:
                    continue
                w = vhat(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
                if w:
                    parts[s == s2].add_term(((q, 1), (q2, 1), (i2, 0), (i, 0)), pref * w)
    return HamiltonianTerms(kinetic, parts[True], parts[False], dropped)


def build_hamiltonian(ms: ModeSet, fourier, basis: FockBasis) -> SparseOperator:
    """Sparse ``H`` on ``basis``; ``meta['dropped']`` holds the truncation count."""
    terms = hamiltonian_terms(ms, fourier)
    op = terms.total.to_sparse(basis)
    op.meta["dropped"] = terms.dropped
    return op
