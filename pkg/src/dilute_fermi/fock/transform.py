"""Particle-hole transformation ``R`` and the decomposition of ``R^* H R``.

``R`` is the product over ball modes, in canonical order, of

    U_j = (a_j + a*_j) (-1)^{N - n_j},

which satisfies ``U_j^* a_j U_j = a*_j`` and ``U_j^* a_i U_j = a_i`` for
``i != j``.  On bitstrings it is the signed permutation ``m -> m ^ ball``;
the global sign is fixed so that ``R Omega`` is ``+|ball>``.

On the excitation-picture sector basis the conjugated Hamiltonian splits as

    R^* H R = E_HF + H0 + X + Q1 + Q2 + Q3 + Q4

where ``H0`` and ``X`` are diagonal one-body operators, ``Q1`` is the
quartic interaction among modes outside the balls, ``Q4`` (plus its
adjoint) creates four excitations, and ``Q2``/``Q3`` are the parts of the
remainder that conserve the excitation number or change it by two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..hf import hf_energy
from ..lattice import fermi_ball
from .basis import FockBasis, popcount
from .hamiltonian import HamiltonianTerms, hamiltonian_terms
from .modes import DOWN, UP, ModeSet
from .operators import FermionOperator, SparseOperator, identity

__all__ = [
    "particle_hole_R",
    "ph_substitute",
    "Decomposition",
    "decompose",
    "excitation_blocks",
    "verify_conjugation",
]


def _ph_signs(ms: ModeSet, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    st = states.astype(np.uint64).copy()
    sign = np.ones(st.shape, dtype=np.int64)
    for j in reversed(np.flatnonzero(ms.in_ball).tolist()):
        bit = np.uint64(1) << np.uint64(j)
        nj = ((st & bit) != 0).astype(np.int64)
        sign *= 1 - 2 * ((popcount(st) - nj) & 1)
        sign *= 1 - 2 * (popcount(st & (bit - np.uint64(1))) & 1)
        st ^= bit
    return st, sign


def particle_hole_R(ms: ModeSet, basis: FockBasis | None = None, target: FockBasis | None = None) -> SparseOperator:
    """``R`` as a matrix from ``basis`` (excitation picture) to ``target`` (particle picture).

    Both default to the full Fock space.
    """
    if basis is None:
        basis = FockBasis.full(ms)
    if target is None:
        target = basis if basis.picture == "particle" and basis.sector is None else _partner(basis)
    _, s0 = _ph_signs(ms, np.zeros(1, dtype=np.uint64))
    images, sign = _ph_signs(ms, basis.states)
    pos, found = target.lookup(images)
    if not found.all():
        raise ValueError("target basis does not contain the particle-hole image of the basis")
    mat = sp.csr_matrix(
        ((sign * s0[0]).astype(complex), (pos, np.arange(basis.dim))), shape=(target.dim, basis.dim)
    )
    return SparseOperator(mat, basis, target)


def _partner(basis: FockBasis) -> FockBasis:
    other = "particle" if basis.picture == "excitation" else "excitation"
    return FockBasis.build(basis.modes, basis.sector, basis.momentum, other)


def ph_substitute(op: FermionOperator, ms: ModeSet) -> FermionOperator:
    """Symbolic ``R^* op R``: ladder operators of ball modes swap dagger."""
    ball = ms.in_ball
    return op.map_modes(lambda t: (t[0], 1 - t[1]) if ball[t[0]] else t)


def verify_conjugation(ms: ModeSet) -> float:
    """Max entry of ``R^* a_j R - (a_j or a*_j)`` over all modes, on the full space."""
    full = FockBasis.full(ms)
    R = particle_hole_R(ms, full, full)
    worst = 0.0
    for j in range(ms.M):
        a = FermionOperator({((j, 0),): 1.0}).to_sparse(full)
        expect = FermionOperator({((j, int(ms.in_ball[j])),): 1.0}).to_sparse(full)
        worst = max(worst, (R.H @ a @ R - expect).max_abs())
    return worst


def excitation_blocks(op: SparseOperator) -> dict[int, SparseOperator]:
    """Split a matrix by the change in excitation number (row minus column popcount)."""
    coo = op.matrix.tocoo()
    delta = popcount(op.target.states[coo.row]) - popcount(op.basis.states[coo.col])
    out = {}
    for d in np.unique(delta):
        sel = delta == d
        m = sp.csr_matrix((coo.data[sel], (coo.row[sel], coo.col[sel])), shape=op.shape)
        out[int(d)] = SparseOperator(m, op.basis, op.target)
    return out


def _block(blocks: dict, keys, like: SparseOperator) -> SparseOperator:
    out = SparseOperator(sp.csr_matrix(like.shape, dtype=complex), like.basis, like.target)
    for k in keys:
        if k in blocks:
            out = out + blocks[k]
    return out


def _all_off(ball, term) -> bool:
    return not any(ball[m] for m, _ in term)


def _q4_pattern(ball, term) -> bool:
    # a*_q a*_q' a_i' a_i with both created modes on one side of the Fermi surface
    (q, _), (q2, _), (i2, _), (i, _) = term
    return (not ball[q] and not ball[q2] and ball[i] and ball[i2]) or (ball[q] and ball[q2] and not ball[i] and not ball[i2])


def _delta(term) -> int:
    return sum(1 if d else -1 for _, d in term)


@dataclass(eq=False)
class Decomposition:
    """Pieces of ``R^* H R`` on the excitation-picture sector basis."""

    modes: ModeSet
    particle_basis: FockBasis
    basis: FockBasis
    E_HF: float
    H: SparseOperator
    R: SparseOperator
    H_conj: SparseOperator
    H0: SparseOperator
    X: SparseOperator
    Q: tuple[SparseOperator, ...]
    Q_tilde: tuple[SparseOperator, ...]
    dropped: int
    diagnostics: dict = field(default_factory=dict)

    def total(self, tilde: bool = False) -> SparseOperator:
        qs = self.Q_tilde if tilde else self.Q
        out = identity(self.basis) * self.E_HF + self.H0 + self.X
        for q in qs:
            out = out + q
        return out

    def residual_operator(self) -> SparseOperator:
        return self.H_conj - self.total()

    def discarded(self) -> SparseOperator:
        """``R^* H R - (E_HF + H0 + X + sum Q~_i)``: the equal-spin quartic part."""
        return self.H_conj - self.total(tilde=True)

    def identity_residual(self, psi: np.ndarray) -> float:
        """``|<psi, H psi> - E_HF - <R^* psi, (H0 + X + sum Q_i) R^* psi>|`` for a particle-sector ``psi``."""
        lhs = self.H.expect(psi)
        phi = self.R.H @ psi
        rhs = self.total().expect(phi)
        return abs(lhs - rhs)


def _diag(basis: FockBasis, weights) -> SparseOperator:
    vals = basis.occupations() @ np.asarray(weights, dtype=float)
    return SparseOperator(sp.diags(vals.astype(complex), format="csr"), basis, basis)


def _exchange_weights(ms: ModeSet, fourier) -> np.ndarray:
    """``x_A = -(s_A / L^3) sum_{k in B_sigma(A)} Vhat(A - k)`` with ``s_A = +1`` outside the ball, ``-1`` inside."""
    scale = 2.0 * math.pi / ms.L
    w = np.zeros(ms.M)
    for A in range(ms.M):
        same = np.flatnonzero((ms.spin == ms.spin[A]) & ms.in_ball)
        d = ms.n[same] - ms.n[A]
        nsq = np.einsum("ij,ij->i", d, d)
        vals = [float(fourier(scale * math.sqrt(int(x)))) for x in nsq]
        s = -1.0 if ms.in_ball[A] else 1.0
        w[A] = -s * math.fsum(vals) / ms.L**3
    return w


def decompose(
    ms: ModeSet,
    fourier,
    momentum=None,
    *,
    symbolic_check: bool = True,
    corrupt_sign: bool = False,
    terms: HamiltonianTerms | None = None,
) -> Decomposition:
    """Assemble every piece on the sector ``(N_up, N_down)`` = ball counts.

    ``Q2`` and ``Q3`` are read off the exact remainder.  With
    ``symbolic_check`` the same pieces are also obtained by normal ordering
    ``R^* H R`` symbolically, and the largest matrix deviations between the
    two routes are stored in ``diagnostics``.  ``corrupt_sign`` flips the
    sign of ``X`` and exists only as a negative control.
    """
    terms = hamiltonian_terms(ms, fourier) if terms is None else terms
    P = FockBasis.build(ms, ms.ball_counts, momentum, "particle")
    E = FockBasis.build(ms, ms.ball_counts, momentum, "excitation")
    H = terms.total.to_sparse(P)
    H.meta["dropped"] = terms.dropped
    R = particle_hole_R(ms, E, P)
    H_conj = R.H @ H @ R

    balls = (fermi_ball(ms.L, ms.ball_counts[UP], "up"), fermi_ball(ms.L, ms.ball_counts[DOWN], "down"))
    e_hf = hf_energy(balls[0], balls[1], fourier).total

    kf2 = np.array([ms.kF(int(s)) ** 2 for s in ms.spin])
    H0 = _diag(E, np.abs(ms.ksq - kf2))
    xw = _exchange_weights(ms, fourier)
    X = _diag(E, -xw if corrupt_sign else xw)

    ball = ms.in_ball
    I = identity(E)

    def split(interaction: FermionOperator, conj: SparseOperator, const: float):
        q1 = interaction.filter(lambda t: _all_off(ball, t)).to_sparse(E)
        q4 = ph_substitute(interaction.filter(lambda t: _q4_pattern(ball, t)), ms).to_sparse(E)
        rem = conj - I * const - q1 - q4
        blocks = excitation_blocks(rem)
        q2 = _block(blocks, [0], rem)
        q3 = _block(blocks, [-2, 2], rem)
        leak = _block(blocks, [d for d in blocks if d not in (-2, 0, 2)], rem).max_abs()
        return (q1, q2, q3, q4), leak

    Q, leak = split(terms.interaction, H_conj - H0 - X, e_hf)
    H_opp = terms.opposite_spin.to_sparse(P)
    vol = ms.L**3
    c_opp = float(fourier(0.0)) * ms.ball_counts[UP] * ms.ball_counts[DOWN] / vol
    Qt, leak_t = split(terms.opposite_spin, R.H @ H_opp @ R, c_opp)

    diag = {"delta4_leak": leak, "delta4_leak_tilde": leak_t, "hf_from_fock": H.expect(R @ E.basis_vector(0)).real}
    if symbolic_check:
        diag.update(_symbolic_route(ms, terms, E, e_hf, H0, X, Q))
    return Decomposition(ms, P, E, e_hf, H, R, H_conj, H0, X, Q, Qt, terms.dropped, diag)


def _symbolic_route(ms, terms, E, e_hf, H0, X, Q) -> dict:
    """Normal-order ``R^* H R`` symbolically and compare with the matrix route."""
    ball = ms.in_ball
    conj = ph_substitute(terms.total, ms).normal_ordered()
    parts = conj.by_degree()
    const = parts.get(0, FermionOperator()).terms.get((), 0.0)
    quad = parts.get(2, FermionOperator()).to_sparse(E)
    quart = parts.get(4, FermionOperator())
    q1 = quart.filter(lambda t: _delta(t) == 0 and _all_off(ball, t)).to_sparse(E)
    q2 = quart.filter(lambda t: _delta(t) == 0 and not _all_off(ball, t)).to_sparse(E)
    q3 = quart.filter(lambda t: abs(_delta(t)) == 2).to_sparse(E)
    q4 = quart.filter(lambda t: abs(_delta(t)) == 4).to_sparse(E)
    return {
        "constant_vs_hf": abs(const - e_hf),
        "one_body_vs_H0_X": (quad - H0 - X).max_abs(),
        "Q1_deviation": (q1 - Q[0]).max_abs(),
        "Q2_deviation": (q2 - Q[1]).max_abs(),
        "Q3_deviation": (q3 - Q[2]).max_abs(),
        "Q4_deviation": (q4 - Q[3]).max_abs(),
    }
