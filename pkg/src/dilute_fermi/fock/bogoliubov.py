"""Pseudo-bosonic pair operators, cutoffs and the Bogoliubov unitary ``T_lambda``.

In the excitation picture

    b_{p,sigma} = sum_k u(k+p) v(k) a_{k+p,sigma} a_{k,sigma}

removes a particle outside and a hole inside the Fermi ball.  ``B`` pairs an
up-spin ``b^r_p`` with a down-spin ``b^r_{-p}`` weighted by the Fourier
transform of the scattering correction ``phi``, and ``T_lambda =
exp(lambda (B - B^*))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, expm_multiply

from .basis import FockBasis
from .modes import DOWN, UP, ModeSet
from .operators import FermionOperator, SparseOperator

__all__ = [
    "CutoffPair",
    "ModeSetTooSmall",
    "smoothstep",
    "pseudo_boson",
    "pseudo_boson_operator",
    "pair_count",
    "build_B",
    "regularized_Q4",
    "BogoliubovTransform",
    "bogoliubov_T",
    "DuhamelResult",
    "duhamel_check",
    "propagation_profile",
    "approx_ground_state_check",
    "ground_state",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 1 << 12


class ModeSetTooSmall(UserWarning):
    pass


def smoothstep(t):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True, eq=False)
class CutoffPair:
    """Per-mode weights ``u^r`` (outside the ball) and ``v^r`` (inside).

    Smooth weights honour the plateaus

        v = 1 for |k| < kF - rho^alpha,   v = 0 for |k| >= kF,
        u = 0 for |k| <= kF,  u = 1 for 2 kF <= |k| <= 1.5 rho^-beta,  u = 0 for |k| >= 2 rho^-beta,

    with ``rho`` the density of the spin species, and interpolate with
    :func:`smoothstep` in ``|k|`` in between.
    """

    alpha: float | None
    beta: float | None
    rho_ref: tuple[float, float]
    u: np.ndarray
    v: np.ndarray
    modes: ModeSet

    @classmethod
    def indicator(cls, ms: ModeSet) -> "CutoffPair":
        u = (~ms.in_ball).astype(float)
        v = ms.in_ball.astype(float)
        rho = tuple(c / ms.L**3 for c in ms.ball_counts)
        return cls(None, None, rho, u, v, ms)

    @classmethod
    def smooth(cls, ms: ModeSet, alpha: float, beta: float, rho=None, warn: bool = True) -> "CutoffPair":
        if rho is None:
            rho = tuple(c / ms.L**3 for c in ms.ball_counts)
        elif np.ndim(rho) == 0:
            rho = (float(rho), float(rho))
        kabs = np.sqrt(ms.ksq)
        nsq = ms.nsq
        u = np.zeros(ms.M)
        v = np.zeros(ms.M)
        for s in (UP, DOWN):
            sel = ms.spin == s
            kf = ms.kF(s)
            width = rho[s] ** alpha
            top = rho[s] ** (-beta)
            if 2.0 * kf > 1.5 * top:
                raise ValueError(f"u plateau is empty: 2 kF = {2 * kf:.4g} > 1.5 rho^-beta = {1.5 * top:.4g}")
            inside = nsq <= ms.nsq_fermi[s]
            k = kabs[sel]
            vs = np.where(k < kf - width, 1.0, smoothstep((kf - k) / width))
            vs[~inside[sel]] = 0.0
            rise = np.ones_like(k) if kf == 0 else smoothstep((k - kf) / kf)
            fall = smoothstep((2.0 * top - k) / (0.5 * top))
            us = np.where((k >= 2.0 * kf) & (k <= 1.5 * top), 1.0, np.minimum(rise, fall))
            us[k >= 2.0 * top] = 0.0
            us[inside[sel]] = 0.0
            u[sel] = us
            v[sel] = vs
            if warn and kabs[sel].max(initial=0.0) < 1.5 * top:
                warnings.warn(
                    f"spin {s}: modes reach |k| = {kabs[sel].max(initial=0.0):.4g}, "
                    f"the u plateau extends to {1.5 * top:.4g}",
                    ModeSetTooSmall,
                    stacklevel=2,
                )
        return cls(alpha, beta, tuple(rho), u, v, ms)

    def regularized_density(self, spin: int) -> float:
        """``(1/L^3) sum_k v^r(k)^2`` over modes of one spin."""
        sel = self.modes.spin == spin
        return float(np.sum(self.v[sel] ** 2)) / self.modes.L**3


def pair_count(ms: ModeSet, p, spin: int) -> int:
    """``#{k in ball : k + p outside the ball, both modes in the set}``."""
    count = 0
    for k in ms.modes_of(spin):
        if not ms.in_ball[k]:
            continue
        q = ms.index(spin, ms.n[k] + np.asarray(p))
        if q is not None and not ms.in_ball[q]:
            count += 1
    return count


def pseudo_boson(ms: ModeSet, p, spin: int, cutoffs: CutoffPair | None = None) -> FermionOperator:
    """Symbolic ``b_{p,sigma}``; indicator weights unless ``cutoffs`` is given."""
    cut = CutoffPair.indicator(ms) if cutoffs is None else cutoffs
    p = np.asarray(p, dtype=np.int64)
    out = FermionOperator()
    for k in ms.modes_of(spin):
        k = int(k)
        q = ms.index(spin, ms.n[k] + p)
        if q is None:
            continue
        w = cut.u[q] * cut.v[k]
        if w:
            out.add_term(((q, 0), (k, 0)), float(w))
    return out


def pseudo_boson_operator(basis: FockBasis, p, spin: int, cutoffs: CutoffPair | None = None) -> SparseOperator:
    return pseudo_boson(basis.modes, p, spin, cutoffs).to_sparse(basis)


def _transfer_momenta(ms: ModeSet) -> list[tuple[int, int, int]]:
    up = ms.n[ms.spin == UP]
    d = (up[:, None, :] - up[None, :, :]).reshape(-1, 3)
    return sorted({tuple(int(c) for c in row) for row in d})


def _paired(ms: ModeSet, weight, cutoffs: CutoffPair) -> FermionOperator:
    """``(1/L^3) sum_p weight(|p|) b_{p,up} b_{-p,down}``."""
    scale = 2.0 * math.pi / ms.L
    out = FermionOperator()
    cache: dict[int, float] = {}
    for p in _transfer_momenta(ms):
        bu = pseudo_boson(ms, p, UP, cutoffs)
        if not bu.terms:
            continue
        bd = pseudo_boson(ms, tuple(-c for c in p), DOWN, cutoffs)
        if not bd.terms:
            continue
        nsq = p[0] ** 2 + p[1] ** 2 + p[2] ** 2
        if nsq not in cache:
            cache[nsq] = float(weight(scale * math.sqrt(nsq)))
        if cache[nsq]:
            out += (bu * bd) * (cache[nsq] / ms.L**3)
    return out


def build_B(basis: FockBasis, cutoffs: CutoffPair, phi_hat) -> SparseOperator:
    """``B = (1/L^3) sum_p phi_hat(|p|) b^r_{p,up} b^r_{-p,down}``.

    ``phi_hat`` is a callable of ``|p|`` or a scattering solution, whose
    zero-extended ``phi`` is transformed radially; sampling that transform on
    the lattice gives the Fourier coefficients of its periodization.
    """
    fn = phi_hat.phi_hat if hasattr(phi_hat, "phi_hat") else phi_hat
    return _paired(basis.modes, fn, cutoffs).to_sparse(basis)


def regularized_Q4(basis: FockBasis, fourier, cutoffs: CutoffPair) -> SparseOperator:
    """``(1/L^3) sum_p Vhat(p) b^r_{p,up} b^r_{-p,down} + h.c.``."""
    op = _paired(basis.modes, fourier, cutoffs)
    return (op + op.adjoint()).to_sparse(basis)


class BogoliubovTransform:
    """``T_lambda = exp(lambda G)`` with ``G = B - B^*``.

    Dense bases (dimension up to :data:`DENSE_LIMIT`) diagonalise the
    Hermitian ``-iG`` once, so every ``lambda`` costs one matrix product.
    Larger bases fall back to ``expm_multiply`` on vectors.
    """

    def __init__(self, B: SparseOperator, dense_limit: int = DENSE_LIMIT):
        self.B = B
        self.basis = B.basis
        self.G = B - B.H
        self.dense = self.basis.dim <= dense_limit
        if self.dense:
            K = -1j * self.G.toarray()
            K = 0.5 * (K + K.conj().T)
            self._w, self._V = np.linalg.eigh(K)
        self.generator_norm = float(sp.linalg.norm(self.G.matrix)) if self.G.matrix.nnz else 0.0

    def matrix(self, lam: float) -> np.ndarray:
        if not self.dense:
            raise ValueError("dense matrix requested above the dense limit; use apply()")
        return (self._V * np.exp(1j * lam * self._w)) @ self._V.conj().T

    def operator(self, lam: float) -> SparseOperator:
        return SparseOperator(sp.csr_matrix(self.matrix(lam)), self.basis, self.basis)

    def apply(self, lam: float, psi: np.ndarray) -> np.ndarray:
        """``T_lambda psi``."""
        if self.dense:
            return self._V @ (np.exp(1j * lam * self._w) * (self._V.conj().T @ psi))
        out = expm_multiply(self.G.matrix * lam, psi)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError(f"exponential did not converge, |G| = {self.generator_norm:.3g}")
        return out

    def apply_adjoint(self, lam: float, psi: np.ndarray) -> np.ndarray:
        """``T_lambda^* psi = T_{-lambda} psi``."""
        return self.apply(-lam, psi)


def bogoliubov_T(B: SparseOperator, lam: float, method: str = "eigh") -> SparseOperator:
    """``T_lambda`` as an explicit matrix; ``method='expm'`` uses Pade scaling and squaring."""
    if method == "expm":
        G = (B - B.H).toarray()
        return SparseOperator(sp.csr_matrix(sla.expm(lam * G)), B.basis, B.basis)
    return BogoliubovTransform(B).operator(lam)


@dataclass(frozen=True)
class DuhamelResult:
    """Central difference of ``f(lam) = <T*_lam psi, A T*_lam psi>`` against its exact derivative.

    ``exact = <phi, [B - B^*, A] phi>`` with ``phi = T*_lam psi``.
    ``printed_order_residual`` compares against the commutator taken in the
    opposite order, ``[A, B - B^*]``.
    """

    residual: float
    finite_difference: float
    exact: float
    printed_order_residual: float


def duhamel_check(A: SparseOperator, T: BogoliubovTransform | SparseOperator, psi, lam: float, h: float = 1e-4) -> DuhamelResult:
    T = T if isinstance(T, BogoliubovTransform) else BogoliubovTransform(T)

    def f(x):
        phi = T.apply_adjoint(x, psi)
        return A.expect(phi).real

    fd = (f(lam + h) - f(lam - h)) / (2.0 * h)
    phi = T.apply_adjoint(lam, psi)
    exact = T.G.commutator(A).expect(phi).real
    return DuhamelResult(abs(fd - exact), fd, exact, abs(fd + exact))


def propagation_profile(ops: dict, T: BogoliubovTransform, psi, lams) -> dict:
    """``<T*_lam psi, A T*_lam psi>`` for each named operator across ``lams``."""
    out = {name: [] for name in ops}
    for lam in lams:
        phi = T.apply_adjoint(lam, psi)
        for name, A in ops.items():
            out[name].append(A.expect(phi).real)
    return {k: np.array(v) for k, v in out.items()}


def approx_ground_state_check(psi, H: SparseOperator, ms: ModeSet, C: float = 1.0) -> tuple[float, float]:
    """``|<psi, H psi> - sum_{ball} |k|^2|`` and ``C L^3 rho^2`` with ``rho`` the total density."""
    kin = float(np.sum(ms.ksq[ms.in_ball]))
    lhs = abs(H.expect(psi).real - kin)
    rho = sum(ms.ball_counts) / ms.L**3
    return lhs, C * ms.L**3 * rho**2


def ground_state(H: SparseOperator, dense_limit: int = DENSE_LIMIT) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; dense below ``dense_limit``, Lanczos above."""
    if H.shape[0] <= dense_limit:
        w, V = np.linalg.eigh(H.toarray())
        return float(w[0]), V[:, 0]
    w, V = eigsh(H.matrix, k=1, which="SA", tol=1e-12)
    return float(w[0]), V[:, 0]
