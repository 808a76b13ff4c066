"""Named invariant checks of the Fock engine on one small instance.

Each check yields a :class:`CheckResult`; checks are grouped into
independent tasks that may run on a thread pool, and results are always
reported in declaration order.  Random states come from per-task child
seeds, so the report does not depend on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .fock import (
    DOWN,
    UP,
    BogoliubovTransform,
    CutoffPair,
    FermionOperator,
    FockBasis,
    ModeSet,
    build_B,
    decompose,
    duhamel_check,
    ground_state,
    hamiltonian_terms,
    momentum_operator,
    number_operator,
    pair_count,
    propagation_profile,
    pseudo_boson_operator,
    regularized_Q4,
    verify_conjugation,
    approx_ground_state_check,
)
from .fock.bogoliubov import _transfer_momenta
from .lattice import fermi_ball
from .potential import FourierPotential, RadialPotential
from .scattering import solve_scattering

__all__ = ["CheckResult", "VerifyInstance", "build_instance", "run_checks", "DEFAULT_SLACK"]

DEFAULT_SLACK = 1e-6
# Duhamel order test: step sizes relative to the spectral radius of B - B^*
ORDER_STEP = 0.5


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float
    passed: bool
    enforced: bool = True
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _result(name, residual, threshold, enforced=True, **detail) -> CheckResult:
    residual = float(residual)
    return CheckResult(name, residual, float(threshold), bool(residual <= threshold), enforced, detail)


@dataclass(eq=False)
class VerifyInstance:
    modes: ModeSet
    potential: RadialPotential
    fourier: FourierPotential
    rho: float
    gamma: float
    alpha: float
    beta: float
    cutoff_kind: str
    n_states: int
    h: float
    lam: float
    enforce_discard: bool
    corrupt_sign: bool


def build_instance(cfg) -> VerifyInstance:
    f = cfg.values["fock"]
    p = cfg.values["potential"]
    pot = RadialPotential(p["kind"], p["V0"], p["R0"])
    L = f["L"]
    ms = ModeSet.from_balls(
        fermi_ball(L, f["N_up"], "up"),
        fermi_ball(L, f["N_down"], "down"),
        f["extra_up"],
        f["extra_down"],
        max_modes=f["max_modes"],
    )
    rho = (f["N_up"] + f["N_down"]) / L**3
    return VerifyInstance(
        ms,
        pot,
        FourierPotential(pot, p["quadrature_tol"]),
        rho,
        f["gamma"],
        f["alpha"],
        f["beta"],
        f["cutoffs"],
        f["n_states"],
        f["h"],
        f["lambda"],
        f["enforce_discard"],
        f["corrupt_sign"],
    )


def _car(inst: VerifyInstance, rng) -> list[CheckResult]:
    ms = inst.modes
    full = FockBasis.full(ms)
    ann = [FermionOperator({((j, 0),): 1.0}).to_sparse(full) for j in range(ms.M)]
    cre = [a.H for a in ann]
    eye = _eye(full.dim)
    worst_mixed = worst_same = 0.0
    for i in range(ms.M):
        for j in range(i, ms.M):
            mixed = (ann[i] @ cre[j] + cre[j] @ ann[i]).matrix
            if i == j:
                mixed = mixed - eye
            worst_mixed = max(worst_mixed, abs(mixed).max() if mixed.nnz else 0.0)
            same = (ann[i] @ ann[j] + ann[j] @ ann[i]).matrix
            worst_same = max(worst_same, abs(same).max() if same.nnz else 0.0)
    return [
        _result("car_mixed_anticommutator", worst_mixed, 0.0),
        _result("car_same_anticommutator", worst_same, 0.0),
        _result("particle_hole_conjugation", verify_conjugation(ms), 0.0),
    ]


def _eye(n):
    return sp.identity(n, dtype=complex, format="csr")


def _cutoffs(inst: VerifyInstance) -> CutoffPair:
    if inst.cutoff_kind == "indicator":
        return CutoffPair.indicator(inst.modes)
    return CutoffPair.smooth(inst.modes, inst.alpha, inst.beta, warn=False)


def _decomposition(inst: VerifyInstance, rng) -> list[CheckResult]:
    ms = inst.modes
    terms = hamiltonian_terms(ms, inst.fourier)
    d = decompose(ms, inst.fourier, terms=terms, corrupt_sign=inst.corrupt_sign)
    E, P = d.basis, d.particle_basis
    out = []
    RR = (d.R.H @ d.R - _eye(E.dim)).max_abs()
    out.append(_result("R_unitarity", RR, 1e-12))
    omega = E.basis_vector(0)
    ffg = P.basis_vector(ms.ball_mask)
    RO = d.R @ omega
    nval = number_operator(P).expect(RO).real
    out.append(_result("R_vacuum_is_ffg", np.abs(RO - ffg).max() + abs(nval - sum(ms.ball_counts)), 1e-12))
    out.append(_result("hamiltonian_hermitian", d.H.hermiticity_defect(), 1e-12))
    mom = max(d.H.commutator(momentum_operator(P, a)).max_abs() for a in range(3))
    out.append(_result("hamiltonian_conserves_momentum", mom, 1e-12))
    e_fock = d.H.expect(RO).real
    out.append(_result("ffg_energy", abs(e_fock - d.E_HF) / max(abs(d.E_HF), 1e-300), 1e-10, e_fock=e_fock, e_hf=d.E_HF))
    worst = 0.0
    for _ in range(inst.n_states):
        worst = max(worst, d.identity_residual(P.random_state(rng)))
    out.append(_result("decomposition_identity", worst, 1e-9, states=inst.n_states))
    routes = max(v for k, v in d.diagnostics.items() if k.endswith("deviation") or k.startswith(("one_body", "constant")))
    out.append(_result("decomposition_routes_agree", routes, 1e-9))
    leak = max(d.diagnostics["delta4_leak"], d.diagnostics["delta4_leak_tilde"])
    out.append(_result("decomposition_no_stray_blocks", leak, 1e-12))
    same = (d.R.H @ terms.same_spin.to_sparse(P) @ d.R).toarray()
    out.append(_result("equal_spin_interaction_psd", max(0.0, -np.linalg.eigvalsh(same).min()), 1e-10))
    disc = np.linalg.eigvalsh(d.discarded().toarray()).min()
    out.append(_result("equal_spin_discard_psd", max(0.0, -disc), 1e-10, enforced=inst.enforce_discard, min_eigenvalue=float(disc)))
    return out


def _pseudo_bosons(inst: VerifyInstance, rng) -> list[CheckResult]:
    ms = inst.modes
    E = FockBasis.excitation(ms)
    omega = E.basis_vector(0)
    counts = []
    worst_count = worst_comm = worst_near = 0.0
    momenta = [p for p in _transfer_momenta(ms) if any(p)]
    excit = E.excitation_number()
    for spin in (UP, DOWN):
        ops = {}
        for p in momenta:
            b = pseudo_boson_operator(E, p, spin)
            if not b.matrix.nnz:
                continue
            ops[p] = b
            c = b.commutator(b.H).expect(omega).real
            want = pair_count(ms, p, spin)
            counts.append((p, spin, c, want))
            worst_count = max(worst_count, abs(c - want))
            comm = b.commutator(b.H).toarray() - want * np.eye(E.dim)
            low = excit <= 2
            worst_near = max(worst_near, np.abs(comm[np.ix_(low, low)]).max() - 2.0)
        keys = list(ops)
        for i, p in enumerate(keys):
            for q in keys[i:]:
                worst_comm = max(worst_comm, ops[p].commutator(ops[q]).max_abs())
    return [
        _result("pseudo_boson_vacuum_commutator", worst_count, 0.0, momenta=len(counts)),
        _result("pseudo_boson_commute", worst_comm, 0.0),
        _result("pseudo_boson_near_bosonic", max(worst_near, 0.0), 0.0),
    ]


def _bogoliubov(inst: VerifyInstance, rng) -> list[CheckResult]:
    ms = inst.modes
    E = FockBasis.excitation(ms)
    cut = _cutoffs(inst)
    sol = solve_scattering(inst.potential, inst.rho, inst.gamma)
    B = build_B(E, cut, sol)
    omega = E.basis_vector(0)
    out = [_result("B_annihilates_vacuum", np.abs(B.matrix @ omega).max(), 0.0)]
    mom = max(B.commutator(momentum_operator(E, a)).max_abs() for a in range(3))
    out.append(_result("B_conserves_momentum", mom, 1e-14))
    T = BogoliubovTransform(B)
    U = T.matrix(inst.lam)
    out.append(_result("T_unitarity", np.abs(U @ U.conj().T - np.eye(E.dim)).max(), 1e-12))
    group = np.abs(T.matrix(0.3) @ T.matrix(0.45) - T.matrix(0.75)).max()
    out.append(_result("T_group_law", group, 1e-10))
    N = number_operator(E)
    psi = E.random_state(rng)
    res = duhamel_check(N, T, psi, inst.lam, inst.h)
    out.append(_result("duhamel_number_operator", res.residual, 1e-6, h=inst.h, exact=res.exact))
    H0 = decompose(ms, inst.fourier, symbolic_check=False).H0
    A = H0 + N
    radius = float(np.abs(T._w).max()) if T.dense else T.generator_norm
    if radius > 0:
        h1 = ORDER_STEP / radius
        r1 = duhamel_check(A, T, psi, inst.lam, h1).residual
        r2 = duhamel_check(A, T, psi, inst.lam, h1 / 2).residual
        ratio = r1 / r2 if r2 > 0 else math.inf
        out.append(_result("duhamel_second_order", abs(ratio / 4.0 - 1.0), 0.2, ratio=ratio, h=h1))
    else:
        out.append(_result("duhamel_second_order", 0.0, 0.2, ratio=None, h=None))
    return out


def _regularized(inst: VerifyInstance, rng) -> list[CheckResult]:
    ms = inst.modes
    d = decompose(ms, inst.fourier, symbolic_check=False)
    E = d.basis
    q4r = regularized_Q4(E, inst.fourier, CutoffPair.indicator(ms))
    out = [_result("regularized_Q4_indicator_limit", (q4r - d.Q_tilde[3]).max_abs(), 1e-12)]
    energy, gs = ground_state(d.H)
    phi = d.R.H @ gs
    cut = _cutoffs(inst)
    sol = solve_scattering(inst.potential, inst.rho, inst.gamma)
    T = BogoliubovTransform(build_B(E, cut, sol))
    lams = np.linspace(0.0, 1.0, 11)
    prof = propagation_profile({"H0": d.H0, "Q1": d.Q[0], "N": number_operator(E)}, T, phi, lams)
    worst = max(float(np.max(v) - (10.0 * v[0] + DEFAULT_SLACK)) for v in prof.values())
    out.append(_result("propagation_bounded", max(worst, 0.0), 0.0, **{k: v.tolist() for k, v in prof.items()}))
    lhs, bound = approx_ground_state_check(gs, d.H, ms)
    out.append(
        _result(
            "approximate_ground_state",
            lhs - bound,
            0.0,
            enforced=False,
            lhs=lhs,
            bound=bound,
            ground_energy=energy,
            rho_r_up=cut.regularized_density(UP),
            rho_r_down=cut.regularized_density(DOWN),
        )
    )
    return out


TASKS = (_car, _decomposition, _pseudo_bosons, _bogoliubov, _regularized)


def run_checks(inst: VerifyInstance, seed: int = 0, threads: int = 1) -> list[CheckResult]:
    seeds = np.random.SeedSequence(seed).spawn(len(TASKS))
    jobs = [(task, np.random.default_rng(s)) for task, s in zip(TASKS, seeds)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: j[0](inst, j[1]), jobs))
    else:
        parts = [task(inst, rng) for task, rng in jobs]
    return [r for part in parts for r in part]
