import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilute_fermi.fock import (
    FockBasis,
    build_hamiltonian,
    decompose,
    hamiltonian_terms,
    ladder,
    momentum_operator,
    number_operator,
    particle_hole_R,
    ph_substitute,
    verify_conjugation,
)
from dilute_fermi.hf import hf_energy_from_counts

from .conftest import small_modes


@pytest.fixture(scope="module")
def dec8(modes8, bump_hat):
    return decompose(modes8, bump_hat)


@pytest.fixture(scope="module")
def dec16(modes16, bump_hat):
    return decompose(modes16, bump_hat)


def test_conjugation_is_exact(modes8):
    assert verify_conjugation(modes8) == 0.0


def test_R_is_unitary_and_maps_vacuum_to_ball(modes8):
    full = FockBasis.full(modes8)
    R = particle_hole_R(modes8, full, full).toarray()
    assert np.array_equal(R.conj().T @ R, np.eye(full.dim))
    omega = np.zeros(full.dim)
    omega[0] = 1
    img = R @ omega
    assert img[modes8.ball_mask] == 1.0 and np.count_nonzero(img) == 1


def test_symbolic_substitution_matches_matrix(modes8):
    full = FockBasis.full(modes8)
    R = particle_hole_R(modes8, full, full)
    op = ladder(3, True) * ladder(0, False) + ladder(7, True) * ladder(4, False) * ladder(0, True) * ladder(1, False)
    lhs = (R.H @ op.to_sparse(full) @ R).toarray()
    assert np.array_equal(lhs, ph_substitute(op, modes8).to_sparse(full).toarray())


def test_hamiltonian_hermitian_and_translation_invariant(modes16, bump_hat):
    b = FockBasis.build(modes16, modes16.ball_counts)
    H = build_hamiltonian(modes16, bump_hat, b)
    assert H.hermiticity_defect() < 1e-15
    for a in range(3):
        assert H.commutator(momentum_operator(b, a)).max_abs() < 1e-12
    assert H.commutator(number_operator(b)).max_abs() == 0.0


@pytest.mark.parametrize("fixture", ["dec8", "dec16"])
def test_ffg_energy_matches_hartree_fock(request, fixture, bump_hat):
    d = request.getfixturevalue(fixture)
    ms = d.modes
    P = d.particle_basis
    e = d.H.expect(P.basis_vector(ms.ball_mask)).real
    ref = hf_energy_from_counts(ms.L, *ms.ball_counts, bump_hat).total
    assert e == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("fixture", ["dec8", "dec16"])
def test_decomposition_identity_on_random_states(request, fixture, rng):
    d = request.getfixturevalue(fixture)
    for _ in range(10):
        assert d.identity_residual(d.particle_basis.random_state(rng)) < 1e-11


def test_decomposition_routes_agree(dec16):
    for key in ("Q1_deviation", "Q2_deviation", "Q3_deviation", "Q4_deviation", "one_body_vs_H0_X"):
        assert dec16.diagnostics[key] < 1e-12
    assert dec16.diagnostics["delta4_leak"] == 0.0


def test_exchange_weights_against_direct_sum(dec8, bump_hat):
    # x_A = -(s_A / L^3) sum_{k in ball of A's spin} Vhat(A - k), s_A = +1 off the ball, -1 inside
    ms = dec8.modes
    c = 2 * math.pi / ms.L
    x = np.zeros(ms.M)
    for A in range(ms.M):
        s = -1.0 if ms.in_ball[A] else 1.0
        ball = [j for j in range(ms.M) if ms.in_ball[j] and ms.spin[j] == ms.spin[A]]
        x[A] = -s / ms.L**3 * sum(bump_hat(c * np.linalg.norm(ms.n[A] - ms.n[j])) for j in ball)
    diag = dec8.X.toarray().diagonal().real
    assert np.allclose(diag, dec8.basis.occupations() @ x, atol=1e-15, rtol=1e-13)


def test_kinetic_part_is_distance_to_fermi_surface(dec8):
    ms = dec8.modes
    w = np.abs(ms.ksq - np.array([ms.kF(int(s)) ** 2 for s in ms.spin]))
    assert np.allclose(dec8.H0.toarray().diagonal().real, dec8.basis.occupations() @ w)


def test_sign_corruption_is_detected(modes8, bump_hat):
    bad = decompose(modes8, bump_hat, corrupt_sign=True)
    assert bad.diagnostics["one_body_vs_H0_X"] > 1e-6


def test_q_pieces_hermitian(dec16):
    assert dec16.H0.hermiticity_defect() == 0.0
    for q in dec16.Q + dec16.Q_tilde:
        assert q.hermiticity_defect() < 1e-14


def test_equal_spin_interaction_is_positive(modes16, bump_hat):
    d = decompose(modes16, bump_hat, symbolic_check=False)
    terms = hamiltonian_terms(modes16, bump_hat)
    same = (d.R.H @ terms.same_spin.to_sparse(d.particle_basis) @ d.R).toarray()
    assert np.linalg.eigvalsh(same).min() > -1e-12


def test_discarded_block_on_hole_particle_state(dec8, bump_hat):
    # one same-spin particle-hole pair: exact expectation (Vhat(q - k) - Vhat(0)) / L^3 < 0
    ms = dec8.modes
    k, q = ms.index(0, (0, 0, 0)), ms.index(0, (1, 0, 0))
    psi = dec8.basis.basis_vector((1 << k) | (1 << q))
    want = (bump_hat(2 * math.pi / ms.L) - bump_hat(0.0)) / ms.L**3
    assert dec8.discarded().expect(psi).real == pytest.approx(want, rel=1e-12)
    assert want < 0


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=10, deadline=None)
def test_identity_holds_in_momentum_sectors(seed):
    from dilute_fermi.potential import FourierPotential, RadialPotential

    ms = small_modes()
    vhat = FourierPotential(RadialPotential("soft_sphere", 3.0, 0.7))
    rng = np.random.default_rng(seed)
    d = decompose(ms, vhat, momentum=(0, 0, 0), symbolic_check=False)
    assert d.identity_residual(d.particle_basis.random_state(rng)) < 1e-11
