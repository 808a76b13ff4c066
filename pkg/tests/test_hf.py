import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilute_fermi.hf import (
    direct_term,
    exchange_term,
    free_kinetic_density,
    hf_density,
    hf_energy,
    hf_energy_from_counts,
    kinetic_energy,
    pair_distance_histogram,
    taylor_exchange_residual,
)
from dilute_fermi.lattice import fermi_ball
from dilute_fermi.potential import FourierPotential, RadialPotential


def brute_hf(L, Nu, Nd, vhat):
    """Direct double loops over explicit momenta."""
    c = 2 * math.pi / L
    balls = [fermi_ball(L, Nu).n, fermi_ball(L, Nd).n]
    kin = sum(c * c * float(n @ n) for b in balls for n in b)
    direct = 0.5 * L**3 * vhat(0.0) * ((Nu + Nd) / L**3) ** 2
    exch = 0.0
    for b in balls:
        for n, m in itertools.product(b, b):
            exch -= vhat(c * float(np.linalg.norm(n - m))) / (2 * L**3)
    return kin, direct, exch


@pytest.mark.parametrize("L,Nu,Nd", [(3.0, 7, 7), (5.0, 19, 7), (8.0, 33, 27)])
def test_energy_matches_brute_force(L, Nu, Nd, bump_hat):
    bd = hf_energy_from_counts(L, Nu, Nd, bump_hat)
    kin, direct, exch = brute_hf(L, Nu, Nd, bump_hat)
    assert bd.kinetic == pytest.approx(kin, rel=1e-13)
    assert bd.direct == pytest.approx(direct, rel=1e-13)
    assert bd.exchange == pytest.approx(exch, rel=1e-12)
    assert bd.total == pytest.approx(kin + direct + exch, rel=1e-12)


def test_taylor_residual_definition(bump_hat):
    ball_u, ball_d = fermi_ball(6.0, 33), fermi_ball(6.0, 19)
    ex = exchange_term((ball_u, ball_d), bump_hat)
    direct_same = 0.5 * bump_hat(0.0) * (33**2 + 19**2) / 6.0**3
    res = taylor_exchange_residual((ball_u, ball_d), bump_hat)
    assert res == pytest.approx(ex + direct_same, rel=1e-10)
    # Vhat(p) <= Vhat(0) for a nonnegative potential
    assert res >= 0


@given(st.sampled_from([1, 7, 19, 27, 33, 57, 81, 93, 123]))
@settings(max_examples=9, deadline=None)
def test_histogram_counts_all_ordered_pairs(N):
    ball = fermi_ball(1.0, N)
    hist = pair_distance_histogram(ball)
    assert hist.sum() == N * N
    assert hist[0] == N


def test_histogram_independent_of_threads():
    ball = fermi_ball(1.0, 2109)
    assert np.array_equal(pair_distance_histogram(ball, 1), pair_distance_histogram(ball, 4))


def test_energy_bitwise_independent_of_threads(bump_hat):
    a = hf_energy(fermi_ball(20.0, 1935), fermi_ball(20.0, 1935), bump_hat, threads=1)
    b = hf_energy(fermi_ball(20.0, 1935), fermi_ball(20.0, 1935), bump_hat, threads=6)
    assert (a.exchange, a.taylor_residual) == (b.exchange, b.taylor_residual)


def test_zero_potential_is_kinetic_only():
    bd = hf_energy_from_counts(4.0, 19, 19, FourierPotential(RadialPotential.zero()))
    assert bd.direct == 0.0 and bd.exchange == 0.0
    assert bd.total == bd.kinetic


@given(st.floats(0.5, 30.0), st.sampled_from([1, 7, 19, 27, 33]))
@settings(max_examples=25)
def test_kinetic_scales_as_inverse_square_length(L, N):
    ball = fermi_ball(L, N)
    ref = fermi_ball(1.0, N)
    assert kinetic_energy([ball]) == pytest.approx(kinetic_energy([ref]) / L**2, rel=1e-13)


def test_single_particle_has_no_kinetic_energy():
    assert kinetic_energy([fermi_ball(3.0, 1)]) == 0.0


def test_direct_term_rejects_negative_density():
    with pytest.raises(ValueError):
        direct_term(-1.0, 0.0, 1.0, 1.0)


def test_densities(bump_hat):
    bd = hf_energy_from_counts(10.0, 123, 57, bump_hat)
    kin, inter = hf_density(bd)
    assert kin + inter == pytest.approx(bd.density_total)
    assert bd.rho_up == pytest.approx(0.123) and bd.rho_down == pytest.approx(0.057)


def test_free_kinetic_density_closed_form():
    rho = 0.3
    kF = (6 * math.pi**2 * rho) ** (1 / 3)
    # int_{|k|<kF} k^2 d^3k / (2 pi)^3 = kF^5 / (10 pi^2)
    assert free_kinetic_density(rho, 0.0) == pytest.approx(kF**5 / (10 * math.pi**2), rel=1e-14)
