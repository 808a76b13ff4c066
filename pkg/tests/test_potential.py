import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dilute_fermi.potential import (
    CutoffTooSmall,
    FourierPotential,
    RadialPotential,
    periodize,
    radial_transform,
)


def soft_sphere_hat(V0, R, p):
    if p == 0:
        return 4.0 * math.pi * V0 * R**3 / 3.0
    return 4.0 * math.pi * V0 * (math.sin(p * R) - p * R * math.cos(p * R)) / p**3


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0, 4.0, 17.5])
def test_soft_sphere_transform_closed_form(p):
    vhat = FourierPotential(RadialPotential("soft_sphere", 2.5, 1.3), 1e-13)
    assert vhat(p) == pytest.approx(soft_sphere_hat(2.5, 1.3, p), rel=1e-11, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 2.0, 9.0])
def test_bump_transform_matches_adaptive_quadrature(p):
    pot = RadialPotential("bump", 1.7, 0.8)
    ref, _ = integrate.quad(lambda r: 4 * math.pi * r * r * pot(r) * np.sinc(p * r / math.pi), 0, 0.8, epsabs=1e-14, epsrel=1e-13, limit=200)
    assert FourierPotential(pot, 1e-13)(p) == pytest.approx(ref, rel=1e-10, abs=1e-13)


def test_bump_is_smooth_and_compact():
    pot = RadialPotential("bump", 2.0, 1.0)
    assert pot(0.0) == pytest.approx(2.0)
    assert pot(0.9999999) < 1e-100
    assert pot(1.0) == 0.0 and pot(3.0) == 0.0


def test_zero_potential_is_identically_zero():
    vhat = FourierPotential(RadialPotential.zero())
    assert vhat(0.0) == 0.0 and vhat(5.0) == 0.0


@given(st.floats(0.01, 50.0), st.floats(0.2, 3.0), st.floats(0.0, 20.0))
@settings(max_examples=40, deadline=None)
def test_transform_bounded_by_value_at_zero(V0, R0, p):
    # V >= 0 gives |Vhat(p)| <= Vhat(0)
    vhat = FourierPotential(RadialPotential("bump", V0, R0))
    assert abs(vhat(p)) <= vhat(0.0) * (1 + 1e-12)


@given(st.floats(0.1, 10.0), st.floats(0.0, 30.0))
@settings(max_examples=30, deadline=None)
def test_transform_scales_linearly_in_V0(c, p):
    a = FourierPotential(RadialPotential("soft_sphere", 1.0, 1.0), 1e-13)(p)
    b = FourierPotential(RadialPotential("soft_sphere", c, 1.0), 1e-13)(p)
    assert b == pytest.approx(c * a, rel=1e-9, abs=1e-12)


def test_radial_transform_empty_interval():
    assert radial_transform(np.ones_like, 1.0, 1.0, 2.0) == (0.0, 0.0)


def test_negative_parameters_rejected():
    with pytest.raises(ValueError):
        RadialPotential("bump", -1.0, 1.0)
    with pytest.raises(ValueError):
        RadialPotential("bump", 1.0, 0.0)


def test_periodized_kernel_reproduces_potential():
    pot = RadialPotential("bump", 1.0, 1.0)
    L = 6.0
    ker = periodize(pot, L, pcut=30.0, tol=1.0)
    x = np.array([[0.0, 0.0, 0.0], [0.3, 0.1, -0.2], [2.5, 2.5, 0.0]])
    expected = np.array([pot(np.linalg.norm(v)) for v in x])
    # the discarded modes are bounded by the continuum tail estimate
    assert 0 < ker.tail_bound < 0.5
    assert np.all(np.abs(ker(x) - expected) <= ker.tail_bound)


def test_periodize_rejects_small_cutoff():
    with pytest.raises(CutoffTooSmall):
        periodize(RadialPotential("soft_sphere", 1.0, 1.0), 6.0, pcut=2.0, tol=1e-8)
