import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from dilute_fermi.potential import RadialPotential
from dilute_fermi.scattering import (
    a_gamma,
    a_gamma_convergence,
    lambda_scaling_fit,
    scattering_length,
    solve_neumann,
    solve_scattering,
)


def soft_sphere_length(V0, R0):
    kappa = math.sqrt(V0 / 2.0)
    return R0 * (1.0 - math.tanh(kappa * R0) / (kappa * R0))


def soft_sphere_neumann(V0, R0, R):
    """Closed-form matching for the soft sphere: returns (lam, a_gamma).

    Inside u = sinh(kappa r), outside u = sin(k r + delta); Neumann for
    f = u/r at R means tan(k R + delta) = k R.
    """

    def parts(lam):
        k, kappa = math.sqrt(lam), math.sqrt(V0 / 2.0 - lam)
        D = kappa / math.tanh(kappa * R0)
        delta = math.atan2(k, D) - k * R0
        return k, kappa, delta

    def g(lam):
        k, _, delta = parts(lam)
        return k * R * math.cos(k * R + delta) - math.sin(k * R + delta)

    guess = 3.0 * soft_sphere_length(V0, R0) / R**3
    lo, hi = guess * 1e-3, guess * 3.0
    lam = brentq(g, lo, hi, xtol=1e-300, rtol=1e-15)
    k, kappa, delta = parts(lam)
    amp = math.sinh(kappa * R0) / math.sin(k * R0 + delta)
    uR = amp * math.sin(k * R + delta)
    # (1/2) V0 int_0^R0 r^2 f dr with f = (R/u(R)) u / r
    integral = R0 * math.cosh(kappa * R0) / kappa - math.sinh(kappa * R0) / kappa**2
    return lam, 0.5 * V0 * R / uR * integral


@pytest.mark.parametrize("V0", [0.1, 1.0, 10.0, 100.0])
@pytest.mark.parametrize("R0", [0.5, 1.0])
def test_soft_sphere_scattering_length(V0, R0):
    pot = RadialPotential("soft_sphere", V0, R0)
    assert scattering_length(pot) == pytest.approx(soft_sphere_length(V0, R0), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("V0,R", [(1.0, 5.0), (10.0, 20.0), (100.0, 8.0)])
def test_soft_sphere_neumann_against_matching(V0, R):
    pot = RadialPotential("soft_sphere", V0, 1.0)
    sol = solve_neumann(pot, R)
    lam, ag = soft_sphere_neumann(V0, 1.0, R)
    assert sol.lam == pytest.approx(lam, rel=1e-9)
    assert sol.a_gamma == pytest.approx(ag, rel=1e-8)


def test_zero_potential():
    pot = RadialPotential.zero()
    assert scattering_length(pot) == 0.0
    sol = solve_neumann(pot, 10.0)
    assert sol.lam == 0.0 and sol.a_gamma == 0.0
    assert np.all(sol.f_at(np.linspace(0, 10, 7)) == 1.0)


def test_solution_shape(bump):
    sol = solve_scattering(bump, 1e-3, 1 / 3)
    assert sol.radius == pytest.approx(10.0)
    f = sol.f_at(np.linspace(0.0, sol.radius, 2001))
    assert f[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(f) >= -1e-14)
    assert f.min() > 0
    assert sol.boundary_residual < 1e-10
    assert sol.phi_at(sol.radius) == pytest.approx(0.0, abs=1e-12)


def test_a_gamma_by_quadrature_agrees(bump):
    sol = solve_scattering(bump, 1e-3, 1 / 3)
    assert a_gamma(sol, bump) == pytest.approx(sol.a_gamma, rel=1e-9)


def test_eigenvalue_identity(bump):
    # integrating the equation against 1 on the ball: lam int f = (1/2) int V f
    sol = solve_scattering(bump, 1e-2, 1 / 3)
    from scipy import integrate

    lhs, _ = integrate.quad(lambda r: r * r * sol.f_at(np.array([r]))[0], 0, sol.radius, limit=400, epsrel=1e-12)
    assert sol.lam * lhs == pytest.approx(sol.a_gamma, rel=1e-8)


@given(st.floats(0.05, 50.0), st.floats(0.3, 2.0))
@settings(max_examples=15, deadline=None)
def test_a_gamma_exceeds_a_and_a_below_range(V0, R0):
    pot = RadialPotential("bump", V0, R0)
    a = scattering_length(pot)
    assert 0 < a < R0
    sol = solve_neumann(pot, 20.0 * R0)
    assert sol.a_gamma > a
    assert sol.lam > 0


def test_lambda_fit_rejects_zero_potential():
    from dilute_fermi.fitting import DegenerateFit

    with pytest.raises(DegenerateFit):
        lambda_scaling_fit(RadialPotential.zero(), 1 / 3, [1e-3, 1e-2])


def test_convergence_sweep_shapes(bump):
    sols, fit = a_gamma_convergence(bump, 1 / 3, [1e-4, 1e-3, 1e-2])
    assert len(sols) == 3 and fit.n_points == 3
    assert fit.slope > 0
