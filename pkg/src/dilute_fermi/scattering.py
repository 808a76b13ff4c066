"""Zero-energy scattering length and the Neumann scattering problem on a ball.

The radial reduction ``u(r) = r f(r)`` turns

    -Laplace f + V/2 f = lam f   on B_R(0),  f'(R) = 0,  f(R) = 1

into ``-u'' + (V/2 - lam) u = 0`` with ``u(0) = 0``.  Inside the support of
``V`` the equation is integrated in Pruefer variables ``u = e^s sin(theta)``,
``u' = e^s cos(theta)``, which stay bounded for arbitrarily strong
potentials.  Beyond the support the solution is a free wave and is
propagated in closed form, so large radii cost nothing extra.

``theta(R; lam)`` increases monotonically with ``lam`` and the Neumann
condition ``u'(R) R = u(R)`` reads ``theta(R) = arctan(R)`` on the lowest
branch, which makes the eigenvalue search a plain bracketed root find.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .fitting import PowerLawFit, loglog_fit
from .potential import RadialPotential, radial_transform

__all__ = [
    "ScatteringSolution",
    "NoBracketError",
    "IntegratorError",
    "DEFAULT_GRID_POINTS",
    "scattering_length",
    "solve_neumann",
    "solve_scattering",
    "a_gamma",
    "lambda_scaling_fit",
    "a_gamma_convergence",
]

DEFAULT_GRID_POINTS = 10_000


class NoBracketError(RuntimeError):
    """The eigenvalue window contains no sign change of the boundary mismatch."""


class IntegratorError(RuntimeError):
    pass


@dataclass(frozen=True)
class _Interior:
    """Pruefer solution on ``[0, R0]`` for a fixed ``lam``."""

    lam: float
    theta0: float
    s0: float
    z0: float
    dense: object = field(repr=False)
    nfev: int = 0


def _interior(pot: RadialPotential, lam: float, rtol: float, max_step: float, dense: bool = False) -> _Interior:
    def rhs(r, y):
        theta, _, z = y
        v = float(pot.profile(np.array(r)))
        q = 0.5 * v - lam
        sn, cs = math.sin(theta), math.cos(theta)
        ds = sn * cs * (1.0 + q)
        return [cs * cs - q * sn * sn, ds, 0.5 * r * v * sn - z * ds]

    sol = solve_ivp(
        rhs,
        (0.0, pot.R0),
        [0.0, 0.0, 0.0],
        method="DOP853",
        rtol=rtol,
        atol=1e-14,
        max_step=max_step,
        dense_output=dense,
    )
    if not sol.success:
        raise IntegratorError(sol.message)
    theta0, s0, z0 = sol.y[:, -1]
    return _Interior(lam, float(theta0), float(s0), float(z0), sol.sol if dense else None, sol.nfev)


def _free_wave(theta0: float, lam: float, x):
    """``(u, u')`` at distance ``x`` beyond the support, for unit amplitude at ``R0``."""
    sn, cs = math.sin(theta0), math.cos(theta0)
    x = np.asarray(x, dtype=float)
    if lam > 0.0:
        k = math.sqrt(lam)
        u = sn * np.cos(k * x) + cs * np.sin(k * x) / k
        du = -sn * k * np.sin(k * x) + cs * np.cos(k * x)
    elif lam == 0.0:
        u = sn + cs * x
        du = np.full_like(x, cs)
    else:
        kap = math.sqrt(-lam)
        u = sn * np.cosh(kap * x) + cs * np.sinh(kap * x) / kap
        du = sn * kap * np.sinh(kap * x) + cs * np.cosh(kap * x)
    return u, du


def _exterior_angle(theta0: float, lam: float, x: float) -> float:
    """Continuous Pruefer angle after a free stretch of length ``x`` (``lam >= 0``)."""
    if lam == 0.0:
        return math.atan2(math.sin(theta0) + math.cos(theta0) * x, math.cos(theta0))
    k = math.sqrt(lam)
    # free-wave phase phi with u ~ sin(phi)/k, u' ~ cos(phi)
    m0 = round(theta0 / (2.0 * math.pi))
    phi = math.atan2(k * math.sin(theta0), math.cos(theta0)) + 2.0 * math.pi * m0 + k * x
    m = round(phi / (2.0 * math.pi))
    psi = phi - 2.0 * math.pi * m
    return math.atan2(math.sin(psi), k * math.cos(psi)) + 2.0 * math.pi * m


def scattering_length(pot: RadialPotential, tol: float = 1e-12, max_step: float = np.inf) -> float:
    """Scattering length ``a`` from the zero-energy equation ``-u'' + V/2 u = 0``.

    Beyond the support ``u`` is affine, ``u = c (r - a)``, so
    ``a = R0 - u(R0)/u'(R0) = R0 - tan(theta(R0))``.
    """
    if pot.is_zero:
        return 0.0
    inner = _interior(pot, 0.0, tol, max_step)
    return pot.R0 - math.tan(inner.theta0)


@dataclass(frozen=True, eq=False)
class ScatteringSolution:
    """Lowest Neumann eigenpair on ``B_radius(0)`` with ``f = 1 - phi``.

    ``r`` and ``f`` are the radial grid samples; ``f(radius) = 1``.
    ``a_gamma`` is ``(1/8pi) int V f`` evaluated alongside the ODE and
    ``a0`` the zero-energy scattering length.
    """

    gamma: float | None
    rho: float | None
    radius: float
    lam: float
    r: np.ndarray
    f: np.ndarray
    a_gamma: float
    a0: float
    boundary_residual: float
    potential: RadialPotential = field(repr=False)
    _inner: _Interior | None = field(default=None, repr=False)
    _u_radius: float = field(default=1.0, repr=False)

    def f_at(self, r):
        """Evaluate ``f`` anywhere in ``[0, radius]``; zero-potential solutions give 1."""
        r = np.asarray(r, dtype=float)
        if self._inner is None:
            return np.ones_like(r)
        inner = self._inner
        R0 = self.potential.R0
        out = np.empty_like(r)
        ins = r < R0
        if np.any(ins):
            ri = r[ins]
            theta, s, _ = inner.dense(ri)
            with np.errstate(invalid="ignore", divide="ignore"):
                val = np.exp(s - inner.s0) * np.sin(theta) / ri
            # u(r)/r -> u'(0) = e^{s(0)} = 1 at the origin
            val = np.where(ri > 0, val, math.exp(-inner.s0))
            out[ins] = val
        if np.any(~ins):
            u, _ = _free_wave(inner.theta0, self.lam, r[~ins] - R0)
            out[~ins] = u / r[~ins]
        return out * self.radius / self._u_radius

    def phi_at(self, r):
        return 1.0 - self.f_at(r)

    def phi_hat(self, p: float, tol: float = 1e-12) -> float:
        """Fourier transform of ``phi`` extended by zero outside the ball."""
        if self._inner is None:
            return 0.0
        R0 = self.potential.R0
        scale = 4.0 / 3.0 * math.pi * self.radius**3
        inside, _ = radial_transform(self.phi_at, 0.0, R0, p, tol, scale)
        outside, _ = radial_transform(self.phi_at, R0, self.radius, p, tol, scale)
        return inside + outside


def _radial_grid(R0: float, radius: float, n_points: int) -> np.ndarray:
    n_in = max(n_points * 2 // 5, 16)
    n_out = max(n_points - n_in, 16)
    # cosine spacing clusters near both 0 and R0
    inner = 0.5 * R0 * (1.0 - np.cos(np.linspace(0.0, np.pi, n_in, endpoint=False)))
    outer = np.geomspace(R0, radius, n_out)
    return np.concatenate([inner, outer])


def solve_neumann(
    pot: RadialPotential,
    radius: float,
    tol: float = 1e-12,
    *,
    window: tuple[float, float] | None = None,
    max_step: float = np.inf,
    n_points: int = DEFAULT_GRID_POINTS,
    gamma: float | None = None,
    rho: float | None = None,
) -> ScatteringSolution:
    """Lowest eigenvalue of the Neumann scattering problem on ``B_radius(0)``.

    ``window`` is the initial eigenvalue bracket; by default ``[0, 1.01 *
    Rayleigh bound]`` using the constant trial function.  The upper end is
    doubled up to 60 times before giving up.
    """
    if radius <= pot.R0:
        raise ValueError(f"radius {radius} must exceed the support radius {pot.R0}")
    if pot.is_zero:
        grid = _radial_grid(pot.R0, radius, n_points)
        return ScatteringSolution(gamma, rho, radius, 0.0, grid, np.ones_like(grid), 0.0, 0.0, 0.0, pot)

    target = math.atan(radius)

    def mismatch(lam):
        inner = _interior(pot, lam, tol, max_step)
        return _exterior_angle(inner.theta0, lam, radius - pot.R0) - target

    vhat0, _ = radial_transform(pot.profile, 0.0, pot.R0, 0.0)
    if window is None:
        window = (0.0, 1.01 * 0.5 * vhat0 / (4.0 / 3.0 * math.pi * radius**3))
    lo, hi = window
    g_lo = mismatch(lo)
    if g_lo > 0:
        raise NoBracketError(f"boundary mismatch already positive at lam={lo}")
    g_hi = mismatch(hi)
    widenings = 0
    while g_hi < 0:
        widenings += 1
        if widenings > 60:
            raise NoBracketError(f"no sign change of the boundary mismatch in [{lo}, {hi}]")
        hi = lo + 2.0 * (hi - lo) if hi > lo else 1e-12
        g_hi = mismatch(hi)
    lam = lo if g_lo == 0 else brentq(mismatch, lo, hi, xtol=1e-15 * abs(hi), rtol=1e-14, maxiter=200)

    inner = _interior(pot, lam, tol, max_step, dense=True)
    u_r, du_r = _free_wave(inner.theta0, lam, radius - pot.R0)
    u_r, du_r = float(u_r), float(du_r)
    grid = _radial_grid(pot.R0, radius, n_points)
    sol = ScatteringSolution(
        gamma=gamma,
        rho=rho,
        radius=float(radius),
        lam=float(lam),
        r=grid,
        f=np.empty(0),
        a_gamma=inner.z0 * radius / u_r,
        a0=scattering_length(pot, tol, max_step),
        boundary_residual=(du_r * radius - u_r) / (radius * u_r),
        potential=pot,
        _inner=inner,
        _u_radius=u_r,
    )
    f = sol.f_at(grid)
    f.setflags(write=False)
    object.__setattr__(sol, "f", f)
    return sol


def solve_scattering(pot: RadialPotential, rho: float, gamma: float, tol: float = 1e-12, **kwargs) -> ScatteringSolution:
    """Neumann problem on the ball of radius ``rho**(-gamma)``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return solve_neumann(pot, rho ** (-gamma), tol, gamma=gamma, rho=rho, **kwargs)


def a_gamma(sol: ScatteringSolution, pot: RadialPotential | None = None, tol: float = 1e-12) -> float:
    """``(1/8pi) * 4pi int_0^R0 r^2 V(r) f(r) dr`` by panel quadrature of the solution."""
    pot = pot or sol.potential
    if pot.is_zero:
        return 0.0
    val, _ = radial_transform(lambda r: pot.profile(r) * sol.f_at(r), 0.0, pot.R0, 0.0, tol)
    return val / (8.0 * math.pi)


def lambda_scaling_fit(pot: RadialPotential, gamma: float, rhos, tol: float = 1e-12, zero_tol: float = 1e-300) -> PowerLawFit:
    """Fit ``|lam_gamma| ~ C rho**slope`` over a density sweep.

    Raises :class:`~dilute_fermi.fitting.DegenerateFit` when fewer than two
    eigenvalues are nonzero (for instance ``V = 0``).
    """
    rhos = np.asarray(rhos, dtype=float)
    lams = [solve_scattering(pot, float(r), gamma, tol).lam for r in rhos]
    return loglog_fit(rhos, lams, zero_tol)


def a_gamma_convergence(pot: RadialPotential, gamma: float, rhos, tol: float = 1e-12):
    """Solutions along a density sweep and the fit of ``|a_gamma - a|`` against ``rho``."""
    sols = [solve_scattering(pot, float(r), gamma, tol) for r in rhos]
    fit = loglog_fit(rhos, [s.a_gamma - s.a0 for s in sols])
    return sols, fit
