"""Radial, compactly supported, nonnegative pair potentials.

Two profiles are available:

``bump``
    ``V0 * exp(1 - 1 / (1 - (r/R0)^2))`` for ``r < R0`` and zero beyond.
    Smooth with all derivatives vanishing at ``R0``; ``V(0) = V0``.
``soft_sphere``
    ``V0`` for ``r < R0`` and zero beyond.  Discontinuous, kept because its
    scattering length and Fourier transform have closed forms.

Units: hbar = 1 and particle mass 1/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .lattice import lattice_points

__all__ = [
    "PotentialKind",
    "RadialPotential",
    "FourierPotential",
    "TorusKernel",
    "QuadratureError",
    "CutoffTooSmall",
    "evaluate",
    "fourier",
    "periodize",
    "radial_transform",
]

class QuadratureError(RuntimeError):
    def __init__(self, value: float, error: float, tol: float):
        self.value = value
        self.error = error
        super().__init__(f"quadrature did not converge: estimate {value!r}, error {error:.3g} > {tol:.3g}")


class CutoffTooSmall(ValueError):
    def __init__(self, tail: float, tol: float):
        self.tail = tail
        super().__init__(f"Fourier tail beyond cutoff is about {tail:.3g}, tolerance {tol:.3g}")


class PotentialKind(str, enum.Enum):
    BUMP = "bump"
    SOFT_SPHERE = "soft_sphere"


@dataclass(frozen=True)
class RadialPotential:
    kind: PotentialKind
    V0: float
    R0: float

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.V0 < 0:
            raise ValueError("V0 must be nonnegative")
        if self.R0 <= 0:
            raise ValueError("R0 must be positive")

    @classmethod
    def zero(cls, R0: float = 1.0) -> "RadialPotential":
        return cls(PotentialKind.BUMP, 0.0, R0)

    @property
    def is_zero(self) -> bool:
        return self.V0 == 0.0

    def profile(self, r):
        """Inner analytic profile, valid for ``0 <= r < R0`` only."""
        r = np.asarray(r, dtype=float)
        if self.kind is PotentialKind.SOFT_SPHERE:
            return np.full_like(r, self.V0)
        t = (r / self.R0) ** 2
        out = np.zeros_like(t)
        inside = t < 1.0
        out[inside] = self.V0 * np.exp(1.0 - 1.0 / (1.0 - t[inside]))
        return out

    def __call__(self, r):
        return evaluate(self, r)


def evaluate(pot: RadialPotential, r):
    """``V(r)``; vectorised over ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    inside = r < pot.R0
    out = np.where(inside, pot.profile(np.where(inside, r, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out


_GL_HIGH = np.polynomial.legendre.leggauss(32)
_GL_LOW = np.polynomial.legendre.leggauss(24)
_MAX_PANELS = 1 << 15


def _panel_sum(fun, edges, rule):
    x, w = rule
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * fun(r)))


def radial_transform(g, a: float, b: float, p: float, tol: float = 1e-10, scale: float | None = None):
    """``4 pi * int_a^b r^2 g(r) sin(p r)/(p r) dr``.

    Composite Gauss-Legendre on panels no wider than a quarter oscillation;
    the panel count doubles until the 24- and 32-point rules agree to
    ``max(tol, 1e-13 * scale)``.  ``g`` must accept arrays.  Returns
    ``(value, error_estimate)``.
    """
    if b <= a:
        return 0.0, 0.0

    def integrand(r):
        return r * r * g(r) * np.sinc(p * r / np.pi)

    limit = tol
    npan = max(16, int(math.ceil(4.0 * p * (b - a) / math.pi)))
    while True:
        edges = np.linspace(a, b, npan + 1)
        hi = 4.0 * math.pi * _panel_sum(integrand, edges, _GL_HIGH)
        lo = 4.0 * math.pi * _panel_sum(integrand, edges, _GL_LOW)
        err = abs(hi - lo)
        limit = max(tol, 1e-13 * abs(scale if scale is not None else hi))
        if err <= limit:
            return hi, err
        npan *= 2
        if npan > _MAX_PANELS:
            raise QuadratureError(hi, err, limit)


@dataclass(eq=False)
class FourierPotential:
    """Continuum transform ``Vhat(p) = 4 pi int r^2 V(r) sin(pr)/(pr) dr``.

    Values are memoised on ``|p|``.  Call with a scalar or an array of
    momentum norms.
    """

    source: RadialPotential
    tol: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False)

    def value(self, p: float) -> float:
        p = abs(float(p))
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        pot = self.source
        if pot.is_zero:
            val = 0.0
        else:
            scale = 4.0 / 3.0 * math.pi * pot.V0 * pot.R0**3
            val, _ = radial_transform(pot.profile, 0.0, pot.R0, p, self.tol, scale)
        self._cache[p] = val
        return val

    def __call__(self, p):
        if np.ndim(p) == 0:
            return self.value(p)
        p = np.asarray(p, dtype=float)
        return np.array([self.value(x) for x in p.ravel()]).reshape(p.shape)

    @property
    def at_zero(self) -> float:
        return self.value(0.0)


def fourier(pot: FourierPotential | RadialPotential, p):
    if isinstance(pot, RadialPotential):
        pot = FourierPotential(pot)
    return pot(p)


@dataclass(frozen=True, eq=False)
class TorusKernel:
    """Truncated Fourier series of a potential periodised on ``[0, L)^3``."""

    L: float
    pcut: float
    n: np.ndarray
    coefficients: np.ndarray
    tail_bound: float

    def __call__(self, x):
        """Evaluate at points ``x`` of shape ``(..., 3)``."""
        x = np.asarray(x, dtype=float)
        k = (2.0 * np.pi / self.L) * self.n
        phases = np.tensordot(x, k, axes=([-1], [1]))
        return np.cos(phases) @ self.coefficients


def _tail_estimate(vhat: FourierPotential, pcut: float, L: float) -> float:
    """Continuum estimate of ``sum_{|p| > pcut} |Vhat(p)| / L^3``.

    Returns ``inf`` when the integrand has not decayed over the search range.
    """
    pot = vhat.source
    if pot.is_zero:
        return 0.0
    # coarse transform: only the magnitude of the tail matters here
    coarse = FourierPotential(pot, tol=1e-9 * vhat.at_zero)
    step = math.pi / pot.R0
    grid = pcut + step * np.arange(0, 801) / 2.0
    dens = grid**2 * np.abs(coarse(grid))
    peak = dens.max()
    if peak == 0.0:
        return 0.0
    if dens[-40:].max() > 1e-9 * peak:
        return math.inf
    # (1/L^3) sum over lattice ~ (1/(2 pi)^3) int d^3p
    return 4.0 * math.pi * integrate.trapezoid(dens, grid) / (2.0 * math.pi) ** 3


def periodize(pot: RadialPotential | FourierPotential, L: float, pcut: float, tol: float = 1e-6) -> TorusKernel:
    """Truncated torus kernel ``(1/L^3) sum_{|p| <= pcut} Vhat(p) e^{ipx}``."""
    vhat = pot if isinstance(pot, FourierPotential) else FourierPotential(pot)
    tail = _tail_estimate(vhat, pcut, L)
    if tail > tol:
        raise CutoffTooSmall(tail, tol)
    nsq_max = int(math.floor((pcut * L / (2.0 * np.pi)) ** 2 * (1.0 + 1e-12)))
    n = lattice_points(nsq_max)
    norms = (2.0 * np.pi / L) * np.sqrt(np.einsum("ij,ij->i", n, n))
    uniq, inv = np.unique(norms, return_inverse=True)
    coeff = vhat(uniq)[inv] / L**3
    return TorusKernel(float(L), float(pcut), n, coeff, tail)
