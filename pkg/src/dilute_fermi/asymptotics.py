"""Closed-form energy densities of the dilute two-component Fermi gas.

``lss_density``  free-gas term plus ``8 pi a rho_up rho_down``
``hy_density``   the above plus the ``a^2 rho^(7/3)`` Huang-Yang correction
``error_envelope`` the two-sided remainder window ``(-C rho^(2+1/9), C rho^(2+2/9))``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AsymptoticInput",
    "EnergyDensity",
    "DensityMismatch",
    "HY_COEFFICIENT",
    "FREE_COEFFICIENT",
    "free_density",
    "interaction_density",
    "hy_correction",
    "lss_density",
    "hy_density",
    "error_envelope",
    "hf_continuum_density",
    "correlation_gap",
]

FREE_COEFFICIENT = 0.6 * (6.0 * math.pi**2) ** (2.0 / 3.0)
HY_COEFFICIENT = 4.0 * (11.0 - 2.0 * math.log(2.0)) / (35.0 * math.pi**2) * (3.0 / (4.0 * math.pi)) ** (4.0 / 3.0)

LOWER_EXPONENT = 2.0 + 1.0 / 9.0
UPPER_EXPONENT = 2.0 + 2.0 / 9.0


class DensityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AsymptoticInput:
    rho_up: float
    rho_down: float
    a: float = 0.0

    def __post_init__(self):
        if self.rho_up < 0 or self.rho_down < 0 or self.a < 0:
            raise ValueError("densities and scattering length must be nonnegative")

    @property
    def rho(self) -> float:
        return self.rho_up + self.rho_down


@dataclass(frozen=True)
class EnergyDensity:
    """An energy per volume tagged with the densities it was evaluated at."""

    value: float
    rho_up: float
    rho_down: float


def free_density(inp: AsymptoticInput) -> float:
    return FREE_COEFFICIENT * (inp.rho_up ** (5.0 / 3.0) + inp.rho_down ** (5.0 / 3.0))


def interaction_density(inp: AsymptoticInput) -> float:
    return 8.0 * math.pi * inp.a * inp.rho_up * inp.rho_down


def hy_correction(inp: AsymptoticInput) -> float:
    return HY_COEFFICIENT * inp.a**2 * inp.rho ** (7.0 / 3.0)


def lss_density(inp: AsymptoticInput) -> float:
    return free_density(inp) + interaction_density(inp)


def hy_density(inp: AsymptoticInput) -> float:
    return lss_density(inp) + hy_correction(inp)


def error_envelope(rho: float, C: float = 1.0) -> tuple[float, float]:
    """``(-C rho^(2+1/9), C rho^(2+2/9))``; ``C`` is a free parameter."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return -C * rho**LOWER_EXPONENT, C * rho**UPPER_EXPONENT


def hf_continuum_density(rho_up: float, rho_down: float, vhat0: float) -> EnergyDensity:
    """Free term plus the Born interaction ``Vhat(0) rho_up rho_down``."""
    inp = AsymptoticInput(rho_up, rho_down)
    return EnergyDensity(free_density(inp) + vhat0 * rho_up * rho_down, rho_up, rho_down)


def correlation_gap(hf_value: EnergyDensity, lss_value: EnergyDensity) -> float:
    """``hf - lss``, which equals ``(Vhat(0) - 8 pi a) rho_up rho_down``."""
    if (hf_value.rho_up, hf_value.rho_down) != (lss_value.rho_up, lss_value.rho_down):
        raise DensityMismatch(
            f"densities differ: ({hf_value.rho_up}, {hf_value.rho_down}) vs ({lss_value.rho_up}, {lss_value.rho_down})"
        )
    return hf_value.value - lss_value.value
