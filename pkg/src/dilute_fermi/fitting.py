"""Least-squares power-law fits used by the convergence studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerLawFit:
    """``y ~ prefactor * x**slope`` fitted in log-log space."""

    slope: float
    prefactor: float
    n_points: int
    excluded: tuple[int, ...] = ()


class DegenerateFit(ValueError):
    def __init__(self, excluded: tuple[int, ...], message: str):
        self.excluded = excluded
        super().__init__(message)


def loglog_fit(x, y, zero_tol: float = 0.0) -> PowerLawFit:
    """Fit ``log|y| = slope * log x + c``; points with ``|y| <= zero_tol`` are excluded."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = y > zero_tol
    excluded = tuple(int(i) for i in np.flatnonzero(~keep))
    if keep.sum() < 2:
        raise DegenerateFit(excluded, f"only {int(keep.sum())} nonzero points, need 2")
    slope, intercept = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return PowerLawFit(float(slope), float(np.exp(intercept)), int(keep.sum()), excluded)
