"""Spectrum container and detuning-grid helpers.

The reservoir occupation spectrum S(Delta_k) is a probability density per
unit detuning: integrated over the full line it equals one (the photon
always ends up in the continuum).  Individual lines have Lorentzian tails
~ gamma_c/(2 pi Delta^2), so quadrature on a finite window always misses
some weight; the constructor records that miss as ``norm_deficit``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = ["Spectrum", "make_spectrum", "uniform_grid", "tail_extended_grid"]

_trapz = getattr(np, "trapezoid", np.trapz)


@dataclass(frozen=True)
class Spectrum:
    """Ascending detuning grid, non-negative density, and run metadata."""

    grid: np.ndarray
    density: np.ndarray
    norm_deficit: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid.flags.writeable = False
        self.density.flags.writeable = False


def make_spectrum(grid: np.ndarray, density: np.ndarray, metadata: dict) -> Spectrum:
    """Wrap a computed density, recording |1 - integral S dDelta| as the deficit."""
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ParameterError("grid must be a 1-d array with at least two points")
    if density.shape != grid.shape:
        raise ParameterError("density and grid shapes differ")
    deficit = abs(1.0 - float(_trapz(density, grid)))
    return Spectrum(grid, density, deficit, metadata)


def uniform_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Uniform ascending detuning grid with inclusive endpoints."""
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ParameterError(f"grid bounds must satisfy lo < hi, got [{lo}, {hi}]")
    if not isinstance(points, (int, np.integer)) or points < 2:
        raise ParameterError(f"grid needs at least 2 points, got {points!r}")
    return np.linspace(lo, hi, int(points))


def tail_extended_grid(
    core_half: float,
    core_step: float,
    tail_half: float,
    tail_points: int = 400,
) -> np.ndarray:
    """Uniform core [-core_half, core_half] plus geometric tails to +-tail_half.

    Built for normalization checks: the core resolves the spectral lines,
    while the log-spaced tails integrate the slowly varying ~1/Delta^2
    wings out far enough that the missing weight drops well below the
    tolerances of interest.  Trapezoid quadrature on the result is
    accurate to far below the truncated tail weight.
    """
    if core_half <= 0 or core_step <= 0 or tail_half <= core_half:
        raise ParameterError("need 0 < core_step, 0 < core_half < tail_half")
    if tail_points < 2:
        raise ParameterError("tail_points must be >= 2")
    n_core = int(round(2 * core_half / core_step)) + 1
    core = np.linspace(-core_half, core_half, n_core)
    right = np.geomspace(core_half, tail_half, tail_points + 1)[1:]
    return np.concatenate([-right[::-1], core, right])
