"""Extremum detection on uniformly sampled spectra.

Local maxima above a relative height threshold are reported as peaks;
local minima that sit between two qualifying peaks are flagged as dips
(the signature of destructive interference between scattering channels).
Locations and heights are refined with a three-point parabola through
the extremum and its neighbors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectrum import Spectrum

__all__ = ["Peak", "detect_peaks"]


@dataclass(frozen=True)
class Peak:
    """One detected extremum.

    width is the full width of a peak at half its refined height, found
    by linear interpolation of the sampled density, walking outward until
    the crossing or the end of the peak's basin; NaN when the half level
    is not bracketed (overlapping lines) and for dips.
    """

    location: float
    height: float
    width: float
    is_dip: bool


def _refine(x: np.ndarray, y: np.ndarray, i: int, step: float) -> tuple[float, float]:
    left, mid, right = y[i - 1], y[i], y[i + 1]
    denom = left - 2.0 * mid + right
    if denom == 0.0:
        return float(x[i]), float(mid)
    shift = 0.5 * (left - right) / denom
    loc = x[i] + shift * step
    height = mid - 0.25 * (left - right) * shift
    return float(loc), float(height)


def _half_height_width(
    x: np.ndarray, y: np.ndarray, i: int, height: float, lo: int, hi: int
) -> float:
    """Interpolated width at height/2 inside the basin [lo, hi]."""
    level = 0.5 * height

    def crossing(start: int, stop: int, stride: int) -> float:
        prev = start
        for j in range(start + stride, stop + stride, stride):
            if y[j] <= level:
                frac = (y[prev] - level) / (y[prev] - y[j])
                return float(x[prev] + frac * (x[j] - x[prev]))
            if y[j] > y[prev]:
                return math.nan
            prev = j
        return math.nan

    left = crossing(i, lo, -1)
    right = crossing(i, hi, +1)
    if math.isnan(left) or math.isnan(right):
        return math.nan
    return right - left


def detect_peaks(spectrum: Spectrum, min_rel_height: float = 0.05) -> list[Peak]:
    """Find qualifying maxima, and minima flanked by them, on a uniform grid.

    Args:
        spectrum: spectrum sampled on a uniform ascending grid.
        min_rel_height: peaks below this fraction of the global maximum
            are ignored.

    Returns:
        Detected extrema sorted by location (possibly empty).
    """
    x = spectrum.grid
    y = spectrum.density
    steps = np.diff(x)
    step = float(steps[0])
    if not np.allclose(steps, step, rtol=1e-8, atol=1e-12 * abs(step)):
        raise ParameterError("peak detection requires a uniform grid")
    if not (0.0 < min_rel_height <= 1.0):
        raise ParameterError(f"min_rel_height must be in (0, 1], got {min_rel_height!r}")

    top = float(np.max(y))
    if top <= 0.0:
        return []
    threshold = min_rel_height * top

    interior = np.arange(1, x.size - 1)
    rises = y[interior] > y[interior - 1]
    falls = y[interior] > y[interior + 1]
    max_idx = interior[rises & falls]
    peak_idx = [int(i) for i in max_idx if y[i] >= threshold]

    results: list[Peak] = []
    for pos, i in enumerate(peak_idx):
        loc, height = _refine(x, y, i, step)
        lo = peak_idx[pos - 1] if pos > 0 else 0
        hi = peak_idx[pos + 1] if pos + 1 < len(peak_idx) else x.size - 1
        width = _half_height_width(x, y, i, height, lo, hi)
        results.append(Peak(loc, height, width, is_dip=False))

    # dips: strict local minima lying between two qualifying peaks
    for left, right in zip(peak_idx[:-1], peak_idx[1:]):
        segment = np.arange(left + 1, right)
        if segment.size == 0:
            continue
        inner = segment[
            (y[segment] < y[segment - 1]) & (y[segment] < y[segment + 1])
        ]
        for i in inner:
            loc, height = _refine(x, y, int(i), step)
            results.append(Peak(loc, height, math.nan, is_dip=True))

    results.sort(key=lambda p: p.location)
    return results
