"""Closed-form amplitudes and spectra for a photon emitted from the cavity.

With the mirror initially in Fock state |n0> and one photon in the
cavity, the cavity amplitudes over the displaced basis decay as

    A_m(t) = <m~|n0> exp(-[gamma_c/2 + i(m omega_M - delta)] t),

and each continuum amplitude is a sum of Lorentzian poles located at the
resonances Delta_k = (n - m) omega_M - delta:

    B_m,k(oo) = sqrt(gamma_c / 2 pi) sum_n <m|n~><n~|n0>
                / (Delta_k + delta - (n - m) omega_M + i gamma_c / 2),

up to an overall phase exp(-i(m omega_M + Delta_k) t) that is common to
every term of fixed m and therefore cancels in all spectra; long-time
amplitudes are stored with that phase dropped, which makes them literally
time independent.

The spectrum for a pure mirror state sums amplitudes over n0 inside the
modulus square at fixed m; a mixed state adds probabilities instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, TruncationError
from .franck_condon import overlap_matrix
from .model import (
    MirrorState,
    StateCoefficients,
    SystemParams,
    TruncationConfig,
    state_coefficients,
)
from .spectrum import Spectrum, make_spectrum, _trapz

__all__ = [
    "EmissionAmplitudes",
    "emission_transient",
    "emission_longtime",
    "emission_spectrum",
]

#: Warn when the requested grid is too narrow to capture the spectrum to
#: this fraction of the total weight.
NORM_WARN_TOLERANCE = 0.05


@dataclass(frozen=True)
class EmissionAmplitudes:
    """Cavity amplitudes A_m and continuum amplitudes B_{m,k} at one time.

    t is the evolution time in 1/omega_M units, with math.inf marking the
    long-time limit (phase dropped, A identically zero).  n0 is the Fock
    index of the mirror's initial state the solution is conditioned on.
    """

    t: float
    n0: int
    grid: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        for arr in (self.grid, self.A, self.B):
            arr.flags.writeable = False

    def continuum_probability(self) -> float:
        """Integral over the grid of sum_m |B_{m,k}|^2."""
        return float(_trapz(np.sum(np.abs(self.B) ** 2, axis=0), self.grid))

    def total_probability(self) -> float:
        """Cavity plus continuum occupation; one for exact amplitudes on a
        wide enough grid."""
        return float(np.sum(np.abs(self.A) ** 2)) + self.continuum_probability()


@lru_cache(maxsize=64)
def _cached_overlaps(dim: int, beta_0: float) -> np.ndarray:
    return overlap_matrix(dim, beta_0).entries


def _pole_inverse(params: SystemParams, grid: np.ndarray, dim: int) -> np.ndarray:
    """1 / (Delta_k + delta - r omega_M + i gamma_c/2) for r = n - m.

    Rows are indexed by r + dim - 1, so row slices of length dim starting
    at dim - 1 - m pick out the denominators for all n at fixed m.
    """
    r = np.arange(-(dim - 1), dim)
    denom = (
        grid[None, :]
        + params.delta
        - r[:, None] * params.omega_M
        + 0.5j * params.gamma_c
    )
    return 1.0 / denom


def _pole_sum(coeffs: np.ndarray, inv_d: np.ndarray) -> np.ndarray:
    """out[m, k] = sum_n coeffs[m, n] * inv_d[n - m, k]."""
    dim = coeffs.shape[0]
    out = np.empty((dim, inv_d.shape[1]), dtype=complex)
    for m in range(dim):
        out[m] = coeffs[m] @ inv_d[dim - 1 - m : 2 * dim - 1 - m]
    return out


def _validated_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ParameterError("detuning grid must be 1-d and strictly ascending")
    return grid


def _initial_row(
    overlaps: np.ndarray, n0: int, trunc: TruncationConfig
) -> np.ndarray:
    """Row <n~|n0> over n, with its truncation tail checked."""
    if not isinstance(n0, (int, np.integer)) or n0 < 0:
        raise ParameterError(f"n0 must be an integer >= 0, got {n0!r}")
    if n0 > trunc.n_phonon_max:
        raise TruncationError(
            f"n0={n0} lies beyond cutoff N={trunc.n_phonon_max}", deficit=1.0
        )
    row = overlaps[n0]
    deficit = abs(1.0 - float(row @ row))
    if deficit >= trunc.tail_tolerance:
        raise TruncationError(
            f"displaced-basis expansion of |n0={n0}> exceeds the cutoff "
            f"N={trunc.n_phonon_max}",
            deficit=deficit,
        )
    return row


def emission_transient(
    params: SystemParams,
    n0: int,
    t: float,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
) -> EmissionAmplitudes:
    """Amplitudes at finite time t >= 0 for the mirror starting in |n0>."""
    if not (math.isfinite(t) and t >= 0.0):
        raise ParameterError(f"t must be finite and >= 0, got {t!r}")
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    row = _initial_row(overlaps, n0, trunc)

    m = np.arange(dim)
    omega = params.omega_M
    gamma = params.gamma_c
    A = row * np.exp(-(0.5 * gamma + 1j * (m * omega - params.delta)) * t)

    inv_d = _pole_inverse(params, grid, dim)
    coeffs = (overlaps * row[None, :]).astype(complex)
    decay = np.exp(-(0.5 * gamma + 1j * (m * omega - params.delta)) * t)
    phase = np.exp(-1j * (m[:, None] * omega + grid[None, :]) * t)
    base = _pole_sum(coeffs, inv_d)
    decayed = _pole_sum(coeffs * decay[None, :], inv_d)
    B = math.sqrt(gamma / (2.0 * math.pi)) * (phase * base - decayed)
    return EmissionAmplitudes(float(t), int(n0), grid, A.astype(complex), B)


def emission_longtime(
    params: SystemParams,
    n0: int,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
) -> EmissionAmplitudes:
    """Long-time amplitudes: the cavity empty, B stored without the free phase."""
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    row = _initial_row(overlaps, n0, trunc)
    inv_d = _pole_inverse(params, grid, dim)
    coeffs = (overlaps * row[None, :]).astype(complex)
    B = math.sqrt(params.gamma_c / (2.0 * math.pi)) * _pole_sum(coeffs, inv_d)
    A = np.zeros(dim, dtype=complex)
    return EmissionAmplitudes(math.inf, int(n0), grid, A, B)


def _weighted_row_deficit(
    overlaps: np.ndarray, weights: np.ndarray, state_deficit: float
) -> float:
    """Probability lost to the cutoff, weighted over the contributing n0."""
    row_deficit = np.abs(1.0 - np.einsum("ij,ij->i", overlaps, overlaps))
    return float(weights @ row_deficit) + state_deficit


def _check_expansion(
    coeffs: StateCoefficients, overlaps: np.ndarray, trunc: TruncationConfig
) -> float:
    weights = (
        np.abs(coeffs.values) ** 2 if coeffs.kind == "pure" else coeffs.values.real
    )
    deficit = _weighted_row_deficit(overlaps, weights, coeffs.tail_deficit)
    if deficit >= trunc.tail_tolerance:
        raise TruncationError(
            f"state expansion exceeds cutoff N={trunc.n_phonon_max}", deficit=deficit
        )
    return deficit


def _pure_density(
    overlaps: np.ndarray, values: np.ndarray, inv_d: np.ndarray, prefactor: float
) -> np.ndarray:
    # coherent superposition collapses to one effective displaced-basis
    # weight vector w_n = sum_n0 C_n0 <n~|n0> before the pole sum
    w = values @ overlaps
    B = prefactor * _pole_sum(overlaps * w[None, :], inv_d)
    return np.sum(np.abs(B) ** 2, axis=0)


def _mixed_density(
    overlaps: np.ndarray, weights: np.ndarray, inv_d: np.ndarray, prefactor: float
) -> np.ndarray:
    dim = overlaps.shape[0]
    density = np.zeros(inv_d.shape[1])
    scale = prefactor * prefactor
    for m in range(dim):
        block = (overlaps * overlaps[m][None, :]) @ inv_d[dim - 1 - m : 2 * dim - 1 - m]
        density += scale * (weights @ (block.real**2 + block.imag**2))
    return density


def emission_spectrum(
    params: SystemParams,
    state: MirrorState,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
    norm_warn_tolerance: float = NORM_WARN_TOLERANCE,
) -> Spectrum:
    """Reservoir occupation spectrum of the emitted photon.

    Pure mirror states interfere coherently over n0; mixed states add
    their Fock-state spectra with their classical weights.  Warns when
    the grid captures less than 1 - norm_warn_tolerance of the photon.
    """
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    coeffs = state_coefficients(state, params, trunc)
    expansion_deficit = _check_expansion(coeffs, overlaps, trunc)

    inv_d = _pole_inverse(params, grid, dim)
    prefactor = math.sqrt(params.gamma_c / (2.0 * math.pi))
    if coeffs.kind == "pure":
        density = _pure_density(overlaps, coeffs.values, inv_d, prefactor)
    else:
        density = _mixed_density(overlaps, coeffs.values.real, inv_d, prefactor)

    result = make_spectrum(
        grid,
        density,
        metadata={
            "mode": "emission",
            "state_kind": coeffs.kind,
            "n_phonon_max": trunc.n_phonon_max,
            "tail_tolerance": trunc.tail_tolerance,
            "state_tail_deficit": coeffs.tail_deficit,
            "expansion_deficit": expansion_deficit,
        },
    )
    if result.norm_deficit > norm_warn_tolerance:
        warnings.warn(
            f"grid [{grid[0]}, {grid[-1]}] misses {result.norm_deficit:.2e} of the "
            "photon; widen it if the normalization matters",
            RuntimeWarning,
            stacklevel=2,
        )
    return result
