"""Closed-form amplitudes and spectra for a photon scattered off the cavity.

The incident photon is a Lorentzian wavepacket with carrier detuning
Delta_0 and spectral half-width-at-half-maximum epsilon:

    B_{m,k}(0) = sqrt(epsilon/pi) delta_{m,n0} / (Delta_k - Delta_0 + i epsilon).

The outgoing amplitude at long times is the coherent sum of two channels:
direct reflection off the fixed mirror (the initial packet, phase
shifted) and the cavity-mediated channel, whose pole structure matches
the emission problem.  Their interference produces the characteristic
peak/dip line shapes.  As in the emission module, the free phase
exp(-i(m omega_M + Delta_k) t) is dropped from stored long-time
amplitudes because it is common to all terms of fixed m.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .emission import (
    EmissionAmplitudes,
    NORM_WARN_TOLERANCE,
    _cached_overlaps,
    _check_expansion,
    _initial_row,
    _pole_inverse,
    _pole_sum,
    _validated_grid,
)
from .errors import ParameterError
from .model import (
    MirrorState,
    SystemParams,
    TruncationConfig,
    state_coefficients,
)
from .spectrum import Spectrum, make_spectrum

__all__ = [
    "PhotonWavepacket",
    "scattering_transient",
    "scattering_longtime",
    "scattering_spectrum",
]

#: Relative detuning below which the transient pole collision
#: (epsilon = gamma_c/2 together with a resonant carrier) is regularized.
_COLLISION_TOLERANCE = 1e-12
_COLLISION_SHIFT = 1e-9


@dataclass(frozen=True)
class PhotonWavepacket:
    """Lorentzian single-photon packet: carrier detuning and HWHM width."""

    delta_0: float
    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.delta_0) and math.isfinite(self.epsilon)):
            raise ParameterError("wavepacket parameters must be finite")
        if self.epsilon <= 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon!r}")

    def amplitude(self, grid: np.ndarray) -> np.ndarray:
        """Initial spectral amplitude; |.|^2 integrates to one over the line."""
        return np.sqrt(self.epsilon / math.pi) / (
            grid - self.delta_0 + 1j * self.epsilon
        )


def _safe_epsilon(
    params: SystemParams, n0: int, packet: PhotonWavepacket, dim: int
) -> float:
    """Perturb epsilon away from the measure-zero transient pole collision.

    The transient excitation prefactor 1/(epsilon - gamma_c/2 +
    i[(n0-n) omega_M + Delta_0 + delta]) becomes singular when epsilon =
    gamma_c/2 and the carrier hits a resonance exactly.  The degenerate
    (secular) solution is not implemented; instead epsilon is shifted by
    1e-9 omega_M with a warning.
    """
    eps = packet.epsilon
    n = np.arange(dim)
    gap = np.abs(
        eps
        - 0.5 * params.gamma_c
        + 1j * ((n0 - n) * params.omega_M + packet.delta_0 + params.delta)
    )
    if np.min(gap) < _COLLISION_TOLERANCE * params.omega_M:
        eps = eps + _COLLISION_SHIFT * params.omega_M
        warnings.warn(
            "epsilon = gamma_c/2 with a resonant carrier is a degenerate "
            f"point of the transient solution; epsilon perturbed to {eps!r}",
            RuntimeWarning,
            stacklevel=3,
        )
    return eps


def scattering_transient(
    params: SystemParams,
    n0: int,
    packet: PhotonWavepacket,
    t: float,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
) -> EmissionAmplitudes:
    """Amplitudes at finite time t >= 0 for an incident packet and mirror |n0>."""
    if not (math.isfinite(t) and t >= 0.0):
        raise ParameterError(f"t must be finite and >= 0, got {t!r}")
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    row = _initial_row(overlaps, n0, trunc)

    omega = params.omega_M
    gamma = params.gamma_c
    delta = params.delta
    delta_0 = packet.delta_0
    eps = _safe_epsilon(params, n0, packet, dim)

    m = np.arange(dim)
    n = np.arange(dim)
    # excitation prefactor of the displaced level n
    pref = 1.0 / (eps - 0.5 * gamma + 1j * ((n0 - n) * omega + delta_0 + delta))
    cavity_decay = np.exp(-(0.5 * gamma + 1j * (n * omega - delta)) * t)
    packet_decay = np.exp(-(eps + 1j * (n0 * omega + delta_0)) * t)
    sqrt_eps = math.sqrt(eps / math.pi)
    xi = math.sqrt(gamma / (2.0 * math.pi))

    A = (
        sqrt_eps
        * (-2.0 * math.pi * xi)
        * row
        * pref[m]
        * (cavity_decay[m] - packet_decay)
    )

    phase = np.exp(-1j * (m[:, None] * omega + grid[None, :]) * t)
    direct = np.zeros((dim, grid.size), dtype=complex)
    direct[n0] = sqrt_eps / (grid - delta_0 + 1j * eps)

    # emission-like channel: poles at the photon-leakage resonances
    emit_denom = 1.0 / (
        0.5 * gamma
        + 1j * (np.arange(-(dim - 1), dim)[:, None] * omega - delta - grid[None, :])
    )
    coeffs = (overlaps * (row * pref)[None, :]).astype(complex)
    term_cavity = phase * _pole_sum(coeffs, emit_denom) - _pole_sum(
        coeffs * cavity_decay[None, :], emit_denom
    )

    # packet channel: poles at the shifted carrier Delta_0 + (n0 - m) omega_M
    packet_denom = 1.0 / (
        eps + 1j * ((n0 - m)[:, None] * omega + delta_0 - grid[None, :])
    )
    weight = coeffs.sum(axis=1)
    term_packet = (phase - packet_decay) * weight[:, None] * packet_denom

    B = direct * phase + 1j * gamma * sqrt_eps * (term_cavity - term_packet)
    return EmissionAmplitudes(float(t), int(n0), grid, A.astype(complex), B)


def _longtime_B(
    params: SystemParams,
    n0: int,
    packet: PhotonWavepacket,
    grid: np.ndarray,
    overlaps: np.ndarray,
    inv_d: np.ndarray,
) -> np.ndarray:
    """Long-time B matrix for one initial Fock index, free phase dropped."""
    dim = overlaps.shape[0]
    row = overlaps[n0]
    sqrt_eps = math.sqrt(packet.epsilon / math.pi)
    m = np.arange(dim)

    B = np.zeros((dim, grid.size), dtype=complex)
    B[n0] = sqrt_eps / (grid - packet.delta_0 + 1j * packet.epsilon)

    kernel = _pole_sum((overlaps * row[None, :]).astype(complex), inv_d)
    reflection = (
        grid[None, :]
        - (packet.delta_0 + (n0 - m)[:, None] * params.omega_M)
        + 1j * packet.epsilon
    )
    B -= sqrt_eps * 1j * params.gamma_c / reflection * kernel
    return B


def scattering_longtime(
    params: SystemParams,
    n0: int,
    packet: PhotonWavepacket,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
) -> EmissionAmplitudes:
    """Long-time amplitudes: direct reflection plus the cavity channel."""
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    _initial_row(overlaps, n0, trunc)
    inv_d = _pole_inverse(params, grid, dim)
    B = _longtime_B(params, n0, packet, grid, overlaps, inv_d)
    A = np.zeros(dim, dtype=complex)
    return EmissionAmplitudes(math.inf, int(n0), grid, A, B)


def scattering_spectrum(
    params: SystemParams,
    state: MirrorState,
    packet: PhotonWavepacket,
    grid,
    trunc: TruncationConfig = TruncationConfig(),
    norm_warn_tolerance: float = NORM_WARN_TOLERANCE,
) -> Spectrum:
    """Reservoir occupation spectrum of the scattered photon.

    Pure mirror states superpose the per-n0 amplitudes coherently, mixed
    states add probabilities; identical in structure to the emission
    spectrum but fed by the scattering long-time amplitudes.
    """
    grid = _validated_grid(grid)
    dim = trunc.dim
    overlaps = _cached_overlaps(dim, params.beta_0)
    coeffs = state_coefficients(state, params, trunc)
    expansion_deficit = _check_expansion(coeffs, overlaps, trunc)
    inv_d = _pole_inverse(params, grid, dim)

    if coeffs.kind == "pure":
        total = np.zeros((dim, grid.size), dtype=complex)
        for n0 in np.flatnonzero(np.abs(coeffs.values) > 0.0):
            total += coeffs.values[n0] * _longtime_B(
                params, int(n0), packet, grid, overlaps, inv_d
            )
        density = np.sum(np.abs(total) ** 2, axis=0)
    else:
        density = np.zeros(grid.size)
        weights = coeffs.values.real
        for n0 in np.flatnonzero(weights > 0.0):
            B = _longtime_B(params, int(n0), packet, grid, overlaps, inv_d)
            density += weights[n0] * np.sum(B.real**2 + B.imag**2, axis=0)

    result = make_spectrum(
        grid,
        density,
        metadata={
            "mode": "scattering",
            "state_kind": coeffs.kind,
            "delta_0": packet.delta_0,
            "epsilon": packet.epsilon,
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
