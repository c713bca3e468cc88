"""Brute-force validation: direct integration of the amplitude equations.

The photon continuum is replaced by n_modes equally spaced modes on
[k_min, k_max] with per-mode coupling xi*sqrt(dk), xi = sqrt(gamma_c/2pi),
so the Markovian decay rate gamma_c = 2 pi xi^2 is reproduced in the
dk -> 0 limit.  The coupled amplitude equations

    dA_m/dt = -i (m omega_M - delta) A_m - i xi_d sum_n <m~|n> sum_k B_{n,k}
    dB_{m,k}/dt = -i (m omega_M + Delta_k) B_{m,k} - i xi_d sum_n <m|n~> A_n

are integrated with fixed-step classical Runge-Kutta; the fixed step
keeps results bit-reproducible and makes the convergence order testable.

Two discretization limits to respect: the mode spacing must resolve the
cavity linewidth (dk <= gamma_c/20 enforced), and the discrete bath
revives at t_rev = 2 pi / dk, so runs must end before half of that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emission import _cached_overlaps
from .errors import ParameterError, StepSizeError, TruncationError
from .model import SystemParams
from .scattering import PhotonWavepacket
from .spectrum import Spectrum, make_spectrum

__all__ = [
    "ContinuumGrid",
    "AmplitudeSet",
    "emission_initial",
    "scattering_initial",
    "integrate_amplitudes",
    "oracle_spectrum",
]

#: Largest allowed phase advance of the fastest mode per step.
MAX_PHASE_PER_STEP = 0.05
NORM_DRIFT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ContinuumGrid:
    """Uniform discretization of the photon continuum in detuning."""

    k_min: float
    k_max: float
    n_modes: int

    def __post_init__(self):
        if not (math.isfinite(self.k_min) and math.isfinite(self.k_max)):
            raise ParameterError("continuum bounds must be finite")
        if self.k_max <= self.k_min:
            raise ParameterError("continuum needs k_min < k_max")
        if not isinstance(self.n_modes, int) or self.n_modes < 2:
            raise ParameterError(f"n_modes must be an integer >= 2, got {self.n_modes!r}")

    @property
    def dk(self) -> float:
        return (self.k_max - self.k_min) / (self.n_modes - 1)

    @property
    def deltas(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.n_modes)

    @property
    def revival_time(self) -> float:
        """The discrete bath echoes back into the cavity at 2 pi / dk."""
        return 2.0 * math.pi / self.dk

    def mode_coupling(self, gamma_c: float) -> float:
        """Per-mode coupling xi sqrt(dk) reproducing gamma_c = 2 pi xi^2."""
        return math.sqrt(gamma_c * self.dk / (2.0 * math.pi))


@dataclass(frozen=True)
class AmplitudeSet:
    """State of the discretized closed system at one time.

    B holds the discrete per-mode amplitudes (the sqrt(dk) weight folded
    in), so sum |B|^2 is directly the continuum occupation probability.
    norm_drift records |total probability - initial probability| of the
    integration that produced this state (zero for initial states).
    """

    t: float
    A: np.ndarray
    B: np.ndarray
    norm_drift: float = 0.0

    def __post_init__(self):
        self.A.flags.writeable = False
        self.B.flags.writeable = False

    def total_probability(self) -> float:
        return float(np.sum(np.abs(self.A) ** 2) + np.sum(np.abs(self.B) ** 2))


def emission_initial(
    params: SystemParams,
    n0: int,
    n_phonon_max: int,
    cont: ContinuumGrid,
    tail_tolerance: float = 1e-6,
) -> AmplitudeSet:
    """Photon in the cavity, mirror in |n0>: A_m = <m~|n0>, B = 0."""
    dim = n_phonon_max + 1
    if not isinstance(n0, (int, np.integer)) or not (0 <= n0 <= n_phonon_max):
        raise ParameterError(f"n0 must lie in [0, {n_phonon_max}], got {n0!r}")
    overlaps = _cached_overlaps(dim, params.beta_0)
    A = overlaps[n0].astype(complex)
    deficit = abs(1.0 - float(np.sum(np.abs(A) ** 2)))
    if deficit > tail_tolerance:
        raise TruncationError(
            f"oracle cutoff N={n_phonon_max} too small for |n0={n0}>", deficit=deficit
        )
    B = np.zeros((dim, cont.n_modes), dtype=complex)
    return AmplitudeSet(0.0, A, B)


def scattering_initial(
    params: SystemParams,
    n0: int,
    packet: PhotonWavepacket,
    n_phonon_max: int,
    cont: ContinuumGrid,
) -> AmplitudeSet:
    """Photon in a Lorentzian packet on the mode grid, cavity empty."""
    dim = n_phonon_max + 1
    if not isinstance(n0, (int, np.integer)) or not (0 <= n0 <= n_phonon_max):
        raise ParameterError(f"n0 must lie in [0, {n_phonon_max}], got {n0!r}")
    A = np.zeros(dim, dtype=complex)
    B = np.zeros((dim, cont.n_modes), dtype=complex)
    B[n0] = math.sqrt(cont.dk) * packet.amplitude(cont.deltas)
    return AmplitudeSet(0.0, A, B)


def integrate_amplitudes(
    params: SystemParams,
    initial: AmplitudeSet,
    cont: ContinuumGrid,
    t_final: float,
    dt: float,
    drift_tolerance: float = NORM_DRIFT_TOLERANCE,
) -> AmplitudeSet:
    """Evolve an amplitude set to absolute time t_final with fixed-step RK4.

    Preconditions enforced: dk <= gamma_c/20 (Markovian mode spacing),
    dt small enough that the fastest retained frequency advances at most
    0.05 rad per step, and t_final below half the bath revival time.

    Raises:
        StepSizeError: if the probability norm drifts by more than
            drift_tolerance over the run.
    """
    if t_final < initial.t:
        raise ParameterError(f"t_final={t_final} precedes the initial time {initial.t}")
    if cont.dk > params.gamma_c / 20.0:
        raise ParameterError(
            f"mode spacing dk={cont.dk:.3e} too coarse; need dk <= gamma_c/20 = "
            f"{params.gamma_c / 20.0:.3e}"
        )
    if t_final >= 0.5 * cont.revival_time:
        raise ParameterError(
            f"t_final={t_final} reaches the discrete-bath revival "
            f"(t_rev = {cont.revival_time:.1f}); enlarge n_modes"
        )
    dim = initial.A.shape[0]
    f_max = max(
        (dim - 1) * params.omega_M,
        abs(cont.k_min),
        abs(cont.k_max),
        params.gamma_c,
    )
    if dt > MAX_PHASE_PER_STEP / f_max:
        raise ParameterError(
            f"dt={dt} too large for the fastest frequency {f_max}; need "
            f"dt <= {MAX_PHASE_PER_STEP / f_max:.3e}"
        )

    overlaps = _cached_overlaps(dim, params.beta_0)
    xi_d = cont.mode_coupling(params.gamma_c)
    m = np.arange(dim)
    rot_a = -1j * (m * params.omega_M - params.delta)
    rot_b = -1j * (m[:, None] * params.omega_M + cont.deltas[None, :])
    into_cavity = (-1j * xi_d) * overlaps.T  # <m~|n> = O[n, m]
    out_of_cavity = (-1j * xi_d) * overlaps  # <m|n~> = O[m, n]

    def rhs(A, B):
        dA = rot_a * A + into_cavity @ B.sum(axis=1)
        dB = rot_b * B
        dB += (out_of_cavity @ A)[:, None]
        return dA, dB

    span = t_final - initial.t
    steps = max(1, math.ceil(span / dt - 1e-12))
    h = span / steps
    A = initial.A.copy()
    B = initial.B.copy()
    for _ in range(steps):
        k1a, k1b = rhs(A, B)
        k2a, k2b = rhs(A + 0.5 * h * k1a, B + 0.5 * h * k1b)
        k3a, k3b = rhs(A + 0.5 * h * k2a, B + 0.5 * h * k2b)
        k4a, k4b = rhs(A + h * k3a, B + h * k3b)
        A += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        B += (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)

    norm0 = initial.total_probability()
    norm1 = float(np.sum(np.abs(A) ** 2) + np.sum(np.abs(B) ** 2))
    drift = abs(norm1 - norm0)
    if drift > drift_tolerance:
        raise StepSizeError(drift, drift_tolerance)
    return AmplitudeSet(float(t_final), A, B, norm_drift=drift)


def oracle_spectrum(final: AmplitudeSet, cont: ContinuumGrid) -> Spectrum:
    """Continuum occupation density: sum_m |B_{m,k}|^2 / dk on the mode grid."""
    density = np.sum(final.B.real**2 + final.B.imag**2, axis=0) / cont.dk
    return make_spectrum(
        cont.deltas,
        density,
        metadata={
            "mode": "oracle",
            "t": final.t,
            "norm_drift": final.norm_drift,
            "n_modes": cont.n_modes,
            "dk": cont.dk,
        },
    )
