"""Physical parameters, mirror initial states, and the shared truncation policy.

All frequencies and rates are angular and share one unit system; the
conventional choice (used throughout the CLI and the docs) is omega_M = 1,
so couplings, decay rates, and detunings are quoted in units of the
mechanical frequency.

Every type here is an immutable value object: safe to share between
workers, hashable where the fields allow it, and never mutated after
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import ParameterError, TruncationError
from .franck_condon import overlap

__all__ = [
    "SystemParams",
    "derive_params",
    "NumberState",
    "DisplacedGround",
    "CoherentState",
    "ThermalState",
    "SuperpositionState",
    "MirrorState",
    "TruncationConfig",
    "StateCoefficients",
    "state_coefficients",
]


@dataclass(frozen=True)
class SystemParams:
    """Optomechanical constants: mechanical frequency, single-photon coupling,
    and cavity-field energy decay rate.

    The derived quantities are exposed as properties so they are always
    recomputed from (omega_M, g) and can never drift out of sync:

    * ``beta_0 = g / omega_M`` -- dimensionless mirror displacement per photon.
    * ``delta = beta_0 * g = g**2 / omega_M`` -- photon-state frequency shift.
    """

    omega_M: float
    g: float
    gamma_c: float

    @property
    def beta_0(self) -> float:
        return self.g / self.omega_M

    @property
    def delta(self) -> float:
        # written as beta_0 * g so delta == beta_0 * g holds bit-for-bit
        return self.beta_0 * self.g


def derive_params(omega_M: float, g: float, gamma_c: float) -> SystemParams:
    """Validate the raw constants and return a `SystemParams`.

    Raises:
        ParameterError: if omega_M or gamma_c is not strictly positive, or
            g is negative (or any value is not a finite real number).
    """
    for name, value in (("omega_M", omega_M), ("g", g), ("gamma_c", gamma_c)):
        if not (isinstance(value, (int, float)) and not isinstance(value, bool)):
            raise ParameterError(f"{name} must be a real number, got {value!r}")
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")
    if omega_M <= 0:
        raise ParameterError(f"omega_M must be > 0, got {omega_M}")
    if gamma_c <= 0:
        raise ParameterError(f"gamma_c must be > 0, got {gamma_c}")
    if g < 0:
        raise ParameterError(f"g must be >= 0, got {g}")
    return SystemParams(float(omega_M), float(g), float(gamma_c))


# --- mirror initial states --------------------------------------------------


@dataclass(frozen=True)
class NumberState:
    """Mechanical Fock state |n0>."""

    n0: int


@dataclass(frozen=True)
class DisplacedGround:
    """Ground state of the displaced (one-photon) oscillator potential."""


@dataclass(frozen=True)
class CoherentState:
    """Coherent state with real amplitude beta.

    Only real amplitudes are supported; the phase convention for complex
    amplitudes is deliberately left undefined.
    """

    beta: float


@dataclass(frozen=True)
class ThermalState:
    """Thermal mixture with mean phonon number nbar >= 0."""

    nbar: float


@dataclass(frozen=True)
class SuperpositionState:
    """Explicit pure superposition sum_n0 coeffs[n0] |n0>.

    Coefficients are stored as a tuple of complex numbers and must be
    normalized to unit probability within 1e-12.
    """

    coeffs: tuple[complex, ...]


MirrorState = (
    NumberState | DisplacedGround | CoherentState | ThermalState | SuperpositionState
)


@dataclass(frozen=True)
class TruncationConfig:
    """Cutoff policy shared by every phonon sum.

    n_phonon_max is the largest retained phonon index N (sums run over
    0..N); tail_tolerance is the largest acceptable probability weight
    beyond the cutoff.
    """

    n_phonon_max: int = 64
    tail_tolerance: float = 1e-10

    def __post_init__(self):
        if not isinstance(self.n_phonon_max, int) or self.n_phonon_max < 1:
            raise ParameterError(
                f"n_phonon_max must be an integer >= 1, got {self.n_phonon_max!r}"
            )
        if not (0.0 < self.tail_tolerance < 1.0):
            raise ParameterError(
                f"tail_tolerance must be in (0, 1), got {self.tail_tolerance!r}"
            )

    @property
    def dim(self) -> int:
        """Number of retained phonon levels, N + 1."""
        return self.n_phonon_max + 1


@dataclass(frozen=True)
class StateCoefficients:
    """Expansion of a mirror state over Fock levels 0..N.

    kind is "pure" (values are complex amplitudes C_n0) or "mixed"
    (values are real probabilities P_n0).  tail_deficit is the
    probability weight of the state beyond the cutoff, evaluated before
    any renormalization.
    """

    kind: str
    values: np.ndarray
    tail_deficit: float

    def __post_init__(self):
        self.values.flags.writeable = False


def _poisson_tail(mean: float, n_max: int) -> float:
    """P[Poisson(mean) > n_max], the weight beyond the cutoff."""
    if mean == 0.0:
        return 0.0
    return float(gammainc(n_max + 1, mean))


def state_coefficients(
    state: MirrorState, params: SystemParams, trunc: TruncationConfig
) -> StateCoefficients:
    """Expand a mirror state over Fock levels up to the cutoff.

    Pure states come back as renormalized amplitude vectors; thermal
    mixtures come back as raw geometric weights (not renormalized, so the
    recorded tail deficit plus the retained weight is exactly one).

    Raises:
        TruncationError: if the weight beyond the cutoff is not below
            trunc.tail_tolerance.
        ParameterError: for invalid state descriptions.
    """
    dim = trunc.dim

    if isinstance(state, NumberState):
        if not isinstance(state.n0, int) or state.n0 < 0:
            raise ParameterError(f"number state index must be >= 0, got {state.n0!r}")
        if state.n0 > trunc.n_phonon_max:
            raise TruncationError(
                f"number state n0={state.n0} lies beyond cutoff N={trunc.n_phonon_max}",
                deficit=1.0,
            )
        values = np.zeros(dim, dtype=complex)
        values[state.n0] = 1.0
        return StateCoefficients("pure", values, 0.0)

    if isinstance(state, CoherentState):
        beta = state.beta
        if isinstance(beta, complex):
            raise ParameterError(
                "coherent amplitudes must be real; the phase convention for "
                f"complex beta is undefined (got {beta!r})"
            )
        if not math.isfinite(beta):
            raise ParameterError(f"coherent amplitude must be finite, got {beta!r}")
        return _pure_from_amplitudes(
            _coherent_amplitudes(float(beta), dim),
            tail=_poisson_tail(beta * beta, trunc.n_phonon_max),
            tolerance=trunc.tail_tolerance,
            label=f"coherent state beta={beta}",
        )

    if isinstance(state, DisplacedGround):
        b0 = params.beta_0
        values = np.array([overlap(n, 0, b0) for n in range(dim)], dtype=complex)
        return _pure_from_amplitudes(
            values,
            tail=_poisson_tail(b0 * b0, trunc.n_phonon_max),
            tolerance=trunc.tail_tolerance,
            label=f"displaced ground state (beta_0={b0})",
        )

    if isinstance(state, ThermalState):
        nbar = state.nbar
        if not (isinstance(nbar, (int, float)) and math.isfinite(nbar)) or nbar < 0:
            raise ParameterError(f"thermal nbar must be >= 0, got {nbar!r}")
        nbar = float(nbar)
        if nbar == 0.0:
            weights = np.zeros(dim)
            weights[0] = 1.0
            deficit = 0.0
        else:
            n = np.arange(dim)
            ratio = nbar / (nbar + 1.0)
            weights = ratio**n / (nbar + 1.0)
            deficit = ratio**dim
        if deficit >= trunc.tail_tolerance:
            raise TruncationError(
                f"thermal state nbar={nbar} not contained below cutoff "
                f"N={trunc.n_phonon_max}",
                deficit=deficit,
            )
        return StateCoefficients("mixed", weights, float(deficit))

    if isinstance(state, SuperpositionState):
        values = np.asarray(state.coeffs, dtype=complex)
        if values.ndim != 1 or values.size == 0:
            raise ParameterError("superposition coefficients must be a 1-d sequence")
        total = float(np.sum(np.abs(values) ** 2))
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(
                f"superposition coefficients must be normalized; sum |C|^2 = {total!r}"
            )
        tail = float(np.sum(np.abs(values[dim:]) ** 2))
        padded = np.zeros(dim, dtype=complex)
        padded[: min(dim, values.size)] = values[:dim]
        return _pure_from_amplitudes(
            padded,
            tail=tail,
            tolerance=trunc.tail_tolerance,
            label="superposition state",
        )

    raise ParameterError(f"unsupported mirror state {state!r}")


def _coherent_amplitudes(beta: float, dim: int) -> np.ndarray:
    if beta == 0.0:
        values = np.zeros(dim, dtype=complex)
        values[0] = 1.0
        return values
    n = np.arange(dim)
    log_mag = -0.5 * beta * beta + n * math.log(abs(beta)) - 0.5 * gammaln(n + 1)
    sign = np.where(n % 2 == 1, math.copysign(1.0, beta), 1.0)
    return (sign * np.exp(log_mag)).astype(complex)


def _pure_from_amplitudes(
    values: np.ndarray, tail: float, tolerance: float, label: str
) -> StateCoefficients:
    if tail >= tolerance:
        raise TruncationError(f"{label} not contained below the cutoff", deficit=tail)
    retained = float(np.sum(np.abs(values) ** 2))
    if retained <= 0.0:
        raise TruncationError(f"{label} has no weight below the cutoff", deficit=1.0)
    return StateCoefficients("pure", values / math.sqrt(retained), float(tail))
