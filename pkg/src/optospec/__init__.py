"""Single-photon emission and scattering spectra of an optomechanical cavity.

Closed-form transient and long-time amplitudes, Franck-Condon overlaps of
displaced oscillator states, reservoir occupation spectra for pure and
mixed mirror states, and an independent brute-force ODE oracle that
validates the closed forms on a discretized photon continuum.
"""

from .emission import (
    EmissionAmplitudes,
    emission_longtime,
    emission_spectrum,
    emission_transient,
)
from .errors import (
    LaguerreRangeError,
    ParameterError,
    StepSizeError,
    TruncationError,
)
from .franck_condon import OverlapMatrix, laguerre_assoc, overlap, overlap_matrix
from .model import (
    CoherentState,
    DisplacedGround,
    MirrorState,
    NumberState,
    StateCoefficients,
    SuperpositionState,
    SystemParams,
    ThermalState,
    TruncationConfig,
    derive_params,
    state_coefficients,
)
from .oracle import (
    AmplitudeSet,
    ContinuumGrid,
    emission_initial,
    integrate_amplitudes,
    oracle_spectrum,
    scattering_initial,
)
from .peaks import Peak, detect_peaks
from .scattering import (
    PhotonWavepacket,
    scattering_longtime,
    scattering_spectrum,
    scattering_transient,
)
from .spectrum import Spectrum, make_spectrum, tail_extended_grid, uniform_grid

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSet",
    "CoherentState",
    "ContinuumGrid",
    "DisplacedGround",
    "EmissionAmplitudes",
    "LaguerreRangeError",
    "MirrorState",
    "NumberState",
    "OverlapMatrix",
    "ParameterError",
    "Peak",
    "PhotonWavepacket",
    "Spectrum",
    "StateCoefficients",
    "StepSizeError",
    "SuperpositionState",
    "SystemParams",
    "ThermalState",
    "TruncationConfig",
    "TruncationError",
    "derive_params",
    "detect_peaks",
    "emission_initial",
    "emission_longtime",
    "emission_spectrum",
    "emission_transient",
    "integrate_amplitudes",
    "laguerre_assoc",
    "make_spectrum",
    "oracle_spectrum",
    "overlap",
    "overlap_matrix",
    "scattering_initial",
    "scattering_longtime",
    "scattering_spectrum",
    "scattering_transient",
    "state_coefficients",
    "tail_extended_grid",
    "uniform_grid",
]
