"""paramres: two-mode flux-pumped Kerr cavity at non-degenerate parametric resonance.

Steady states and branch structure of the driven cavity, linearized
input-output response (two- and four-channel Bogoliubov scattering,
supermode decomposition, phase locking), homodyne squeezing spectra with
matched-filter SNR, and unitary frequency conversion, plus a config-driven
CLI (``paramres``) that writes deterministic CSV tables.
"""

from .device import (
    DeviceSpec,
    ModePair,
    RegimeReport,
    derive_mode_pair,
    pump_strength,
    solve_mode_spectrum,
    validate_regime,
)
from .steadystate import (
    BranchPoint,
    BranchTable,
    CavityState,
    DriveTone,
    OscillationState,
    PumpConfig,
    detuning_threshold,
    fluctuation_matrices,
    instability_threshold,
    oscillation_state,
    solve_steady_state,
    stability_of_state,
    sweep_branches,
    trivial_state,
)
from .response import (
    FourModeBogoliubov,
    GainTable,
    NearThresholdResponse,
    PhaseLock,
    RegularizedResponse,
    SignalIdlerGains,
    SupermodeCoeffs,
    TwoModeBogoliubov,
    four_mode_bogoliubov,
    four_mode_matrices,
    gain_spectrum,
    near_threshold_asymptotics,
    nonlinear_io,
    oscillator_determinants,
    phase_lock,
    regularized_detuned_response,
    supermode_coeffs,
    supermode_to_bogoliubov,
    two_mode_uv,
)
from .noise import (
    HomodyneConfig,
    PairAmplitudes,
    SNRResult,
    SqueezingSpectrum,
    four_mode_spectrum,
    optimal_squeezing_phase,
    snr,
    squeezed_vacuum_amplitudes,
    two_mode_spectrum,
)
from .conversion import (
    ConversionMap,
    ConversionScattering,
    conversion_scattering,
    conversion_sweep,
    full_conversion_point,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # device
    "DeviceSpec",
    "ModePair",
    "RegimeReport",
    "solve_mode_spectrum",
    "derive_mode_pair",
    "pump_strength",
    "validate_regime",
    # steady states
    "PumpConfig",
    "DriveTone",
    "CavityState",
    "OscillationState",
    "BranchPoint",
    "BranchTable",
    "instability_threshold",
    "detuning_threshold",
    "oscillation_state",
    "solve_steady_state",
    "stability_of_state",
    "trivial_state",
    "fluctuation_matrices",
    "sweep_branches",
    # response
    "TwoModeBogoliubov",
    "SignalIdlerGains",
    "NearThresholdResponse",
    "FourModeBogoliubov",
    "SupermodeCoeffs",
    "PhaseLock",
    "RegularizedResponse",
    "GainTable",
    "two_mode_uv",
    "nonlinear_io",
    "near_threshold_asymptotics",
    "four_mode_matrices",
    "four_mode_bogoliubov",
    "supermode_coeffs",
    "supermode_to_bogoliubov",
    "oscillator_determinants",
    "phase_lock",
    "regularized_detuned_response",
    "gain_spectrum",
    # noise
    "HomodyneConfig",
    "SqueezingSpectrum",
    "SNRResult",
    "PairAmplitudes",
    "two_mode_spectrum",
    "four_mode_spectrum",
    "optimal_squeezing_phase",
    "snr",
    "squeezed_vacuum_amplitudes",
    # conversion
    "ConversionScattering",
    "ConversionMap",
    "conversion_scattering",
    "full_conversion_point",
    "conversion_sweep",
]
