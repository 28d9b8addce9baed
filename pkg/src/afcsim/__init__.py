"""Pulse storage and recall in periodic absorption combs.

A comb of narrow absorption teeth written into a broad line stores a
weak pulse and re-emits it as a train of echoes spaced by the inverse
tooth spacing.  The package provides the complex linear response of
square, Lorentzian and raised-cosine combs (ideal and broadened),
closed-form echo-train coefficients, a spectral propagation engine to
cross-check them, and models of the interference and time-bin storage
protocols built on top.
"""

from .combs import (
    HARMONIC_FINESSE,
    CombShape,
    CombSpec,
    MediumSpec,
    UnitScale,
    odd_peak_centers,
    population_difference,
)
from .propagation import (
    FrequencyGrid,
    PulseSpec,
    PulseTrain,
    TimeSignal,
    TransferFunction,
    TransferModel,
    build_transfer,
    comb_response,
    extract_train,
    gaussian_spectrum,
    peak_in_window,
    propagate,
    signal_to_spectrum,
    spectrum_to_signal,
)
from .protocols import (
    ProtocolResult,
    TimeBinQubit,
    TimeBinResult,
    single_pass,
    timebin_spectrum,
    timebin_transform,
    two_pass_interfere,
)
from .susceptibility import (
    chi_square_exact,
    chi_square_series,
    epsilon_broadened,
    epsilon_peak_center,
    epsilon_window_center,
    harmonic_comb_response,
    kramers_kronig,
    lorentzian_comb_response,
    lorentzian_convolution,
    square_harmonic_weights,
)
from .sweeps import (
    SweepAxis,
    SweepKind,
    SweepRequest,
    SweepResult,
    SweepRow,
    golden_section_max,
    optimal_curve,
    sweep,
)
from .train import (
    BroadenedCoefficients,
    Provenance,
    TrainCoefficients,
    broadened_A_coefficients,
    coefficients_numeric,
    first_echo_amplitude,
    first_echo_intensity,
    harmonic_train,
    ideal_limit_intensity,
    lorentzian_train,
    optimal_depth,
    prompt_attenuation,
    series_coefficients_square,
)

__version__ = "0.1.0"

__all__ = [
    "HARMONIC_FINESSE",
    "BroadenedCoefficients",
    "CombShape",
    "CombSpec",
    "FrequencyGrid",
    "MediumSpec",
    "ProtocolResult",
    "Provenance",
    "PulseSpec",
    "PulseTrain",
    "SweepAxis",
    "SweepKind",
    "SweepRequest",
    "SweepResult",
    "SweepRow",
    "TimeBinQubit",
    "TimeBinResult",
    "TimeSignal",
    "TrainCoefficients",
    "TransferFunction",
    "TransferModel",
    "UnitScale",
    "broadened_A_coefficients",
    "build_transfer",
    "chi_square_exact",
    "chi_square_series",
    "coefficients_numeric",
    "comb_response",
    "epsilon_broadened",
    "epsilon_peak_center",
    "epsilon_window_center",
    "extract_train",
    "first_echo_amplitude",
    "first_echo_intensity",
    "gaussian_spectrum",
    "golden_section_max",
    "harmonic_comb_response",
    "harmonic_train",
    "ideal_limit_intensity",
    "kramers_kronig",
    "lorentzian_comb_response",
    "lorentzian_convolution",
    "lorentzian_train",
    "odd_peak_centers",
    "optimal_curve",
    "optimal_depth",
    "peak_in_window",
    "population_difference",
    "prompt_attenuation",
    "propagate",
    "series_coefficients_square",
    "signal_to_spectrum",
    "single_pass",
    "spectrum_to_signal",
    "sweep",
    "timebin_spectrum",
    "timebin_transform",
    "two_pass_interfere",
    "square_harmonic_weights",
]
