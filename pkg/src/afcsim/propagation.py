"""Spectral propagation of pulses through a prepared comb.

The field convention is ``F(nu) = int f(t) exp(+1j nu t) dt`` with the
inverse carrying ``exp(-1j nu t) / 2 pi``, so multiplying a spectrum by
``exp(1j nu T)`` delays the signal by ``T``.  A medium with packed
response ``chi'' + 1j chi'`` (see :mod:`afcsim.susceptibility`)
multiplies the field spectrum by

    H(nu) = exp(-(d_p / 2) (chi''(nu) - 1j chi'(nu))),

the one-sided exponent that keeps re-emission at positive delays.

Grids are symmetric, binary-sized and centred on zero; transforms use
the centred-index phase factors worked out for exactly these grids, so
both directions are unitary up to the stated quadrature weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .combs import CombShape, CombSpec, MediumSpec
from . import susceptibility as sus

__all__ = [
    "TransferModel",
    "FrequencyGrid",
    "PulseSpec",
    "TimeSignal",
    "TransferFunction",
    "TrainEntry",
    "PulseTrain",
    "comb_response",
    "build_transfer",
    "gaussian_spectrum",
    "spectrum_to_signal",
    "signal_to_spectrum",
    "propagate",
    "peak_in_window",
    "extract_train",
]


class TransferModel(str, enum.Enum):
    """Which response model feeds the transfer function.

    IDEAL is the infinite periodic comb (series, or resummed when the
    harmonic count is ``None``); IDEAL_FINITE keeps the finite tooth
    count but no broadening; BROADENED is the finite comb with
    Lorentzian teeth.  Harmonic and Lorentzian tooth shapes have exact
    periodic forms that already include broadening, so for them all
    models coincide except IDEAL_FINITE, which is only defined for
    square teeth.
    """

    IDEAL = "ideal"
    IDEAL_FINITE = "ideal-finite"
    BROADENED = "broadened"


def comb_response(
    comb: CombSpec,
    nu: np.ndarray | float,
    model: TransferModel = TransferModel.BROADENED,
    harmonics: int | None = 2000,
) -> np.ndarray:
    """Packed response ``chi'' + 1j chi'`` of a comb under a model."""
    model = TransferModel(model)
    if comb.shape is CombShape.HARMONIC:
        if model is TransferModel.IDEAL_FINITE:
            raise ValueError("harmonic combs are inherently periodic")
        return sus.harmonic_comb_response(nu, nu0=comb.nu0, gamma=comb.gamma)
    if comb.shape is CombShape.LORENTZIAN:
        if model is TransferModel.IDEAL_FINITE:
            raise ValueError("no finite-comb form for Lorentzian teeth")
        return sus.lorentzian_comb_response(
            nu, 1.0 / comb.finesse, nu0=comb.nu0, gamma=comb.gamma
        )
    if model is TransferModel.IDEAL:
        if comb.gamma != 0.0:
            raise ValueError("ideal square model has no broadening; use BROADENED")
        return sus.chi_square_series(
            nu, 1.0 / comb.finesse, harmonics, nu0=comb.nu0
        )
    if model is TransferModel.IDEAL_FINITE or comb.gamma == 0.0:
        return sus.chi_square_exact(
            nu, 1.0 / comb.finesse, comb.pair_count, nu0=comb.nu0
        )
    return sus.epsilon_broadened(
        nu,
        comb.half_width,
        nu0=comb.nu0,
        gamma=comb.gamma,
        pair_count=comb.pair_count,
    )


@dataclass(frozen=True)
class FrequencyGrid:
    """Symmetric detuning grid ``(k - samples/2) * spacing``."""

    half_span: float
    samples: int = 2**14

    def __post_init__(self) -> None:
        if self.half_span <= 0.0:
            raise ValueError(f"half_span must be positive, got {self.half_span}")
        if self.samples < 16 or self.samples & (self.samples - 1):
            raise ValueError(
                f"samples must be a power of two >= 16, got {self.samples}"
            )

    @classmethod
    def for_pulse(
        cls,
        pulse: "PulseSpec",
        span_factor: float = 4.0,
        samples: int = 2**14,
    ) -> "FrequencyGrid":
        return cls(span_factor * pulse.sigma, samples)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_span / self.samples

    def points(self) -> np.ndarray:
        return (np.arange(self.samples) - self.samples // 2) * self.spacing


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian input pulse ``amplitude e^{1j phase} exp(-sigma^2 (t - center)^2)``.

    ``sigma`` is the temporal decay rate; the spectrum is Gaussian with
    standard deviation ``sigma * sqrt(2)`` in detuning.
    """

    amplitude: float = 1.0
    sigma: float = 5.0
    center: float = 0.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass
class TimeSignal:
    """Complex field samples on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def energy(self, lo: float | None = None, hi: float | None = None) -> float:
        """Integrated intensity, optionally restricted to ``[lo, hi)``."""
        mask = np.ones(self.times.size, dtype=bool)
        if lo is not None:
            mask &= self.times >= lo
        if hi is not None:
            mask &= self.times < hi
        return float(np.sum(np.abs(self.values[mask]) ** 2) * self.dt)


@dataclass
class TransferFunction:
    """Transfer samples on a grid plus the closure that produced them.

    ``response`` evaluates the same model at arbitrary detunings, which
    multi-segment protocols need when they re-enter the spectral domain
    on a finer (padded) grid.
    """

    grid: FrequencyGrid
    values: np.ndarray
    response: Callable[[np.ndarray], np.ndarray]
    comb: CombSpec
    medium: MediumSpec
    model: TransferModel

    def __call__(self, nu: np.ndarray | float) -> np.ndarray:
        return self.response(nu)


def transfer_exponent(packed: np.ndarray, d_p: float) -> np.ndarray:
    """``exp(-(d_p/2)(chi'' - 1j chi'))`` from a packed response."""
    return np.exp(-0.5 * d_p * (packed.real - 1j * packed.imag))


def build_transfer(
    comb: CombSpec,
    medium: MediumSpec,
    grid: FrequencyGrid,
    model: TransferModel = TransferModel.BROADENED,
    harmonics: int | None = 2000,
) -> TransferFunction:
    model = TransferModel(model)

    def response(nu: np.ndarray | float) -> np.ndarray:
        return transfer_exponent(
            comb_response(comb, nu, model, harmonics), medium.d_p
        )

    return TransferFunction(
        grid=grid,
        values=response(grid.points()),
        response=response,
        comb=comb,
        medium=medium,
        model=model,
    )


def gaussian_spectrum(pulse: PulseSpec, grid: FrequencyGrid) -> np.ndarray:
    nu = grid.points()
    envelope = (math.sqrt(math.pi) / pulse.sigma) * np.exp(
        -(nu**2) / (4.0 * pulse.sigma**2)
    )
    carrier = np.exp(1j * (pulse.phase + nu * pulse.center))
    return pulse.amplitude * envelope * carrier


def _alternating(n: int) -> np.ndarray:
    alt = np.ones(n)
    alt[1::2] = -1.0
    return alt


def spectrum_to_signal(
    spectrum: np.ndarray,
    grid: FrequencyGrid,
    oversample: int = 16,
) -> TimeSignal:
    """Inverse transform onto the centred time grid.

    Zero-pads the spectrum symmetrically by ``oversample`` so the time
    step shrinks accordingly; the window length ``2 pi / spacing`` is
    unchanged.  ``oversample`` must be a power of two.
    """
    if oversample < 1 or oversample & (oversample - 1):
        raise ValueError(f"oversample must be a power of two, got {oversample}")
    m = grid.samples
    if spectrum.shape != (m,):
        raise ValueError("spectrum does not match the grid")
    total = m * oversample
    left = (total - m) // 2
    padded = np.zeros(total, dtype=complex)
    padded[left : left + m] = spectrum
    dt = 2.0 * math.pi / (total * grid.spacing)
    alt = _alternating(total)
    values = (grid.spacing / (2.0 * math.pi)) * alt * np.fft.fft(padded * alt)
    times = (np.arange(total) - total // 2) * dt
    return TimeSignal(times=times, values=values)


def signal_to_spectrum(signal: TimeSignal) -> tuple[np.ndarray, np.ndarray]:
    """Forward transform back to the matching centred detuning grid.

    Inverse of :func:`spectrum_to_signal` on the padded grid it
    produced: returns ``(nu, spectrum)`` with ``nu`` spanning the full
    padded resolution, spacing ``2 pi / (n dt)``.
    """
    n = signal.times.size
    if n & (n - 1):
        raise ValueError(f"signal length must be a power of two, got {n}")
    dnu = 2.0 * math.pi / (n * signal.dt)
    alt = _alternating(n)
    spectrum = signal.dt * alt * n * np.fft.ifft(signal.values * alt)
    nu = (np.arange(n) - n // 2) * dnu
    return nu, spectrum


def propagate(
    spectrum: np.ndarray,
    transfer: TransferFunction,
    oversample: int = 16,
) -> TimeSignal:
    """Apply the transfer on its grid and return the output signal."""
    return spectrum_to_signal(spectrum * transfer.values, transfer.grid, oversample)


@dataclass(frozen=True)
class TrainEntry:
    index: int
    amplitude: complex
    intensity: float
    arrival: float


@dataclass
class PulseTrain:
    """Interpolated peaks of a signal sampled once per expected delay."""

    entries: tuple[TrainEntry, ...]
    reference_intensity: float

    def entry(self, index: int) -> TrainEntry:
        for e in self.entries:
            if e.index == index:
                return e
        raise KeyError(f"no train entry with index {index}")

    def amplitude(self, index: int) -> complex:
        return self.entry(index).amplitude

    def intensity(self, index: int) -> float:
        return self.entry(index).intensity

    @property
    def intensities(self) -> np.ndarray:
        return np.array([e.intensity for e in self.entries])

    @property
    def total_intensity(self) -> float:
        return float(self.intensities.sum())


def peak_in_window(
    signal: TimeSignal,
    lo: float,
    hi: float,
) -> tuple[complex, float]:
    """Sub-sample peak of ``|field|`` inside ``[lo, hi)``.

    Quadratic interpolation of the intensity locates the peak offset;
    the complex amplitude is read off a second-order Lagrange fit of
    the field at the same offset, which keeps the phase.
    """
    idx = np.nonzero((signal.times >= lo) & (signal.times < hi))[0]
    if idx.size == 0:
        raise ValueError(f"window [{lo}, {hi}) contains no samples")
    values = signal.values
    j = idx[np.argmax(np.abs(values[idx]))]
    j = min(max(j, 1), values.size - 2)
    i_m, i_0, i_p = (np.abs(values[j + s]) ** 2 for s in (-1, 0, 1))
    denom = i_m - 2.0 * i_0 + i_p
    offset = 0.0 if denom == 0.0 else 0.5 * (i_m - i_p) / denom
    offset = float(np.clip(offset, -0.5, 0.5))
    s_m, s_0, s_p = values[j - 1], values[j], values[j + 1]
    amplitude = (
        s_0
        + offset * (s_p - s_m) / 2.0
        + offset**2 * (s_p - 2.0 * s_0 + s_m) / 2.0
    )
    return complex(amplitude), float(signal.times[j] + offset * signal.dt)


def extract_train(
    signal: TimeSignal,
    period: float,
    k_max: int,
    *,
    k_min: int = 0,
    window_fraction: float = 0.5,
    reference_intensity: float | None = None,
) -> PulseTrain:
    """Read the pulse train off a propagated signal.

    Window ``k`` is ``[k * period - w, k * period + w)`` with
    ``w = window_fraction * period``.  Intensities are peak field
    intensities divided by ``reference_intensity`` when given (the
    simulated input peak, so grid truncation cancels).
    """
    if period <= 0.0:
        raise ValueError(f"period must be positive, got {period}")
    if not 0.0 < window_fraction <= 0.5:
        raise ValueError(
            f"window_fraction must lie in (0, 0.5], got {window_fraction}"
        )
    ref = 1.0 if reference_intensity is None else reference_intensity
    entries = []
    w = window_fraction * period
    for k in range(k_min, k_max + 1):
        center = k * period
        amplitude, arrival = peak_in_window(signal, center - w, center + w)
        entries.append(
            TrainEntry(
                index=k,
                amplitude=amplitude,
                intensity=abs(amplitude) ** 2 / ref,
                arrival=arrival,
            )
        )
    return PulseTrain(entries=tuple(entries), reference_intensity=ref)
