"""Spectral-domain propagation: grids, transforms, transfer, train readout."""

import math

import numpy as np
import pytest

from afcsim.combs import CombSpec, CombShape, MediumSpec
from afcsim.propagation import (
    FrequencyGrid,
    PulseSpec,
    TimeSignal,
    TransferModel,
    build_transfer,
    comb_response,
    extract_train,
    gaussian_spectrum,
    peak_in_window,
    propagate,
    signal_to_spectrum,
    spectrum_to_signal,
    transfer_exponent,
)
from afcsim.susceptibility import chi_square_exact


class TestFrequencyGrid:
    def test_points_are_centred(self):
        grid = FrequencyGrid(half_span=8.0, samples=64)
        nu = grid.points()
        assert nu.size == 64
        assert nu[32] == 0.0
        assert nu[0] == -8.0
        np.testing.assert_allclose(np.diff(nu), grid.spacing)

    def test_spacing(self):
        grid = FrequencyGrid(half_span=8.0, samples=64)
        assert grid.spacing == 0.25

    def test_for_pulse_scales_with_sigma(self):
        pulse = PulseSpec(sigma=5.0)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=10.0, samples=256)
        assert grid.half_span == 50.0
        assert grid.samples == 256

    @pytest.mark.parametrize("half_span", [0.0, -1.0])
    def test_rejects_bad_span(self, half_span):
        with pytest.raises(ValueError):
            FrequencyGrid(half_span=half_span, samples=64)

    @pytest.mark.parametrize("samples", [8, 15, 100, 0])
    def test_rejects_bad_samples(self, samples):
        with pytest.raises(ValueError):
            FrequencyGrid(half_span=1.0, samples=samples)


class TestPulseSpec:
    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ValueError):
            PulseSpec(sigma=0.0)

    def test_spectrum_peak(self):
        # F(nu) = A sqrt(pi)/sigma e^{-nu^2/4 sigma^2} e^{i(phase + nu c)}
        pulse = PulseSpec(amplitude=2.0, sigma=4.0, phase=0.5)
        grid = FrequencyGrid(half_span=32.0, samples=128)
        spec = gaussian_spectrum(pulse, grid)
        expected = 2.0 * math.sqrt(math.pi) / 4.0 * np.exp(0.5j)
        assert spec[64] == pytest.approx(expected)
        assert np.argmax(np.abs(spec)) == 64

    def test_spectrum_center_is_linear_phase(self):
        grid = FrequencyGrid(half_span=32.0, samples=128)
        base = gaussian_spectrum(PulseSpec(sigma=4.0), grid)
        shifted = gaussian_spectrum(PulseSpec(sigma=4.0, center=0.3), grid)
        np.testing.assert_allclose(
            shifted, base * np.exp(1j * grid.points() * 0.3), atol=1e-14
        )


class TestTransforms:
    def test_inverts_gaussian_analytically(self):
        pulse = PulseSpec(amplitude=1.2, sigma=5.0, center=0.25, phase=0.3)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=10.0, samples=2**12)
        signal = spectrum_to_signal(gaussian_spectrum(pulse, grid), grid, oversample=8)
        truth = (
            pulse.amplitude
            * np.exp(1j * pulse.phase)
            * np.exp(-(pulse.sigma**2) * (signal.times - pulse.center) ** 2)
        )
        assert np.abs(signal.values - truth).max() < 1e-11

    def test_time_step_and_window(self):
        grid = FrequencyGrid(half_span=8.0, samples=64)
        signal = spectrum_to_signal(np.ones(64, dtype=complex), grid, oversample=4)
        assert signal.times.size == 256
        assert signal.dt == pytest.approx(2.0 * math.pi / (256 * grid.spacing))
        assert signal.times[128] == 0.0

    def test_round_trip_restores_padded_spectrum(self):
        pulse = PulseSpec(sigma=5.0)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=10.0, samples=2**10)
        spec = gaussian_spectrum(pulse, grid)
        nu, back = signal_to_spectrum(spectrum_to_signal(spec, grid, oversample=8))
        total = grid.samples * 8
        left = (total - grid.samples) // 2
        # same spacing over the padded (wider) span, original bins centred
        assert nu.size == total
        assert nu[1] - nu[0] == pytest.approx(grid.spacing)
        np.testing.assert_allclose(nu[left : left + grid.samples], grid.points(), atol=1e-9)
        assert np.abs(back[left : left + grid.samples] - spec).max() < 1e-11
        assert np.abs(back[:left]).max() < 1e-12
        assert np.abs(back[left + grid.samples :]).max() < 1e-12

    def test_linear_phase_delays_signal(self):
        # e^{i nu T} factor shifts the pulse to + T
        pulse = PulseSpec(sigma=5.0, center=0.25, phase=0.3)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=10.0, samples=2**12)
        spec = gaussian_spectrum(pulse, grid) * np.exp(1j * grid.points() * 0.75)
        signal = spectrum_to_signal(spec, grid, oversample=8)
        amplitude, arrival = peak_in_window(signal, 0.8, 1.2)
        assert arrival == pytest.approx(1.0, abs=1e-4)
        assert amplitude == pytest.approx(np.exp(0.3j), abs=1e-5)

    def test_parseval(self):
        pulse = PulseSpec(sigma=5.0)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=10.0, samples=2**12)
        spec = gaussian_spectrum(pulse, grid)
        energy = spectrum_to_signal(spec, grid, oversample=4).energy()
        analytic = math.sqrt(math.pi / 2.0) / pulse.sigma
        spectral = float(np.sum(np.abs(spec) ** 2) * grid.spacing / (2.0 * math.pi))
        assert energy == pytest.approx(analytic, rel=1e-10)
        assert energy == pytest.approx(spectral, rel=1e-10)

    def test_rejects_bad_oversample(self):
        grid = FrequencyGrid(half_span=1.0, samples=16)
        with pytest.raises(ValueError):
            spectrum_to_signal(np.ones(16, dtype=complex), grid, oversample=3)

    def test_rejects_mismatched_spectrum(self):
        grid = FrequencyGrid(half_span=1.0, samples=16)
        with pytest.raises(ValueError):
            spectrum_to_signal(np.ones(8, dtype=complex), grid)

    def test_rejects_nonpower_signal_length(self):
        signal = TimeSignal(times=np.linspace(0.0, 1.0, 12), values=np.zeros(12, dtype=complex))
        with pytest.raises(ValueError):
            signal_to_spectrum(signal)


class TestTimeSignal:
    def test_energy_window(self):
        times = np.arange(8) * 0.5
        values = np.zeros(8, dtype=complex)
        values[2] = 2.0
        values[5] = 1.0
        signal = TimeSignal(times=times, values=values)
        assert signal.energy() == pytest.approx(2.5)
        assert signal.energy(lo=1.0, hi=2.5) == pytest.approx(2.0)
        assert signal.energy(lo=2.5) == pytest.approx(0.5)

    def test_intensity(self):
        signal = TimeSignal(times=np.array([0.0, 1.0]), values=np.array([1j, 2.0 + 0j]))
        np.testing.assert_allclose(signal.intensity(), [1.0, 4.0])


class TestTransfer:
    def test_pure_absorber(self):
        # packed 1 + 0j attenuates by e^{-d/2} with no phase
        h = transfer_exponent(np.array([1.0 + 0.0j]), 3.0)
        assert h[0] == pytest.approx(math.exp(-1.5))

    def test_pure_dispersion_is_unimodular(self):
        packed = 1j * np.linspace(-2.0, 2.0, 9)
        h = transfer_exponent(packed, 5.0)
        np.testing.assert_allclose(np.abs(h), 1.0, atol=1e-15)
        # chi' enters the exponent as + i chi' d/2
        assert h[-1] == pytest.approx(np.exp(5.0j))

    def test_build_transfer_matches_response(self):
        comb = CombSpec(shape=CombShape.SQUARE, half_width=0.2, gamma=0.005)
        grid = FrequencyGrid(half_span=4.0, samples=64)
        transfer = build_transfer(comb, MediumSpec(d_p=10.0), grid)
        np.testing.assert_array_equal(transfer.values, transfer(grid.points()))
        np.testing.assert_array_equal(transfer.values, transfer.response(grid.points()))

    def test_propagate_applies_transfer(self):
        pulse = PulseSpec(sigma=5.0)
        grid = FrequencyGrid.for_pulse(pulse, span_factor=6.0, samples=2**10)
        comb = CombSpec(shape=CombShape.SQUARE, half_width=0.2)
        transfer = build_transfer(comb, MediumSpec(d_p=0.0), grid)
        spec = gaussian_spectrum(pulse, grid)
        out = propagate(spec, transfer, oversample=4)
        ref = spectrum_to_signal(spec, grid, oversample=4)
        # zero depth is the identity channel
        np.testing.assert_allclose(out.values, ref.values, atol=1e-14)


class TestCombResponseDispatch:
    def test_ideal_square_rejects_broadening(self):
        comb = CombSpec(shape=CombShape.SQUARE, half_width=0.2, gamma=0.01)
        with pytest.raises(ValueError):
            comb_response(comb, 0.0, model=TransferModel.IDEAL)

    def test_harmonic_rejects_finite_model(self):
        comb = CombSpec(shape=CombShape.HARMONIC)
        with pytest.raises(ValueError):
            comb_response(comb, 0.0, model=TransferModel.IDEAL_FINITE)

    def test_lorentzian_rejects_finite_model(self):
        comb = CombSpec(shape=CombShape.LORENTZIAN, half_width=0.2)
        with pytest.raises(ValueError):
            comb_response(comb, 0.0, model=TransferModel.IDEAL_FINITE)

    def test_broadened_without_gamma_is_finite_comb(self):
        comb = CombSpec(shape=CombShape.SQUARE, half_width=0.2, pair_count=9)
        nu = np.linspace(-3.0, 3.0, 41)
        np.testing.assert_array_equal(
            comb_response(comb, nu, model=TransferModel.BROADENED),
            chi_square_exact(nu, 0.2, pair_count=9),
        )

    def test_accepts_model_strings(self):
        comb = CombSpec(shape=CombShape.SQUARE, half_width=0.2)
        nu = np.linspace(-1.0, 1.0, 11)
        np.testing.assert_array_equal(
            comb_response(comb, nu, model="broadened"),
            comb_response(comb, nu, model=TransferModel.BROADENED),
        )


class TestPeakReadout:
    @staticmethod
    def _gaussian_train(amps, offsets, period, rate=6.0, dt=0.004, n=2**15):
        times = (np.arange(n) - n // 2) * dt
        values = np.zeros(n, dtype=complex)
        for k, (a, off) in enumerate(zip(amps, offsets)):
            values += a * np.exp(-(rate**2) * (times - k * period - off) ** 2)
        return TimeSignal(times=times, values=values)

    def test_subsample_peak_recovery(self):
        amps = [1.0 + 0.0j, 0.45 * np.exp(0.8j), -0.2 + 0.1j]
        offsets = [0.0, 0.0013, -0.0022]
        signal = self._gaussian_train(amps, offsets, period=3.0)
        train = extract_train(signal, 3.0, 2, reference_intensity=1.0)
        for entry in train.entries:
            assert abs(entry.amplitude - amps[entry.index]) < 1e-6
            expected_arrival = entry.index * 3.0 + offsets[entry.index]
            assert entry.arrival == pytest.approx(expected_arrival, abs=1e-5)

    def test_intensities_use_reference(self):
        signal = self._gaussian_train([2.0 + 0j], [0.0], period=3.0)
        train = extract_train(signal, 3.0, 0, reference_intensity=8.0)
        assert train.intensity(0) == pytest.approx(0.5, abs=1e-9)
        assert train.reference_intensity == 8.0

    def test_train_accessors(self):
        signal = self._gaussian_train([1.0, 0.5j], [0.0, 0.0], period=3.0)
        train = extract_train(signal, 3.0, 1)
        assert train.entry(1).index == 1
        assert train.amplitude(1) == pytest.approx(0.5j, abs=1e-8)
        np.testing.assert_allclose(train.intensities, [1.0, 0.25], atol=1e-8)
        assert train.total_intensity == pytest.approx(1.25, abs=1e-8)
        with pytest.raises(KeyError):
            train.entry(7)

    def test_k_min_skips_prompt(self):
        signal = self._gaussian_train([1.0, 0.5], [0.0, 0.0], period=3.0)
        train = extract_train(signal, 3.0, 1, k_min=1)
        assert [e.index for e in train.entries] == [1]

    def test_empty_window_raises(self):
        signal = self._gaussian_train([1.0], [0.0], period=3.0)
        with pytest.raises(ValueError):
            peak_in_window(signal, 1e6, 1e6 + 1.0)

    def test_rejects_bad_period_and_fraction(self):
        signal = self._gaussian_train([1.0], [0.0], period=3.0)
        with pytest.raises(ValueError):
            extract_train(signal, 0.0, 1)
        with pytest.raises(ValueError):
            extract_train(signal, 3.0, 1, window_fraction=0.6)
