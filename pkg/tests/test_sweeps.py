"""Parameter sweeps, golden-section refinement, optimal-recall curve."""

import math

import numpy as np
import pytest

from afcsim.combs import CombShape, CombSpec, MediumSpec
from afcsim.propagation import TransferModel
from afcsim.sweeps import (
    SweepAxis,
    SweepKind,
    SweepRequest,
    golden_section_max,
    optimal_curve,
    sweep,
)
from afcsim.train import first_echo_intensity


class TestGoldenSection:
    def test_finds_parabola_vertex(self):
        x, fx = golden_section_max(lambda v: -((v - 2.0) ** 2), 0.0, 5.0)
        assert x == pytest.approx(2.0, abs=1e-5)
        assert fx == pytest.approx(0.0, abs=1e-10)

    def test_rejects_empty_bracket(self):
        with pytest.raises(ValueError):
            golden_section_max(lambda v: v, 1.0, 1.0)


class TestSweepAxis:
    def test_linear_values(self):
        np.testing.assert_allclose(
            SweepAxis("d_p", 1.0, 3.0, 5).values(), [1.0, 1.5, 2.0, 2.5, 3.0]
        )

    def test_log_values(self):
        values = SweepAxis("gamma", 0.001, 0.1, 3, scale="log").values()
        np.testing.assert_allclose(values, [0.001, 0.01, 0.1], rtol=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(name="depth", start=1.0, stop=2.0, steps=3),
            dict(name="d_p", start=1.0, stop=2.0, steps=1),
            dict(name="d_p", start=1.0, stop=2.0, steps=3, scale="cubic"),
            dict(name="d_p", start=0.0, stop=2.0, steps=3, scale="log"),
            dict(name="d_p", start=2.0, stop=2.0, steps=3),
        ],
    )
    def test_rejects_bad_axes(self, kwargs):
        with pytest.raises(ValueError):
            SweepAxis(**kwargs)


class TestDepthSweep:
    def test_refines_to_known_optimum(self):
        # F = 2: optimum at d_p = 2F with intensity (4/pi)^2 e^{-2}
        result = sweep(SweepRequest(axis=SweepAxis("d_p", 1.0, 10.0, 10), finesse=2.0))
        assert result.refined
        assert result.best_value == pytest.approx(4.0, abs=1e-4)
        assert result.best_efficiency == pytest.approx(0.21939729737767416, abs=1e-9)

    def test_unrefined_keeps_grid_point(self):
        result = sweep(
            SweepRequest(
                axis=SweepAxis("d_p", 1.0, 10.0, 10), finesse=2.0, refine=False
            )
        )
        assert not result.refined
        assert result.best_value == 4.0

    def test_boundary_best_is_not_refined(self):
        # past the optimum the efficiency decreases, so the edge wins
        result = sweep(SweepRequest(axis=SweepAxis("d_p", 5.0, 9.0, 5), finesse=2.0))
        assert not result.refined
        assert result.best_value == 5.0

    def test_harmonic_shape(self):
        result = sweep(
            SweepRequest(
                axis=SweepAxis("d_p", 2.0, 6.0, 5),
                shape=CombShape.HARMONIC,
                finesse=2.0,
            )
        )
        assert result.best_value == pytest.approx(4.0, abs=1e-4)
        assert result.best_efficiency == pytest.approx(math.exp(-2.0), abs=1e-9)
        # echo breakdown is only tabulated for square teeth
        assert result.rows[0].intensities == ()

    def test_square_rows_carry_echo_intensities(self):
        result = sweep(
            SweepRequest(axis=SweepAxis("d_p", 8.0, 12.0, 3), k_max=3, refine=False)
        )
        row = result.rows[1]
        assert row.value == 10.0
        assert len(row.intensities) == 3
        assert row.intensities[0] == pytest.approx(row.efficiency, rel=1e-12)


class TestFinesseAndGammaSweeps:
    def test_finesse_optimum_at_fixed_depth(self):
        result = sweep(SweepRequest(axis=SweepAxis("finesse", 3.0, 8.0, 6)))
        assert result.refined
        assert result.best_value == pytest.approx(5.6002, abs=1e-3)
        assert result.best_efficiency == pytest.approx(0.480895, abs=1e-5)
        # self-check: a genuine local maximum of the closed form
        for probe in (result.best_value - 0.01, result.best_value + 0.01):
            comb = CombSpec.from_finesse(CombShape.SQUARE, probe)
            assert first_echo_intensity(comb, MediumSpec(10.0)) <= result.best_efficiency

    def test_gamma_monotonically_degrades_recall(self):
        result = sweep(
            SweepRequest(axis=SweepAxis("gamma", 0.001, 0.01, 5), refine=False)
        )
        efficiencies = [r.efficiency for r in result.rows]
        assert all(hi > lo for hi, lo in zip(efficiencies, efficiencies[1:]))

    def test_failed_points_become_rows(self):
        # finesse 0.5 puts the tooth width above the spacing and fails
        result = sweep(SweepRequest(axis=SweepAxis("finesse", 0.5, 2.0, 2)))
        assert result.rows[0].status.startswith("failed")
        assert math.isnan(result.rows[0].efficiency)
        assert result.rows[1].status == "ok"
        assert result.best_value == 2.0

    def test_all_failed_raises(self):
        # the unbroadened square model rejects every gamma > 0
        request = SweepRequest(
            axis=SweepAxis("gamma", 0.001, 0.01, 3),
            simulate=True,
            model=TransferModel.IDEAL,
            samples=2**12,
        )
        with pytest.raises(ValueError, match="every sweep point failed"):
            sweep(request)


class TestTwoPassSweep:
    def test_rows_match_interference_identity(self):
        result = sweep(
            SweepRequest(
                axis=SweepAxis("d_p", 8.0, 12.0, 5),
                kind=SweepKind.TWO_PASS,
                refine=False,
            )
        )
        row = next(r for r in result.rows if r.value == 10.0)
        assert row.efficiency == pytest.approx(0.8864297147112277, rel=1e-12)


class TestSimulatedSweep:
    def test_simulation_tracks_closed_form(self):
        axis = SweepAxis("d_p", 8.0, 12.0, 3)
        simulated = sweep(
            SweepRequest(
                axis=axis,
                gamma=0.005,
                pair_count=40,
                simulate=True,
                samples=2**12,
                oversample=8,
                refine=False,
            )
        )
        closed = sweep(SweepRequest(axis=axis, gamma=0.005, refine=False))
        for sim_row, closed_row in zip(simulated.rows, closed.rows):
            assert sim_row.efficiency == pytest.approx(closed_row.efficiency, rel=1e-3)


class TestOptimalCurve:
    def test_reference_row(self):
        curve = optimal_curve([32.0])
        np.testing.assert_allclose(curve[0, :2], [32.0, 64.0])
        assert curve[0, 2] == pytest.approx(0.5396041663233373, abs=1e-12)

    def test_depth_column_doubles_finesse(self):
        curve = optimal_curve([2.0, 5.0, 10.0, 20.0])
        np.testing.assert_allclose(curve[:, 1], 2.0 * curve[:, 0], rtol=1e-14)

    def test_intensity_increases_towards_ceiling(self):
        curve = optimal_curve(np.arange(2.0, 40.0, 2.0))
        intensities = curve[:, 2]
        assert np.all(np.diff(intensities) > 0.0)
        assert intensities[-1] < 4.0 * math.exp(-2.0)
