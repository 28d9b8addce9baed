"""Parameter sweeps and optimum finding for storage efficiency."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .combs import CombShape, CombSpec, MediumSpec
from .propagation import FrequencyGrid, PulseSpec, TransferModel
from .protocols import single_pass, two_pass_interfere
from .train import (
    first_echo_intensity,
    ideal_limit_intensity,
    optimal_depth,
    prompt_attenuation,
    series_coefficients_square,
)

__all__ = [
    "SweepKind",
    "SweepAxis",
    "SweepRequest",
    "SweepRow",
    "SweepResult",
    "golden_section_max",
    "sweep",
    "optimal_curve",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Maximise a unimodal function on ``[lo, hi]``.

    Plain golden-section search; returns the midpoint of the final
    bracket and the function value there.
    """
    if hi <= lo:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


class SweepKind(str, enum.Enum):
    FIRST_ECHO = "first-echo"
    TWO_PASS = "two-pass"


@dataclass(frozen=True)
class SweepAxis:
    """Swept parameter: one of ``d_p``, ``finesse``, ``gamma``."""

    name: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.name not in ("d_p", "finesse", "gamma"):
            raise ValueError(f"unknown sweep parameter {self.name!r}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise ValueError("log scale needs positive endpoints")
        if self.stop <= self.start:
            raise ValueError("stop must exceed start")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepRequest:
    axis: SweepAxis
    kind: SweepKind = SweepKind.FIRST_ECHO
    shape: CombShape = CombShape.SQUARE
    finesse: float = 5.0
    d_p: float = 10.0
    gamma: float = 0.0
    pair_count: int = 9
    k_max: int = 3
    refine: bool = True
    simulate: bool = False
    model: TransferModel = TransferModel.BROADENED
    harmonics: int | None = 2000
    sigma: float = 5.0
    span_factor: float = 6.0
    samples: int = 2**15
    oversample: int = 16


@dataclass(frozen=True)
class SweepRow:
    value: float
    efficiency: float
    intensities: tuple[float, ...]
    status: str


@dataclass
class SweepResult:
    request: SweepRequest
    rows: tuple[SweepRow, ...]
    best_value: float
    best_efficiency: float
    refined: bool


def _combination(request: SweepRequest, value: float) -> tuple[CombSpec, MediumSpec]:
    params = {
        "finesse": request.finesse,
        "gamma": request.gamma,
        "d_p": request.d_p,
    }
    params[request.axis.name] = value
    comb = CombSpec.from_finesse(
        request.shape,
        params["finesse"],
        pair_count=request.pair_count,
        gamma=params["gamma"],
    )
    return comb, MediumSpec(params["d_p"])


def _closed_efficiency(request: SweepRequest, value: float) -> float:
    comb, medium = _combination(request, value)
    eff = first_echo_intensity(comb, medium)
    if request.kind is SweepKind.TWO_PASS:
        eff *= (1.0 + prompt_attenuation(comb, medium)) ** 2
    return eff


def _simulated_efficiency(request: SweepRequest, value: float) -> float:
    comb, medium = _combination(request, value)
    pulse = PulseSpec(sigma=request.sigma)
    grid = FrequencyGrid.for_pulse(pulse, request.span_factor, request.samples)
    kwargs = dict(
        pulse=pulse,
        grid=grid,
        model=request.model,
        harmonics=request.harmonics,
        oversample=request.oversample,
    )
    if request.kind is SweepKind.TWO_PASS:
        result = two_pass_interfere(comb, medium, **kwargs)
    else:
        result = single_pass(comb, medium, k_max=request.k_max, **kwargs)
    assert result.simulated_efficiency is not None
    return result.simulated_efficiency


def _echo_intensities(request: SweepRequest, value: float) -> tuple[float, ...]:
    """Closed-form intensities of echoes 1..k_max at this sweep point."""
    comb, medium = _combination(request, value)
    if comb.shape is not CombShape.SQUARE:
        return ()
    coeffs = series_coefficients_square(
        medium.d_p,
        comb.finesse,
        request.k_max,
        gamma_over_nu0=comb.gamma / comb.nu0,
    )
    return tuple(float(coeffs.intensity(k)) for k in range(1, request.k_max + 1))


def sweep(request: SweepRequest) -> SweepResult:
    """Evaluate the efficiency along the axis, then refine the optimum.

    Each grid point is evaluated in closed form or by simulation per
    ``request.simulate``; failures are recorded per row rather than
    aborting the sweep.  Refinement brackets the best grid point and
    runs a golden-section search on the closed form (simulation values
    are too expensive to bracket tightly and follow the same trend).
    """
    evaluate = _simulated_efficiency if request.simulate else _closed_efficiency
    rows = []
    for value in request.axis.values():
        try:
            efficiency = evaluate(request, float(value))
            intensities = _echo_intensities(request, float(value))
            rows.append(SweepRow(float(value), efficiency, intensities, "ok"))
        except (ValueError, ZeroDivisionError) as exc:
            rows.append(SweepRow(float(value), math.nan, (), f"failed: {exc}"))
    ok = [r for r in rows if r.status == "ok"]
    if not ok:
        raise ValueError("every sweep point failed")
    best = max(ok, key=lambda r: r.efficiency)
    best_value, best_efficiency = best.value, best.efficiency
    refined = False
    if request.refine:
        values = [r.value for r in ok]
        i = values.index(best.value)
        if 0 < i < len(ok) - 1:
            lo, hi = values[i - 1], values[i + 1]
            best_value, best_efficiency = golden_section_max(
                lambda v: _closed_efficiency(request, v), lo, hi
            )
            refined = True
    return SweepResult(
        request=request,
        rows=tuple(rows),
        best_value=best_value,
        best_efficiency=best_efficiency,
        refined=refined,
    )


def optimal_curve(finesse_values: np.ndarray | list[float]) -> np.ndarray:
    """Best single-pass recall of unbroadened square combs.

    Returns rows ``(finesse, optimal depth, intensity at the optimum)``;
    the depth column is exactly twice the finesse and the intensity
    approaches ``4 exp(-2)`` from below as the finesse grows.
    """
    finesse_values = np.asarray(finesse_values, dtype=float)
    out = np.empty((finesse_values.size, 3))
    for i, finesse in enumerate(finesse_values):
        comb = CombSpec.from_finesse(CombShape.SQUARE, finesse)
        out[i] = (
            finesse,
            optimal_depth(comb),
            ideal_limit_intensity(float(finesse)),
        )
    return out
