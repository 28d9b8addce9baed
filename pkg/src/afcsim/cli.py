"""Command-line front end.

Everything is deterministic: no sampling, no clocks, no environment
dependence, so any invocation writes byte-identical CSV files.  Exit
codes: 0 on success, 1 for usage or configuration problems, 2 when a
reproduction target misses one of its pinned checks.

Configuration is a flat ``key = value`` file; ``afcsim config`` prints
the canonical form of the resolved configuration (defaults merged with
the ``--config`` file), which parses back to the same settings.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .combs import CombShape, CombSpec, MediumSpec, UnitScale
from .output import TRACE_HEADER, format_value, trace_rows, write_csv
from .propagation import (
    FrequencyGrid,
    PulseSpec,
    TransferModel,
    build_transfer,
    comb_response,
    extract_train,
    gaussian_spectrum,
    peak_in_window,
    propagate,
    spectrum_to_signal,
)
from .protocols import single_pass, two_pass_interfere
from .reproduce import TARGETS, run_target
from .sweeps import SweepAxis, SweepKind, SweepRequest, sweep
from .train import harmonic_train, lorentzian_train, series_coefficients_square

__all__ = ["ConfigError", "RunConfig", "canonical_config", "main", "parse_config"]


class ConfigError(ValueError):
    """Configuration file rejected; the message carries the line number."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings shared by all subcommands.

    Defaults describe the reference setup: a square comb of finesse 5
    at depth 10, probed by a Gaussian pulse of spectral scale five
    tooth spacings on a 2^14-point grid spanning four of those scales.
    """

    shape: str = "square"
    finesse: float = 5.0
    d_p: float = 10.0
    gamma: float = 0.0
    pair_count: int = 9
    sigma: float = 5.0
    samples: int = 16384
    span_factor: float = 4.0
    oversample: int = 16
    model: str = "broadened"
    harmonics: int | None = 2000
    k_max: int = 8
    passes: int = 1
    mismatch_time: float = 0.0
    mismatch_phase: float = 0.0
    simulate: bool = True
    sweep_parameter: str = "d_p"
    sweep_start: float = 1.0
    sweep_stop: float = 40.0
    sweep_steps: int = 40
    sweep_scale: str = "linear"
    sweep_protocol: str = "first-echo"
    sweep_refine: bool = True
    sweep_simulate: bool = False


def _cast_bool(raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ValueError(f"expected true or false, got {raw!r}")


def _cast_choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def cast(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {raw!r}")
        return raw

    return cast


def _cast_harmonics(raw: str) -> int | None:
    if raw == "none":
        return None
    value = int(raw)
    if value < 1:
        raise ValueError("harmonics must be a positive integer or none")
    return value


_CASTERS: dict[str, Callable[[str], object]] = {
    "shape": _cast_choice(tuple(s.value for s in CombShape)),
    "finesse": float,
    "d_p": float,
    "gamma": float,
    "pair_count": int,
    "sigma": float,
    "samples": int,
    "span_factor": float,
    "oversample": int,
    "model": _cast_choice(tuple(m.value for m in TransferModel)),
    "harmonics": _cast_harmonics,
    "k_max": int,
    "passes": int,
    "mismatch_time": float,
    "mismatch_phase": float,
    "simulate": _cast_bool,
    "sweep_parameter": _cast_choice(("d_p", "finesse", "gamma")),
    "sweep_start": float,
    "sweep_stop": float,
    "sweep_steps": int,
    "sweep_scale": _cast_choice(("linear", "log")),
    "sweep_protocol": _cast_choice(tuple(k.value for k in SweepKind)),
    "sweep_refine": _cast_bool,
    "sweep_simulate": _cast_bool,
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines into a :class:`RunConfig`.

    Unknown and duplicate keys are rejected with their line number, as
    are malformed values; ``#`` starts a comment anywhere on a line.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, rest = line.partition("=")
        key = key.strip()
        rest = rest.strip()
        if key not in _CASTERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _CASTERS[key](rest)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return RunConfig(**values)


def canonical_config(config: RunConfig) -> str:
    """Emit every setting in declaration order; parses back unchanged."""
    lines = []
    for field in fields(RunConfig):
        value = getattr(config, field.name)
        if value is None:
            rendered = "none"
        else:
            rendered = format_value(value)
        lines.append(f"{field.name} = {rendered}")
    return "\n".join(lines) + "\n"


def _comb(config: RunConfig) -> CombSpec:
    return CombSpec.from_finesse(
        config.shape,
        config.finesse,
        pair_count=config.pair_count,
        gamma=config.gamma,
    )


def _grid(config: RunConfig) -> FrequencyGrid:
    return FrequencyGrid(config.span_factor * config.sigma, config.samples)


def _closed_train(config: RunConfig, k_max: int):
    shape = CombShape(config.shape)
    if shape is CombShape.SQUARE:
        return series_coefficients_square(
            config.d_p, config.finesse, k_max, gamma_over_nu0=config.gamma
        )
    if shape is CombShape.HARMONIC:
        return harmonic_train(config.d_p, k_max, gamma_over_nu0=config.gamma)
    return lorentzian_train(
        config.d_p, config.finesse, k_max, gamma_over_nu0=config.gamma
    )


def cmd_spectrum(
    config: RunConfig, out_dir: Path, scale: UnitScale | None
) -> int:
    comb = _comb(config)
    # Midpoint sampling keeps sharp-tooth models off their edge
    # singularities.
    nu = -2.5 + (np.arange(2000) + 0.5) * (5.0 / 2000)
    packed = comb_response(
        comb, nu, TransferModel(config.model), config.harmonics
    )
    header: tuple[str, ...] = ("nu_over_nu0", "absorption", "dispersion")
    columns = [nu, packed.real, packed.imag]
    if scale is not None:
        header += ("frequency_hz",)
        columns.append(np.array([scale.frequency_hz(v) for v in nu]))
    path = out_dir / "spectrum.csv"
    count = write_csv(path, header, zip(*columns))
    print(f"wrote {path} ({count} rows)")
    return 0


def cmd_transfer(
    config: RunConfig, out_dir: Path, scale: UnitScale | None
) -> int:
    transfer = build_transfer(
        _comb(config),
        MediumSpec(config.d_p),
        _grid(config),
        TransferModel(config.model),
        config.harmonics,
    )
    nu = transfer.grid.points()
    header: tuple[str, ...] = ("nu_over_nu0", "re", "im", "magnitude")
    columns = [nu, transfer.values.real, transfer.values.imag, np.abs(transfer.values)]
    if scale is not None:
        header += ("frequency_hz",)
        columns.append(np.array([scale.frequency_hz(v) for v in nu]))
    path = out_dir / "transfer.csv"
    count = write_csv(path, header, zip(*columns))
    print(f"wrote {path} ({count} rows)")
    return 0


def _propagated(config: RunConfig):
    comb = _comb(config)
    pulse = PulseSpec(sigma=config.sigma)
    grid = _grid(config)
    spectrum = gaussian_spectrum(pulse, grid)
    reference_signal = spectrum_to_signal(spectrum, grid, config.oversample)
    amp, _ = peak_in_window(
        reference_signal,
        reference_signal.times[0],
        reference_signal.times[-1] + reference_signal.dt,
    )
    transfer = build_transfer(
        comb,
        MediumSpec(config.d_p),
        grid,
        TransferModel(config.model),
        config.harmonics,
    )
    signal = propagate(spectrum, transfer, config.oversample)
    return comb, signal, abs(amp) ** 2


def cmd_propagate(
    config: RunConfig, out_dir: Path, scale: UnitScale | None
) -> int:
    comb, signal, reference = _propagated(config)
    rows = trace_rows(
        signal, comb.delay_time, reference, -1.0, config.k_max + 1.0
    )
    header: tuple[str, ...] = TRACE_HEADER
    if scale is not None:
        header += ("time_s",)
        rows = [row + (scale.time_s(row[0]),) for row in rows]
    path = out_dir / "trace.csv"
    count = write_csv(path, header, rows)
    print(f"wrote {path} ({count} rows)")
    return 0


def cmd_train(config: RunConfig, out_dir: Path, scale: UnitScale | None) -> int:
    comb, signal, reference = _propagated(config)
    train = extract_train(
        signal, comb.delay_time, config.k_max, reference_intensity=reference
    )
    closed = _closed_train(config, config.k_max)
    header: tuple[str, ...] = (
        "k",
        "intensity",
        "closed_intensity",
        "rel_error",
        "arrival_over_T",
    )
    rows = []
    for entry in train.entries:
        reference_value = closed.intensity(entry.index)
        rel = (
            entry.intensity / reference_value - 1.0
            if reference_value > 0.0
            else math.nan
        )
        row: tuple[object, ...] = (
            entry.index,
            entry.intensity,
            reference_value,
            rel,
            entry.arrival / comb.delay_time,
        )
        if scale is not None:
            row += (scale.time_s(entry.arrival / comb.delay_time),)
        rows.append(row)
        print(
            f"k={entry.index} intensity={entry.intensity:.6f} "
            f"closed={reference_value:.6f} rel={rel:+.2e}"
        )
    if scale is not None:
        header += ("arrival_s",)
    path = out_dir / "train.csv"
    write_csv(path, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_protocol(
    config: RunConfig, out_dir: Path, scale: UnitScale | None
) -> int:
    if config.passes not in (1, 2):
        raise ValueError(f"passes must be 1 or 2, got {config.passes}")
    comb = _comb(config)
    medium = MediumSpec(config.d_p)
    pulse = PulseSpec(sigma=config.sigma)
    kwargs = dict(
        pulse=pulse,
        grid=_grid(config),
        model=TransferModel(config.model),
        harmonics=config.harmonics,
        oversample=config.oversample,
        simulate=config.simulate,
    )
    if config.passes == 2:
        result = two_pass_interfere(
            comb,
            medium,
            mismatch_time=config.mismatch_time,
            mismatch_phase=config.mismatch_phase,
            **kwargs,
        )
        label = "two-pass"
    else:
        result = single_pass(comb, medium, k_max=config.k_max, **kwargs)
        label = "first-echo"
    simulated = result.simulated_efficiency
    rel = (
        simulated / result.closed_efficiency - 1.0
        if simulated is not None and result.closed_efficiency > 0.0
        else math.nan
    )
    path = out_dir / "protocol.csv"
    write_csv(
        path,
        (
            "protocol",
            "shape",
            "finesse",
            "d_p",
            "gamma",
            "closed_efficiency",
            "simulated_efficiency",
            "rel_error",
        ),
        [
            (
                label,
                config.shape,
                config.finesse,
                config.d_p,
                config.gamma,
                result.closed_efficiency,
                math.nan if simulated is None else simulated,
                rel,
            )
        ],
    )
    if simulated is None:
        print(f"{label}: closed={result.closed_efficiency:.6f} (no simulation)")
    else:
        print(
            f"{label}: closed={result.closed_efficiency:.6f} "
            f"simulated={simulated:.6f} rel={rel:+.2e}"
        )
    print(f"wrote {path} (1 rows)")
    return 0


def cmd_sweep(config: RunConfig, out_dir: Path, scale: UnitScale | None) -> int:
    request = SweepRequest(
        axis=SweepAxis(
            config.sweep_parameter,
            config.sweep_start,
            config.sweep_stop,
            config.sweep_steps,
            config.sweep_scale,
        ),
        kind=SweepKind(config.sweep_protocol),
        shape=CombShape(config.shape),
        finesse=config.finesse,
        d_p=config.d_p,
        gamma=config.gamma,
        pair_count=config.pair_count,
        k_max=min(config.k_max, 3) if config.k_max >= 1 else 1,
        refine=config.sweep_refine,
        simulate=config.sweep_simulate,
        model=TransferModel(config.model),
        harmonics=config.harmonics,
        sigma=config.sigma,
        span_factor=config.span_factor,
        samples=config.samples,
        oversample=config.oversample,
    )
    result = sweep(request)
    k_cols = request.k_max
    header = (
        (config.sweep_parameter, "efficiency")
        + tuple(f"i{k}" for k in range(1, k_cols + 1))
        + ("status",)
    )
    rows = []
    for row in result.rows:
        padded = row.intensities + (math.nan,) * (k_cols - len(row.intensities))
        rows.append((row.value, row.efficiency) + padded + (row.status,))
    path = out_dir / "sweep.csv"
    write_csv(path, header, rows)
    refined = " (refined)" if result.refined else ""
    print(
        f"best {config.sweep_parameter}={result.best_value:.6g} "
        f"efficiency={result.best_efficiency:.6f}{refined}"
    )
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_config(config: RunConfig, out_dir: Path, scale: UnitScale | None) -> int:
    sys.stdout.write(canonical_config(config))
    return 0


_COMMANDS: dict[str, Callable[[RunConfig, Path, UnitScale | None], int]] = {
    "spectrum": cmd_spectrum,
    "transfer": cmd_transfer,
    "propagate": cmd_propagate,
    "train": cmd_train,
    "protocol": cmd_protocol,
    "sweep": cmd_sweep,
    "config": cmd_config,
}


def cmd_reproduce(target: str | None, out_dir: Path) -> int:
    if target is None:
        for name in sorted(TARGETS):
            print(f"{name}: {TARGETS[name][0]}")
        return 0
    try:
        report = run_target(target, out_dir)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 1
    for check in report.checks:
        status = "ok" if check.ok else "FAIL"
        print(
            f"[{status:>4}] {report.name}: {check.label}: "
            f"value={check.value:.8g} expected={check.expected:.8g} "
            f"tol={check.tol:.2g}"
        )
    for path in report.files:
        print(f"wrote {path}")
    return 0 if report.ok else 2


class _Parser(argparse.ArgumentParser):
    # Usage problems are configuration problems: exit 1, reserve 2 for
    # failed reproduction checks.
    def error(self, message: str):  # noqa: D102
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="afcsim",
        description="Pulse storage and recall in periodic absorption combs.",
    )
    parser.add_argument(
        "--config",
        type=Path,
        metavar="PATH",
        help="key = value settings file merged over the defaults",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=Path("."),
        metavar="DIR",
        help="directory for CSV output (created if missing)",
    )
    parser.add_argument(
        "--physical",
        type=float,
        metavar="NU0_HZ",
        help="also emit physical-unit columns, taking nu0 as this many Hz",
    )
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser
    )
    commands.add_parser("spectrum", help="comb response over the central periods")
    commands.add_parser("transfer", help="complex transfer function on the grid")
    commands.add_parser("propagate", help="time trace of the propagated pulse")
    commands.add_parser("train", help="echo train against the closed form")
    commands.add_parser("protocol", help="single- or two-pass efficiency")
    commands.add_parser("sweep", help="efficiency along a parameter axis")
    commands.add_parser("config", help="print the resolved configuration")
    reproduce = commands.add_parser(
        "reproduce", help="rerun a pinned reference result"
    )
    reproduce.add_argument(
        "target", nargs="?", help="target name; omit to list targets"
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc}") from exc
            config = parse_config(text)
        else:
            config = RunConfig()
        scale = UnitScale(args.physical) if args.physical is not None else None
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "reproduce":
            return cmd_reproduce(args.target, out_dir)
        return _COMMANDS[args.command](config, out_dir, scale)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
