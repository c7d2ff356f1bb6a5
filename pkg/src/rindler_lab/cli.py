"""Scenario runner: every experiment as a subcommand with flat key=value configs.

Usage:
    rindler-lab <experiment> [--config FILE] [--out PATH]
    rindler-lab selfcheck [--out PATH]

Config files are line-oriented ``key = value`` with ``#`` comments. A ``units``
key selects the unit system (``geometric``, the default, or ``SI``), which
fixes the defaults for c and g. Outputs are CSV with provenance comment lines
(parameters and tool version), 17-significant-digit floats and ``\\n`` line
endings, so identical configs produce byte-identical files.

Exit codes: 0 ok, 2 configuration error, 3 numeric/solver error, 4 invariant
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, selfcheck
from .dynamics import find_equilibrium, integrate, step_schedule, time_average_position
from .errors import ConfigError, RindlerLabError
from .forms import ConstantInternal, HarmonicInternal, HarmonicSupport
from .frames import SI_EARTH_GRAVITY, SI_LIGHT_SPEED
from .hamiltonian import HamiltonianSpec, PotentialSpec, check_expansion_consistency
from .redshift import run_redshift_experiment
from .visibility import InternalSpectrum, InterferometerConfig, visibility, visibility_oracle

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INVARIANT = 4

_UNIT_DEFAULTS = {
    "geometric": {"c": 1.0, "g": 1.0},
    "SI": {"c": SI_LIGHT_SPEED, "g": SI_EARTH_GRAVITY},
}

_REQUIRED = object()


def parse_config(path: str) -> dict[str, str]:
    """Read a flat key = value config file with # comments."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        values[key] = value
    return values


class _Params:
    """Typed access to raw config values, tracking what was resolved for
    provenance and unknown-key detection."""

    def __init__(self, raw: dict[str, str]):
        self.raw = dict(raw)
        self.resolved: dict[str, object] = {}

    def _fetch(self, key, default, convert, kind):
        if key in self.raw:
            try:
                value = convert(self.raw[key])
            except ValueError as exc:
                raise ConfigError(f"key '{key}' is not a valid {kind}: {self.raw[key]!r}") from exc
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key '{key}'")
        else:
            value = default
        self.resolved[key] = value
        return value

    def number(self, key, default=_REQUIRED) -> float:
        return self._fetch(key, default, float, "number")

    def integer(self, key, default=_REQUIRED) -> int:
        return self._fetch(key, default, int, "integer")

    def word(self, key, default=_REQUIRED) -> str:
        return self._fetch(key, default, str, "string")

    def unknown_keys(self) -> set[str]:
        return set(self.raw) - set(self.resolved) - {"experiment", "out"}


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path, provenance: dict, header, rows, results: dict | None = None) -> None:
    lines = [f"# rindler-lab {__version__}"]
    for key in sorted(provenance):
        lines.append(f"# {key} = {_format_cell(provenance[key])}")
    for key in sorted(results or {}):
        lines.append(f"# result_{key} = {_format_cell(results[key])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: str
    parameters: dict[str, str]
    output_path: str


def _exp_frames_check(p: _Params, units: dict):
    samples = p.integer("samples", 1000)
    seed = p.integer("seed", 20240811)
    checks = (
        selfcheck.check_frames_round_trip(samples, seed),
        selfcheck.check_shifted_frame_consistency(samples, seed),
    )
    rows = []
    failed = False
    for result in checks:
        rows.append((result.name, samples, result.detail, result.passed))
        failed = failed or not result.passed
    header = ["check", "samples", "detail", "passed"]
    return header, rows, {}, EXIT_INVARIANT if failed else EXIT_OK


def _exp_redshift(p: _Params, units: dict):
    g = p.number("g", units["g"])
    c = p.number("c", units["c"])
    b = p.number("b")
    energy = p.number("E")
    r = run_redshift_experiment(g=g, b=b, e_emitted=energy, c=c)
    header = [
        "g",
        "b",
        "c",
        "E_emitted",
        "absorption_T",
        "absorption_X",
        "detector_proper_time",
        "measured_energy",
        "first_order_energy",
        "doppler_factor",
    ]
    row = (
        g,
        b,
        c,
        energy,
        r.absorption_event.t,
        r.absorption_event.x,
        r.detector_proper_time,
        r.measured_energy,
        r.first_order_energy,
        r.doppler_factor,
    )
    return header, [row], {}, EXIT_OK


def _clock_spec(mass, g, c, hrel0, alpha) -> HamiltonianSpec:
    return HamiltonianSpec(
        masses=(mass,),
        g=g,
        c=c,
        internal_energy=ConstantInternal(hrel0),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(alpha)),
    )


def _exp_equilibrium(p: _Params, units: dict):
    mass = p.number("M")
    alpha = p.number("alpha")
    hrel0 = p.number("Hrel0", 0.0)
    g = p.number("g", units["g"])
    c = p.number("c", units["c"])
    result = find_equilibrium(_clock_spec(mass, g, c, hrel0, alpha))
    header = [
        "M",
        "g",
        "c",
        "alpha",
        "Hrel0",
        "solver_X",
        "closed_form_X",
        "abs_difference",
        "solver_P",
        "residual",
    ]
    row = (
        mass,
        g,
        c,
        alpha,
        hrel0,
        result.state.R,
        result.closed_form_X,
        abs(result.state.R - result.closed_form_X),
        result.state.P,
        result.residual,
    )
    return header, [row], {}, EXIT_OK


def _exp_drift(p: _Params, units: dict):
    mass = p.number("M")
    alpha = p.number("alpha")
    hrel0 = p.number("Hrel0", 0.0)
    g = p.number("g", units["g"])
    c = p.number("c", units["c"])
    dt = p.number("dt", 0.02)
    steps = p.integer("steps", 8000)
    schedule_kind = p.word("schedule", "step")
    factor = p.number("schedule_factor", 2.0)
    change_at = p.number("schedule_time", 1.0)
    if schedule_kind != "step":
        raise ConfigError(f"unknown schedule '{schedule_kind}'; only 'step' is supported")

    spec = _clock_spec(mass, g, c, hrel0, alpha)
    equilibrium = find_equilibrium(spec)
    trajectory = integrate(
        spec, equilibrium.state, dt, steps, schedule=step_schedule(factor, change_at)
    )
    horizon = steps * dt
    window_start = change_at + 0.5 * (horizon - change_at)
    average = time_average_position(trajectory, window_start)
    predicted = -(mass * g + g * factor * hrel0 / c**2) / alpha
    results = {
        "average_position_after_change": average,
        "predicted_position_after_change": predicted,
        "predicted_shift": -g * hrel0 * (factor - 1.0) / (alpha * c**2),
        "equilibrium_position": equilibrium.state.R,
    }
    header = ["t", "X", "P", "H"]
    rows = [
        (t, s.R, s.P, e)
        for t, s, e in zip(trajectory.times, trajectory.states, trajectory.energies)
    ]
    return header, rows, results, EXIT_OK


def _exp_visibility(p: _Params, units: dict):
    g = p.number("g", units["g"])
    c = p.number("c", units["c"])
    hbar = p.number("hbar", 1.0)
    dx = p.number("dx")
    duration = p.number("T")
    lam = p.number("lambda", 0.0)
    levels = p.integer("levels", 8)
    spacing = p.number("spacing", 1.0)
    ratio = p.number("ratio", 0.5)
    spectrum = InternalSpectrum.geometric(spacing=spacing, ratio=ratio, dim=levels)

    def config_for(**overrides) -> InterferometerConfig:
        values = dict(
            x_upper=dx, x_lower=0.0, duration=duration, g=g, c=c, hbar=hbar,
            counter_coupling=lam,
        )
        values.update(overrides)
        return InterferometerConfig(**values)

    sweep = p.word("sweep", "")
    if sweep:
        if sweep not in ("lambda", "duration", "separation"):
            raise ConfigError(
                f"sweep must be one of lambda, duration, separation; got '{sweep}'"
            )
        start = p.number("sweep_start")
        stop = p.number("sweep_stop")
        points = p.integer("sweep_points", 21)
        if points < 2:
            raise ConfigError(f"sweep_points must be >= 2, got {points}")
        values = [start + (stop - start) * i / (points - 1) for i in range(points)]
        rows = []
        for value in values:
            if sweep == "lambda":
                config = config_for(counter_coupling=value)
            elif sweep == "duration":
                config = config_for(duration=value)
            else:
                config = config_for(x_upper=value)
            rows.append(
                (value, visibility(config, spectrum), visibility_oracle(config, spectrum))
            )
        header = [sweep, "V_closed_form", "V_oracle"]
        return header, rows, {}, EXIT_OK

    config = config_for()
    header = ["lambda", "V_closed_form", "V_oracle"]
    rows = [(lam, visibility(config, spectrum), visibility_oracle(config, spectrum))]
    return header, rows, {}, EXIT_OK


def _exp_expansion_check(p: _Params, units: dict):
    samples = p.integer("samples", 100)
    seed = p.integer("seed", 20240812)
    g = p.number("g", units["g"])
    alpha = p.number("alpha", 1.0)
    c_values = tuple(
        float(v) for v in p.word("c_values", "10,20,40,80").split(",") if v.strip()
    )
    if len(c_values) < 2:
        raise ConfigError(f"need at least two c values, got {c_values!r}")

    masses = (0.5, 0.5)
    spec = HamiltonianSpec(
        masses=masses,
        g=g,
        c=c_values[0],
        internal_energy=HarmonicInternal(masses, stiffness=1.0, offset=0.3),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(alpha)),
    )
    rng = np.random.default_rng(seed)
    rows = []
    exponents = []
    all_passed = True
    for index in range(samples):
        state = spec.state(
            R=rng.uniform(-1.0, 1.0),
            P=rng.choice((-1.0, 1.0)) * rng.uniform(0.8, 1.6),
            rel_pos=rng.uniform(-0.5, 0.5, 2),
            rel_mom=rng.uniform(-0.5, 0.5, 2),
        )
        report = check_expansion_consistency(spec, state, c_values=c_values)
        exponents.append(report.fitted_exponent)
        all_passed = all_passed and report.passed
        for c, difference in zip(report.c_values, report.differences):
            rows.append((index, c, difference, report.fitted_exponent, report.passed))
    header = ["state_index", "c", "abs_difference", "fitted_exponent", "passed"]
    results = {
        "min_fitted_exponent": min(exponents),
        "max_fitted_exponent": max(exponents),
    }
    return header, rows, results, EXIT_OK if all_passed else EXIT_INVARIANT


_EXPERIMENTS = {
    "frames-check": _exp_frames_check,
    "redshift": _exp_redshift,
    "equilibrium": _exp_equilibrium,
    "drift": _exp_drift,
    "visibility": _exp_visibility,
    "expansion-check": _exp_expansion_check,
}


def run_scenario(config: ScenarioConfig) -> int:
    """Execute one experiment and write its CSV; returns the exit code."""
    if config.experiment not in _EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{config.experiment}'")
    raw = config.parameters
    declared = raw.get("experiment")
    if declared is not None and declared != config.experiment:
        raise ConfigError(
            f"config declares experiment '{declared}' but '{config.experiment}' was requested"
        )
    params = _Params(raw)
    units_name = params.word("units", "geometric")
    if units_name not in _UNIT_DEFAULTS:
        raise ConfigError(f"unknown unit system '{units_name}' (geometric or SI)")
    header, rows, results, code = _EXPERIMENTS[config.experiment](
        params, _UNIT_DEFAULTS[units_name]
    )
    unknown = params.unknown_keys()
    if unknown:
        raise ConfigError(
            f"unknown keys for experiment '{config.experiment}': {', '.join(sorted(unknown))}"
        )
    provenance = {"experiment": config.experiment, **params.resolved}
    write_csv(config.output_path, provenance, header, rows, results)
    return code


def _run_selfcheck(out_path: str | None) -> int:
    results = selfcheck.run_all()
    width = max(len(r.name) for r in results)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.name:<{width}}  {status}  {result.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{'-' * width}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if out_path:
        write_csv(
            out_path,
            {"experiment": "selfcheck"},
            ["check", "passed", "detail"],
            [(r.name, r.passed, r.detail) for r in results],
        )
    return EXIT_INVARIANT if failed else EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rindler-lab",
        description="Run desk-scale experiments on the 1/c^2-corrected mechanics "
        "of composite systems in accelerated frames.",
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name in _EXPERIMENTS:
        sub = subparsers.add_parser(name, help=f"run the {name} experiment")
        sub.add_argument("--config", help="flat key = value parameter file")
        sub.add_argument("--out", help="output CSV path (default <experiment>.csv)")
    check = subparsers.add_parser("selfcheck", help="run the full invariant suite")
    check.add_argument("--out", help="optional CSV path for the result table")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK

    try:
        if args.experiment == "selfcheck":
            return _run_selfcheck(args.out)
        parameters = parse_config(args.config) if args.config else {}
        output = args.out or parameters.get("out") or f"{args.experiment}.csv"
        return run_scenario(
            ScenarioConfig(
                experiment=args.experiment, parameters=parameters, output_path=output
            )
        )
    except ConfigError as exc:
        print(f"rindler-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RindlerLabError, ValueError) as exc:
        print(f"rindler-lab: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
