"""End-to-end invariant suite.

Each check mirrors one release criterion at its stated tolerance and returns
a CheckResult; ``run_all`` executes the lot (about ten seconds of work, most
of it the two 1e5-step integrations). The CLI ``selfcheck`` subcommand prints
the table and exits nonzero if anything fails; the acceptance tests call the
same functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import frames
from .dynamics import (
    find_equilibrium,
    integrate,
    step_schedule,
    time_average_position,
)
from .errors import RindlerLabError
from .forms import ConstantInternal, HarmonicInternal, HarmonicSupport
from .hamiltonian import (
    HamiltonianSpec,
    PotentialSpec,
    check_expansion_consistency,
    clock_rest_hamiltonian,
    external_potential,
    internal_hamiltonian,
    total_hamiltonian_expanded,
)
from .redshift import run_redshift_experiment
from .visibility import InternalSpectrum, InterferometerConfig, visibility, visibility_oracle


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_shifted_frame_consistency(samples: int = 1000, seed: int = 20240811) -> CheckResult:
    """Composing the shifted-chart map with the effective-acceleration inertial
    map must reproduce the direct inertial coordinates shifted by b, to 1e-12
    relative, over random valid events (c = 1, g in [0.5, 2], b in [0, 0.5])."""
    rng = np.random.default_rng(seed)
    c = 1.0
    worst = 0.0
    for _ in range(samples):
        g = rng.uniform(0.5, 2.0)
        b = rng.uniform(0.0, 0.5)
        event = frames.RindlerEvent(
            t=rng.uniform(-2.0, 2.0),
            x=rng.uniform(-0.5 * c * c / g, 3.0),
        )
        shifted_frame = frames.FrameSpec(g=g, b=b, c=c)
        base = frames.FrameSpec(g=g, b=0.0, c=c)
        effective = frames.FrameSpec(g=frames.effective_acceleration(shifted_frame), b=0.0, c=c)

        direct = frames.rindler_to_minkowski(event, base)
        composed = frames.rindler_to_minkowski(
            frames.shift_rindler(event, shifted_frame), effective
        )
        scale = max(1.0, abs(c * direct.t), abs(direct.x) + c * c / g)
        worst = max(
            worst,
            c * abs(composed.t - direct.t) / scale,
            abs(composed.x - (direct.x - b)) / scale,
        )
    return CheckResult(
        name="shifted-frame consistency",
        passed=worst <= 1e-12,
        detail=f"max relative error {worst:.3e} over {samples} draws (tolerance 1e-12)",
    )


def check_frames_round_trip(samples: int = 1000, seed: int = 20240811) -> CheckResult:
    """Mapping accelerated -> inertial -> accelerated must return the original
    event to 1e-12 relative on random valid events (not part of the numbered
    release criteria; run by the frames-check scenario)."""
    rng = np.random.default_rng(seed)
    c = 1.0
    worst = 0.0
    for _ in range(samples):
        g = rng.uniform(0.5, 2.0)
        frame = frames.FrameSpec(g=g, b=0.0, c=c)
        event = frames.RindlerEvent(
            t=rng.uniform(-2.0, 2.0),
            x=rng.uniform(-0.5 * c * c / g, 3.0),
        )
        back = frames.minkowski_to_rindler(frames.rindler_to_minkowski(event, frame), frame)
        scale = max(1.0, abs(event.t), abs(event.x) + c * c / g)
        worst = max(worst, abs(back.t - event.t) / scale, abs(back.x - event.x) / scale)
    return CheckResult(
        name="frames round trip",
        passed=worst <= 1e-12,
        detail=f"max relative error {worst:.3e} over {samples} draws (tolerance 1e-12)",
    )


def check_redshift() -> CheckResult:
    """The measured photon energy must satisfy both the first-order law
    |factor - (1 + gb/c^2)| <= 2 (gb/c^2)^2 and the exact accelerated-detector
    relation factor = exp(g tau/c) to 1e-10 relative."""
    worst_first_order = 0.0
    worst_exponential = 0.0
    for shift in (1e-1, 1e-2, 1e-3):
        g, c, energy = 1.0, 1.0, 1.0
        result = run_redshift_experiment(g=g, b=shift * c * c / g, e_emitted=energy, c=c)
        first_order_gap = abs(result.doppler_factor - (1.0 + shift))
        worst_first_order = max(worst_first_order, first_order_gap / (2.0 * shift * shift))
        exact = math.exp(g * result.detector_proper_time / c)
        worst_exponential = max(
            worst_exponential, abs(result.doppler_factor - exact) / exact
        )
    passed = worst_first_order <= 1.0 and worst_exponential <= 1e-10
    return CheckResult(
        name="redshift first-order law",
        passed=passed,
        detail=(
            f"first-order gap at {worst_first_order:.3e} of the 2(gb/c^2)^2 budget, "
            f"exp(g tau/c) mismatch {worst_exponential:.3e} (tolerance 1e-10)"
        ),
    )


def _expansion_spec(c: float = 10.0) -> HamiltonianSpec:
    masses = (0.5, 0.5)
    return HamiltonianSpec(
        masses=masses,
        g=1.0,
        c=c,
        internal_energy=HarmonicInternal(masses, stiffness=1.0, offset=0.3),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(1.0)),
    )


def check_expansion_scaling(samples: int = 100, seed: int = 20240812) -> CheckResult:
    """|expanded - product| must decay with fitted exponent -4 +- 0.2 under a
    c sweep {10, 20, 40, 80} on random states with nonzero momentum."""
    rng = np.random.default_rng(seed)
    spec = _expansion_spec()
    exponents = []
    for _ in range(samples):
        state = spec.state(
            R=rng.uniform(-1.0, 1.0),
            P=rng.choice((-1.0, 1.0)) * rng.uniform(0.8, 1.6),
            rel_pos=rng.uniform(-0.5, 0.5, 2),
            rel_mom=rng.uniform(-0.5, 0.5, 2),
        )
        report = check_expansion_consistency(spec, state, c_values=(10.0, 20.0, 40.0, 80.0))
        exponents.append(report.fitted_exponent)
    gap = max(abs(e + 4.0) for e in exponents)
    return CheckResult(
        name="expansion consistency",
        passed=gap <= 0.2,
        detail=(
            f"fitted exponents within {gap:.3f} of -4 over {samples} states "
            f"(tolerance 0.2)"
        ),
    )


def check_equilibrium() -> CheckResult:
    """Solver equilibrium position must match -(Mg + g H_int/c^2)/alpha to
    10 c^-4 with Hamilton residual below 1e-10, across stiffness and
    internal-energy settings."""
    worst_gap = 0.0
    worst_residual = 0.0
    for c in (1.0, 10.0):
        for alpha in (0.5, 1.0, 2.0):
            for hrel0 in (0.0, 0.2, 1.0):
                spec = HamiltonianSpec(
                    masses=(1.0,),
                    g=1.0,
                    c=c,
                    internal_energy=ConstantInternal(hrel0),
                    potential=PotentialSpec(newtonian_part=HarmonicSupport(alpha)),
                )
                result = find_equilibrium(spec)
                closed = -(1.0 * 1.0 + 1.0 * hrel0 / c**2) / alpha
                worst_gap = max(worst_gap, abs(result.state.R - closed) * c**4 / 10.0)
                worst_residual = max(worst_residual, result.residual)
    passed = worst_gap <= 1.0 and worst_residual < 1e-10
    return CheckResult(
        name="equilibrium closed form",
        passed=passed,
        detail=(
            f"closed-form gap at {worst_gap:.3e} of the 10 c^-4 budget, "
            f"max residual {worst_residual:.3e} (tolerance 1e-10)"
        ),
    )


def _drift_spec(c: float = 2.0, hrel0: float = 0.2) -> HamiltonianSpec:
    # parameters keep the equilibrium above the horizon -c^2/g, where the
    # dynamics is stable and oscillatory
    return HamiltonianSpec(
        masses=(1.0,),
        g=1.0,
        c=c,
        internal_energy=ConstantInternal(hrel0),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(1.0)),
    )


def check_drift() -> CheckResult:
    """Doubling the internal energy must shift the oscillation-averaged c.m.
    by -g H_int/(alpha c^2) within 10%; with an unchanged schedule the c.m.
    must hold its equilibrium to 1e-8 over 1e4 steps."""
    hrel0, c, alpha, g, mass = 0.2, 2.0, 1.0, 1.0, 1.0
    spec = _drift_spec(c=c, hrel0=hrel0)
    equilibrium = find_equilibrium(spec)

    change_at = 1.0
    horizon = change_at + 160.0
    trajectory = integrate(
        spec,
        equilibrium.state,
        dt=0.02,
        steps=math.ceil(horizon / 0.02),
        schedule=step_schedule(2.0, change_at),
    )
    window_start = change_at + 0.5 * (horizon - change_at)
    average = time_average_position(trajectory, window_start)
    predicted_shift = -g * hrel0 / (alpha * c**2)
    predicted_new = -(mass * g + g * 2.0 * hrel0 / c**2) / alpha
    shift_gap = abs(average - predicted_new) / abs(predicted_shift)

    hold = integrate(spec, equilibrium.state, dt=0.01, steps=10_000)
    hold_gap = max(abs(s.R - equilibrium.state.R) for s in hold.states)

    passed = shift_gap <= 0.1 and hold_gap < 1e-8
    return CheckResult(
        name="drift under internal change",
        passed=passed,
        detail=(
            f"averaged shift within {shift_gap:.1%} of -g dH/(alpha c^2) "
            f"(tolerance 10%), hold deviation {hold_gap:.3e} over 1e4 steps "
            f"(tolerance 1e-8)"
        ),
    )


def _relative_energy_error(energies) -> float:
    reference = energies[0]
    return max(abs(e - reference) for e in energies) / abs(reference)


def check_symplectic_quality() -> CheckResult:
    """Energy error over 1e5 implicit-midpoint steps must stay below 1e-8,
    stay non-secular, shrink about 4x when dt halves, and a forward-backward
    round trip must return to the start within 1e-10."""
    spec = _drift_spec(c=10.0)
    start = spec.state(R=0.0, P=0.0)

    fine = integrate(spec, start, dt=1e-3, steps=100_000)
    coarse = integrate(spec, start, dt=2e-3, steps=100_000)
    err_fine = _relative_energy_error(fine.energies)
    err_coarse = _relative_energy_error(coarse.energies)
    ratio = err_coarse / err_fine

    half = len(fine.energies) // 2
    reference = fine.energies[0]
    first_half = max(abs(e - reference) for e in fine.energies[:half])
    second_half = max(abs(e - reference) for e in fine.energies[half:])
    non_secular = second_half <= 1.8 * first_half

    forward = integrate(spec, start, dt=1e-3, steps=1000)
    backward = integrate(spec, forward.states[-1], dt=-1e-3, steps=1000)
    returned = backward.states[-1]
    round_trip = max(abs(returned.R - start.R), abs(returned.P - start.P))

    passed = err_fine < 1e-8 and 2.5 <= ratio <= 6.0 and non_secular and round_trip <= 1e-10
    return CheckResult(
        name="symplectic quality",
        passed=passed,
        detail=(
            f"energy error {err_fine:.3e} at dt=1e-3 (tolerance 1e-8), "
            f"halving ratio {ratio:.2f} (expected ~4), "
            f"second-half/first-half {second_half / first_half:.2f}, "
            f"round trip {round_trip:.3e} (tolerance 1e-10)"
        ),
    )


def check_visibility(samples: int = 100, seed: int = 20240813) -> CheckResult:
    """Closed-form visibility must match the density-matrix oracle to 1e-12 on
    random configurations, equal exactly 1 at g = 0 and at lambda = 1, and
    reach 0 at the two-level half-period point."""
    rng = np.random.default_rng(seed)

    def random_spectrum() -> InternalSpectrum:
        d = int(rng.integers(1, 65))
        energies = rng.uniform(0.0, 3.0, d)
        probs = rng.dirichlet(np.ones(d))
        return InternalSpectrum(tuple(zip(energies, probs)))

    def random_config(**overrides) -> InterferometerConfig:
        x_lower = rng.uniform(-1.0, 1.0)
        values = dict(
            x_upper=x_lower + rng.uniform(0.1, 2.0),
            x_lower=x_lower,
            duration=rng.uniform(0.1, 20.0),
            g=rng.uniform(0.0, 2.0),
            c=1.0,
            hbar=1.0,
            counter_coupling=rng.uniform(-0.5, 1.5),
        )
        values.update(overrides)
        return InterferometerConfig(**values)

    worst_oracle = 0.0
    for _ in range(samples):
        spectrum = random_spectrum()
        config = random_config()
        worst_oracle = max(
            worst_oracle, abs(visibility(config, spectrum) - visibility_oracle(config, spectrum))
        )

    inertial_exact = all(
        visibility(random_config(g=0.0), random_spectrum()) == 1.0 for _ in range(20)
    )
    cancelled_exact = all(
        visibility(random_config(counter_coupling=1.0), random_spectrum()) == 1.0
        for _ in range(20)
    )

    two_level = InternalSpectrum(((0.0, 0.5), (1.0, 0.5)))
    null_config = InterferometerConfig(
        x_upper=1.0, x_lower=0.0, duration=math.pi, g=1.0, c=1.0, hbar=1.0
    )
    null_visibility = visibility(null_config, two_level)

    passed = (
        worst_oracle <= 1e-12
        and inertial_exact
        and cancelled_exact
        and null_visibility <= 1e-12
    )
    return CheckResult(
        name="visibility oracle and invariances",
        passed=passed,
        detail=(
            f"max |closed form - oracle| {worst_oracle:.3e} over {samples} draws "
            f"(tolerance 1e-12), V(g=0)=1 exact: {inertial_exact}, "
            f"V(lambda=1)=1 exact: {cancelled_exact}, "
            f"two-level null point V={null_visibility:.3e}"
        ),
    )


def check_clock_rest_reduction(samples: int = 50, seed: int = 20240814) -> CheckResult:
    """At R = 0, P = 0 the expanded energy (without the rest offset) must equal
    H_int + U_ext exactly, and with a harmonic support the clock energy must
    equal H_int exactly."""
    rng = np.random.default_rng(seed)
    masses = (1.0, 2.0)
    spec = HamiltonianSpec(
        masses=masses,
        g=1.0,
        c=1.0,
        internal_energy=HarmonicInternal(masses, stiffness=1.0, offset=0.1),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(0.7)),
    )
    exact = True
    for _ in range(samples):
        state = spec.state(
            R=0.0,
            P=0.0,
            rel_pos=rng.uniform(-1.0, 1.0, 2),
            rel_mom=rng.uniform(-1.0, 1.0, 2),
        )
        reduced = total_hamiltonian_expanded(spec, state, include_rest_energy=False)
        reference = internal_hamiltonian(spec, state) + external_potential(spec, state)
        if reduced != reference:
            exact = False
        if clock_rest_hamiltonian(spec, state) != internal_hamiltonian(spec, state):
            exact = False
    return CheckResult(
        name="clock-at-rest reduction",
        passed=exact,
        detail=f"exact equality on {samples} random internal states: {exact}",
    )


_CHECKS: tuple[tuple[str, Callable[[], CheckResult]], ...] = (
    ("1", check_shifted_frame_consistency),
    ("2", check_redshift),
    ("3", check_expansion_scaling),
    ("4", check_equilibrium),
    ("5", check_drift),
    ("6", check_symplectic_quality),
    ("7", check_visibility),
    ("8", check_clock_rest_reduction),
)


def run_all() -> list[CheckResult]:
    """Run every check in release order; a crashing check is reported as a
    failure rather than aborting the suite."""
    results = []
    for label, check in _CHECKS:
        try:
            result = check()
        except (RindlerLabError, ValueError, ArithmeticError) as exc:
            result = CheckResult(name=check.__name__, passed=False, detail=f"raised {exc!r}")
        results.append(CheckResult(f"{label} {result.name}", result.passed, result.detail))
    return results
