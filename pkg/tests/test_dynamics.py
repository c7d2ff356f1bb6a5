"""Hamiltonian flow: gradients, implicit-midpoint integration, equilibria, drift.

Claims covered:
    - analytic right-hand sides match a local finite-difference oracle
    - the integrator reproduces the harmonic-oscillator period, conserves
      energy without secular drift, and is time-reversible
    - equilibria match the closed form and an independent bisection oracle
    - changing the internal energy moves the c.m. by -g dH/(alpha c^2),
      suppressed as 1/c^2
"""

import math

import numpy as np
import pytest
from pytest import approx

from rindler_lab.dynamics import (
    Trajectory,
    drift_under_internal_change,
    find_equilibrium,
    hamilton_rhs,
    hamiltonian_value,
    integrate,
    midrange_position,
    step_schedule,
    time_average_position,
)
from rindler_lab.errors import ConvergenceError
from rindler_lab.forms import ConstantInternal, HarmonicInternal, HarmonicSupport, LinearPotential, PowerLawPotential
from rindler_lab.hamiltonian import (
    HamiltonianSpec,
    PhaseState,
    PotentialSpec,
    minkowski_cm_hamiltonian,
)


def clock_spec(g=1.0, c=1.0, mass=1.0, hrel0=0.2, alpha=1.0):
    return HamiltonianSpec(
        masses=(mass,), g=g, c=c, internal_energy=ConstantInternal(hrel0),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(alpha)),
    )


def pair_spec(g=1.0, c=2.0, alpha=1.0, offset=0.1):
    masses = (1.0, 1.0)
    return HamiltonianSpec(
        masses=masses, g=g, c=c,
        internal_energy=HarmonicInternal(masses, stiffness=1.0, offset=offset),
        potential=PotentialSpec(newtonian_part=HarmonicSupport(alpha)),
    )


def fd_gradient(spec, state, form):
    """Test-local central-difference oracle for Hamilton's right-hand side."""
    z = [state.R, state.P, *state.rel_pos, *state.rel_mom]
    n = len(state.rel_pos)

    def energy(vec):
        return hamiltonian_value(
            spec, PhaseState(vec[0], vec[1], tuple(vec[2 : 2 + n]), tuple(vec[2 + n :])), form
        )

    grad = []
    for k in range(len(z)):
        h = 1e-6 * max(1.0, abs(z[k]))
        zp, zm = list(z), list(z)
        zp[k] += h
        zm[k] -= h
        grad.append((energy(zp) - energy(zm)) / (2 * h))
    rhs = [grad[1], -grad[0]]
    rhs.extend(grad[2 + n :])
    rhs.extend(-g for g in grad[2 : 2 + n])
    return rhs


class TestHamiltonRHS:
    def test_free_particle_limit(self):
        spec = HamiltonianSpec(
            masses=(2.0,), g=0.0, c=1e8, internal_energy=ConstantInternal(0.0)
        )
        out = hamilton_rhs(spec, spec.state(P=0.6))
        assert out.R == approx(0.3, rel=1e-12)
        assert out.P == 0.0

    @pytest.mark.parametrize("form", ["expanded", "bracket"])
    def test_analytic_matches_finite_differences(self, form):
        spec = pair_spec(c=3.0)
        rng = np.random.default_rng(10)
        for _ in range(10):
            state = spec.state(
                R=rng.uniform(-1, 1), P=rng.uniform(-1, 1),
                rel_pos=rng.uniform(-0.5, 0.5, 2), rel_mom=rng.uniform(-0.5, 0.5, 2),
            )
            analytic = hamilton_rhs(spec, state, form)
            oracle = fd_gradient(spec, state, form)
            flat = [analytic.R, analytic.P, *analytic.rel_pos, *analytic.rel_mom]
            for got, want in zip(flat, oracle):
                assert got == approx(want, rel=1e-6, abs=1e-6)

    def test_numeric_fallback_matches_analytic_twin(self):
        analytic = clock_spec(c=2.0)
        opaque = HamiltonianSpec(
            masses=(1.0,), g=1.0, c=2.0,
            internal_energy=lambda rho, pi: 0.2,  # no gradient attribute
            potential=PotentialSpec(newtonian_part=HarmonicSupport(1.0)),
        )
        state = analytic.state(R=0.4, P=0.3)
        got = hamilton_rhs(opaque, state)
        want = hamilton_rhs(analytic, state)
        assert got.R == approx(want.R, rel=1e-7, abs=1e-9)
        assert got.P == approx(want.P, rel=1e-7, abs=1e-9)

    def test_vanishes_at_equilibrium(self):
        spec = clock_spec(c=2.0)
        result = find_equilibrium(spec)
        out = hamilton_rhs(spec, result.state)
        assert max(abs(out.R), abs(out.P)) < 1e-10

    def test_rejects_unknown_form(self):
        spec = clock_spec()
        with pytest.raises(ValueError):
            hamilton_rhs(spec, spec.state(), form="leapfrog")


class TestIntegrate:
    def test_harmonic_oscillator_period(self):
        # inertial, effectively nonrelativistic: X(t) = cos t, period 2 pi;
        # crossing times located by linear interpolation (third-order accurate
        # at a zero of a sine)
        spec = HamiltonianSpec(
            masses=(1.0,), g=0.0, c=1e8, internal_energy=ConstantInternal(0.0),
            potential=PotentialSpec(newtonian_part=HarmonicSupport(1.0)),
        )
        dt = 1e-3
        periods = 10
        steps = math.ceil(periods * 2 * math.pi / dt)
        trajectory = integrate(spec, spec.state(R=1.0), dt, steps)
        xs = trajectory.cm_positions()
        ts = np.asarray(trajectory.times)
        crossings = []
        for i in range(len(xs) - 1):
            if xs[i] == 0.0 or (xs[i] > 0) == (xs[i + 1] > 0):
                continue
            frac = xs[i] / (xs[i] - xs[i + 1])
            crossings.append(ts[i] + frac * dt)
        assert len(crossings) >= 2 * periods
        spans = np.diff(crossings)  # half periods
        period = 2.0 * (crossings[-1] - crossings[0]) / (len(crossings) - 1)
        assert np.all(spans > 0)
        assert period == approx(2.0 * math.pi, abs=1e-6)

    def test_quiescent_state_stays_fixed(self):
        spec = HamiltonianSpec(
            masses=(1.0,), g=0.0, c=5.0, internal_energy=ConstantInternal(0.3)
        )
        trajectory = integrate(spec, spec.state(), dt=0.1, steps=50)
        assert all(s.R == 0.0 and s.P == 0.0 for s in trajectory.states)

    def test_energy_conserved_over_long_run(self):
        spec = clock_spec(c=10.0)
        trajectory = integrate(spec, spec.state(R=0.0, P=0.0), dt=1e-3, steps=20_000)
        h0 = trajectory.energies[0]
        drift = max(abs(e - h0) for e in trajectory.energies) / abs(h0)
        assert drift < 1e-8

    def test_reversibility(self):
        spec = clock_spec(c=2.0)
        start = spec.state(R=0.3, P=-0.4)
        forward = integrate(spec, start, dt=1e-3, steps=500)
        backward = integrate(spec, forward.states[-1], dt=-1e-3, steps=500)
        final = backward.states[-1]
        assert abs(final.R - start.R) <= 1e-11
        assert abs(final.P - start.P) <= 1e-11

    def test_internal_pairs_integrate_and_conserve(self):
        spec = pair_spec(c=4.0)
        start = spec.state(R=0.2, P=0.1, rel_pos=(0.3, -0.3), rel_mom=(0.0, 0.0))
        trajectory = integrate(spec, start, dt=2e-3, steps=5_000)
        h0 = trajectory.energies[0]
        drift = max(abs(e - h0) for e in trajectory.energies) / abs(h0)
        assert drift < 1e-8
        # canonical constraints are preserved by the flow
        for state in trajectory.states[:: 500]:
            assert sum(m * r for m, r in zip(spec.masses, state.rel_pos)) == approx(
                0.0, abs=1e-10
            )
            assert sum(state.rel_mom) == approx(0.0, abs=1e-10)

    def test_scalar_and_vector_paths_agree(self):
        # the opaque internal energy forces the generic finite-difference path
        analytic = clock_spec(c=2.0)
        opaque = HamiltonianSpec(
            masses=(1.0,), g=1.0, c=2.0,
            internal_energy=lambda rho, pi: 0.2,
            potential=PotentialSpec(newtonian_part=HarmonicSupport(1.0)),
        )
        start = analytic.state(R=-0.5, P=0.2)
        fast = integrate(analytic, start, dt=0.01, steps=200)
        slow = integrate(opaque, start, dt=0.01, steps=200)
        assert fast.states[-1].R == approx(slow.states[-1].R, rel=1e-7)
        assert fast.states[-1].P == approx(slow.states[-1].P, rel=1e-7, abs=1e-9)

    def test_nonconvergence_reports_step(self):
        spec = clock_spec()
        with pytest.raises(ConvergenceError, match="step 0"):
            integrate(spec, spec.state(R=1.0), dt=5.0, steps=3)

    def test_rejects_bad_arguments(self):
        spec = clock_spec()
        with pytest.raises(ValueError):
            integrate(spec, spec.state(), dt=0.0, steps=10)
        with pytest.raises(ValueError):
            integrate(spec, spec.state(), dt=0.1, steps=0)


class TestTrajectory:
    def test_validates_lengths_and_monotonicity(self):
        state = PhaseState(0.0, 0.0)
        with pytest.raises(ValueError):
            Trajectory((0.0, 1.0), (state,), (1.0, 1.0))
        with pytest.raises(ValueError):
            Trajectory((0.0, 1.0, 0.5), (state, state, state), (1.0, 1.0, 1.0))

    def test_descending_times_allowed_for_backward_runs(self):
        state = PhaseState(0.0, 0.0)
        Trajectory((0.0, -0.5, -1.0), (state, state, state), (1.0, 1.0, 1.0))


class TestFindEquilibrium:
    def test_matches_closed_form_and_bisection_oracle(self):
        spec = clock_spec(hrel0=0.0)
        result = find_equilibrium(spec)
        assert result.state.R == approx(-1.0, rel=1e-12)
        assert result.state.P == approx(0.0, abs=1e-12)
        assert result.residual < 1e-10

        # independent oracle: bisect the support balance
        # g H_mink / c^2 + alpha X = 0 in X at P = 0
        def balance(x):
            state = PhaseState(x, 0.0)
            return 1.0 * minkowski_cm_hamiltonian(spec, state) / 1.0 + 1.0 * x

        lo, hi = -5.0, 0.0
        assert balance(lo) < 0 < balance(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if balance(mid) > 0:
                hi = mid
            else:
                lo = mid
        assert result.state.R == approx(0.5 * (lo + hi), abs=1e-10)

    def test_internal_energy_shifts_equilibrium(self):
        result = find_equilibrium(clock_spec(hrel0=0.2))
        assert result.closed_form_X == approx(-1.2, rel=1e-12)
        assert result.state.R == approx(-1.2, rel=1e-12)
        assert abs(result.state.R - result.closed_form_X) <= 10.0  # c = 1 budget

    def test_no_gravity_rests_at_minimum(self):
        result = find_equilibrium(clock_spec(g=0.0, hrel0=0.0))
        assert result.state.R == approx(0.0, abs=1e-12)
        assert result.state.P == approx(0.0, abs=1e-12)

    def test_far_initial_guess_converges(self):
        spec = clock_spec(c=2.0)
        result = find_equilibrium(spec, initial=spec.state(R=5.0, P=1.0))
        assert result.state.R == approx(result.closed_form_X, rel=1e-10)

    def test_carried_internal_pairs_settle_at_minimum(self):
        spec = pair_spec(c=2.0)
        initial = spec.state(R=0.0, P=0.0, rel_pos=(0.0, 0.0), rel_mom=(0.0, 0.0))
        result = find_equilibrium(spec, initial=initial)
        assert result.residual < 1e-10
        assert result.state.rel_pos == approx((0.0, 0.0), abs=1e-10)

    def test_no_restoring_support_fails(self):
        spec = HamiltonianSpec(
            masses=(1.0,), g=1.0, c=1.0, internal_energy=ConstantInternal(0.0),
            potential=PotentialSpec(newtonian_part=LinearPotential(0.5)),
        )
        with pytest.raises(ConvergenceError):
            find_equilibrium(spec)

    def test_closed_form_only_for_harmonic_support(self):
        spec = HamiltonianSpec(
            masses=(1.0,), g=1.0, c=2.0, internal_energy=ConstantInternal(0.0),
            potential=PotentialSpec(newtonian_part=PowerLawPotential(0.25, 4)),
        )
        result = find_equilibrium(spec, initial=spec.state(R=-1.0))
        assert result.closed_form_X is None
        assert result.residual < 1e-10


class TestDrift:
    def test_unchanged_schedule_holds_equilibrium(self):
        spec = clock_spec(c=2.0)
        equilibrium = find_equilibrium(spec).state
        trajectory = drift_under_internal_change(
            spec, lambda t: 1.0, equilibrium, horizon=20.0, dt=0.01
        )
        assert max(abs(s.R - equilibrium.R) for s in trajectory.states) < 1e-10

    def test_doubling_internal_energy_shifts_average(self):
        hrel0, c, alpha, g, mass = 0.2, 2.0, 1.0, 1.0, 1.0
        spec = clock_spec(c=c, hrel0=hrel0)
        equilibrium = find_equilibrium(spec).state
        trajectory = drift_under_internal_change(
            spec, step_schedule(2.0, 1.0), equilibrium, horizon=121.0, dt=0.02
        )
        predicted_new = -(mass * g + g * 2.0 * hrel0 / c**2) / alpha
        predicted_shift = -g * hrel0 / (alpha * c**2)
        average = time_average_position(trajectory, 61.0)
        assert abs(average - predicted_new) <= 0.1 * abs(predicted_shift)
        midrange = midrange_position(trajectory, 61.0)
        assert midrange == approx(predicted_new, rel=1e-2)

    def test_shift_suppressed_as_inverse_c_squared(self):
        shifts = {}
        for c in (2.0, 10.0):
            spec = clock_spec(c=c, hrel0=0.2)
            equilibrium = find_equilibrium(spec).state
            trajectory = drift_under_internal_change(
                spec, step_schedule(2.0, 1.0), equilibrium, horizon=101.0, dt=0.02
            )
            shifts[c] = midrange_position(trajectory, 1.0) - equilibrium.R
        ratio = shifts[2.0] / shifts[10.0]
        assert ratio == approx((10.0 / 2.0) ** 2, rel=0.02)

    def test_rejects_bad_arguments(self):
        spec = clock_spec(c=2.0)
        state = spec.state()
        with pytest.raises(ValueError):
            drift_under_internal_change(spec, lambda t: 1.0, state, horizon=-1.0)
        with pytest.raises(ValueError):
            drift_under_internal_change(spec, lambda t: 1.0, state, horizon=1.0, dt=0.0)
