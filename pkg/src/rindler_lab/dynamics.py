"""Hamilton's equations, implicit-midpoint integration, equilibria, and the
drift-under-internal-change experiment.

The energy functions couple position and momentum non-separably (momentum
enters the position coupling and vice versa), so the integrator of choice is
the implicit midpoint rule: it is symplectic and time-reversible for general
smooth Hamiltonians, giving bounded, non-secular energy error. Each step
solves the midpoint fixed point by direct iteration warmed with an explicit
Euler predictor.

Note on validity: the accelerated-frame energy functions lose meaning for
states at or below the horizon R <= -c^2/g, where the kinetic coefficient
changes sign and equilibria become unstable. Dynamic experiments should be
run with parameters that keep the trajectory above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import forms
from .errors import ConvergenceError
from .hamiltonian import (
    HamiltonianSpec,
    PhaseState,
    _bracket_value,
    _bracket_value_small,
    _expanded_value,
    internal_hamiltonian,
)
from .numdiff import central_derivative

HAMILTONIAN_FORMS = ("expanded", "bracket")


@dataclass(frozen=True)
class Trajectory:
    """Time grid, states and total energies recorded along an integration.

    Times are strictly monotone (increasing for dt > 0, decreasing for the
    backward runs used in reversibility checks).
    """

    times: tuple[float, ...]
    states: tuple[PhaseState, ...]
    energies: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.states) == len(self.energies)):
            raise ValueError("times, states and energies must have equal length")
        diffs = np.diff(self.times)
        if diffs.size and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("times must be strictly monotone")

    def cm_positions(self) -> np.ndarray:
        return np.array([s.R for s in self.states])

    def cm_momenta(self) -> np.ndarray:
        return np.array([s.P for s in self.states])


@dataclass(frozen=True)
class EquilibriumResult:
    """Stationary state, the residual max-norm of Hamilton's right-hand side
    there, and the closed-form position when the support is harmonic."""

    state: PhaseState
    residual: float
    closed_form_X: float | None = None


def _check_form(form: str) -> None:
    if form not in HAMILTONIAN_FORMS:
        raise ValueError(f"unknown Hamiltonian form {form!r}; choose from {HAMILTONIAN_FORMS}")


def _pack(state: PhaseState) -> np.ndarray:
    n = state.n_internal
    z = np.empty(2 + 2 * n)
    z[0] = state.R
    z[1] = state.P
    if n:
        z[2 : 2 + n] = state.rel_pos
        z[2 + n :] = state.rel_mom
    return z


def _unpack(z: np.ndarray, n: int) -> PhaseState:
    return PhaseState(
        float(z[0]),
        float(z[1]),
        tuple(float(v) for v in z[2 : 2 + n]),
        tuple(float(v) for v in z[2 + n :]),
    )


def hamiltonian_value(
    spec: HamiltonianSpec, state: PhaseState, form: str = "expanded", internal_scale: float = 1.0
) -> float:
    """Total energy in the requested form, with the internal energy optionally
    rescaled (used by time-dependent schedules)."""
    _check_form(form)
    hrel = internal_scale * internal_hamiltonian(spec, state)
    if form == "expanded":
        return _expanded_value(spec, state, hrel, True)
    return _bracket_value(spec, state, hrel)


def _analytic_pieces(spec: HamiltonianSpec):
    """Gradient callables when every model piece has analytic derivatives, else None."""
    internal_grad = getattr(spec.internal_energy, "gradient", None)
    if internal_grad is None:
        return None
    pot = spec.potential
    if pot.per_particle_form is not None and not pot.has_split:
        return None
    u0 = pot.newtonian_part
    if u0 is not None and not hasattr(u0, "derivative"):
        return None
    u1 = pot.correction_part
    if u1 is not None and not hasattr(u1, "gradient"):
        return None
    return internal_grad, u0, u1


def _rhs_factory(
    spec: HamiltonianSpec,
    n: int,
    form: str,
    schedule: Callable[[float], float] | None = None,
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Build f(t, z) with z = (R, P, rho_1..rho_n, pi_1..pi_n) and

        f = (dH/dP, -dH/dR, dH/dpi_j, -dH/drho_j).

    Analytic gradients are composed whenever all model pieces provide them;
    otherwise the whole energy is differenced centrally per component.
    """
    _check_form(form)
    M, g, c = spec.total_mass, spec.g, spec.c
    c2 = c * c
    pieces = _analytic_pieces(spec)

    if pieces is not None:
        internal_grad, u0, u1 = pieces
        internal = spec.internal_energy

        empty = np.zeros(0)

        def rhs(t: float, z: np.ndarray) -> np.ndarray:
            scale = schedule(t) if schedule is not None else 1.0
            R, P = float(z[0]), float(z[1])
            rho = z[2 : 2 + n]
            pi = z[2 + n :]
            hrel = scale * float(internal(rho, pi))
            grad_rho, grad_pi = internal_grad(rho, pi) if n else (empty, empty)
            u0_slope = float(u0.derivative(R)) if u0 is not None else 0.0
            if u1 is not None:
                u1_R, u1_P, u1_rho, u1_pi = u1.gradient(R, P, rho, pi)
            else:
                u1_R = u1_P = 0.0
                u1_rho = u1_pi = 0.0

            if form == "expanded":
                dH_dP = (
                    P / M
                    - P**3 / (2.0 * M**3 * c2)
                    + g * R * P / (M * c2)
                    - P * hrel / (M * M * c2)
                    + u1_P / c2
                )
                dH_dR = M * g + g * P * P / (2.0 * M * c2) + g * hrel / c2 + u0_slope + u1_R / c2
                coupling = 1.0 - P * P / (2.0 * M * M * c2) + g * R / c2
                dH_drho = coupling * scale * grad_rho + np.asarray(u1_rho) / c2
                dH_dpi = coupling * scale * grad_pi + np.asarray(u1_pi) / c2
            else:
                energy = M * c2 + hrel
                h_mink = math.hypot(P * c, energy)
                kappa = 1.0 + g * R / c2
                dH_dP = P * c2 / h_mink * kappa + u1_P / c2
                dH_dR = h_mink * g / c2 + u0_slope + u1_R / c2
                factor = energy / h_mink * kappa
                dH_drho = factor * scale * grad_rho + np.asarray(u1_rho) / c2
                dH_dpi = factor * scale * grad_pi + np.asarray(u1_pi) / c2

            out = np.empty(2 + 2 * n)
            out[0] = dH_dP
            out[1] = -dH_dR
            if n:
                out[2 : 2 + n] = dH_dpi
                out[2 + n :] = -dH_drho
            return out

        return rhs

    # Differencing the rest-energy-free value keeps the rounding jitter of the
    # gradients small enough for the implicit solver; the step is widened to
    # eps^(1/5) for the same reason (jitter, not smooth bias, stalls the
    # fixed-point iteration).
    fd_step = np.finfo(float).eps ** 0.2

    def rhs_numeric(t: float, z: np.ndarray) -> np.ndarray:
        scale = schedule(t) if schedule is not None else 1.0

        def energy_at(vec: np.ndarray) -> float:
            state = _unpack(vec, n)
            hrel = scale * internal_hamiltonian(spec, state)
            if form == "expanded":
                return _expanded_value(spec, state, hrel, False)
            return _bracket_value_small(spec, state, hrel)

        grad = np.empty(2 + 2 * n)
        for k in range(2 + 2 * n):
            def component(v: float, k: int = k) -> float:
                probe = z.copy()
                probe[k] = v
                return energy_at(probe)

            grad[k] = central_derivative(
                component, float(z[k]), 1, step=fd_step * max(1.0, abs(float(z[k])))
            )
        out = np.empty_like(grad)
        out[0] = grad[1]
        out[1] = -grad[0]
        if n:
            out[2 : 2 + n] = grad[2 + n :]
            out[2 + n :] = -grad[2 : 2 + n]
        return out

    return rhs_numeric


def _scalar_clock_rhs(
    spec: HamiltonianSpec, form: str, schedule: Callable[[float], float] | None
):
    """Plain-float f(t, R, P) -> (dR/dt, dP/dt) for states without internal
    pairs; the integrator hot path. None when analytic gradients are missing
    or a momentum correction is present."""
    pieces = _analytic_pieces(spec)
    if pieces is None:
        return None
    internal_grad, u0, u1 = pieces
    if u1 is not None:
        return None
    internal = spec.internal_energy
    M, g, c = spec.total_mass, spec.g, spec.c
    c2 = c * c
    empty = np.zeros(0)

    if form == "expanded":
        def f(t: float, R: float, P: float) -> tuple[float, float]:
            scale = schedule(t) if schedule is not None else 1.0
            hrel = scale * float(internal(empty, empty))
            u0_slope = float(u0.derivative(R)) if u0 is not None else 0.0
            dH_dP = (
                P / M
                - P**3 / (2.0 * M**3 * c2)
                + g * R * P / (M * c2)
                - P * hrel / (M * M * c2)
            )
            dH_dR = M * g + g * P * P / (2.0 * M * c2) + g * hrel / c2 + u0_slope
            return dH_dP, -dH_dR
    else:
        def f(t: float, R: float, P: float) -> tuple[float, float]:
            scale = schedule(t) if schedule is not None else 1.0
            hrel = scale * float(internal(empty, empty))
            u0_slope = float(u0.derivative(R)) if u0 is not None else 0.0
            energy = M * c2 + hrel
            h_mink = math.hypot(P * c, energy)
            dH_dP = P * c2 / h_mink * (1.0 + g * R / c2)
            dH_dR = h_mink * g / c2 + u0_slope
            return dH_dP, -dH_dR

    return f


def hamilton_rhs(spec: HamiltonianSpec, state: PhaseState, form: str = "expanded") -> PhaseState:
    """Hamilton's right-hand side (dR/dt, dP/dt, drho/dt, dpi/dt) at a state,
    returned in PhaseState shape."""
    rhs = _rhs_factory(spec, state.n_internal, form)
    return _unpack(rhs(0.0, _pack(state)), state.n_internal)


def integrate(
    spec: HamiltonianSpec,
    state0: PhaseState,
    dt: float,
    steps: int,
    form: str = "expanded",
    schedule: Callable[[float], float] | None = None,
    fixed_point_tol: float = 1e-13,
    max_fixed_point_iterations: int = 50,
) -> Trajectory:
    """Integrate with the implicit midpoint rule, recording energy per step.

    Each step solves z1 = z0 + dt f((z0+z1)/2, t + dt/2) by direct fixed-point
    iteration to ``fixed_point_tol`` in max norm (tighter than the 1e-12
    contract) and raises ConvergenceError with the failing step index
    otherwise. A negative dt integrates backward, which is how reversibility
    is exercised. ``schedule`` rescales the internal energy as a function of
    time.
    """
    if dt == 0.0 or not math.isfinite(dt):
        raise ValueError(f"time step must be nonzero and finite, got {dt}")
    if steps < 1:
        raise ValueError(f"step count must be >= 1, got {steps}")
    _check_form(form)
    n = state0.n_internal
    if n == 0:
        scalar_rhs = _scalar_clock_rhs(spec, form, schedule)
        if scalar_rhs is not None:
            return _integrate_clock(
                spec,
                state0,
                dt,
                steps,
                form,
                schedule,
                fixed_point_tol,
                max_fixed_point_iterations,
                scalar_rhs,
            )
    rhs = _rhs_factory(spec, n, form, schedule)

    def energy(t: float, state: PhaseState) -> float:
        scale = schedule(t) if schedule is not None else 1.0
        return hamiltonian_value(spec, state, form, scale)

    z = _pack(state0)
    times = [0.0]
    states = [state0]
    energies = [energy(0.0, state0)]
    t = 0.0
    for step in range(steps):
        t_mid = t + 0.5 * dt
        y = z + dt * rhs(t, z)  # explicit Euler predictor
        converged = False
        delta = math.inf
        for _ in range(max_fixed_point_iterations):
            y_next = z + dt * rhs(t_mid, 0.5 * (z + y))
            delta = float(np.max(np.abs(y_next - y)))
            y = y_next
            if delta <= fixed_point_tol:
                converged = True
                break
            if not math.isfinite(delta):
                break
        if not converged:
            raise ConvergenceError(
                f"implicit midpoint fixed point did not reach {fixed_point_tol} "
                f"within {max_fixed_point_iterations} iterations at step {step} "
                f"(last update {delta:.3e}); reduce dt"
            )
        z = y
        t = (step + 1) * dt
        state = _unpack(z, n)
        times.append(t)
        states.append(state)
        energies.append(energy(t, state))
    return Trajectory(tuple(times), tuple(states), tuple(energies))


def _integrate_clock(
    spec, state0, dt, steps, form, schedule, tol, max_iterations, rhs
) -> Trajectory:
    """Implicit-midpoint loop specialized to (R, P) states, same scheme as the
    general path but in plain float arithmetic."""

    def energy(t: float, R: float, P: float) -> float:
        scale = schedule(t) if schedule is not None else 1.0
        return hamiltonian_value(spec, PhaseState(R, P), form, scale)

    R, P = state0.R, state0.P
    times = [0.0]
    states = [state0]
    energies = [energy(0.0, R, P)]
    t = 0.0
    for step in range(steps):
        t_mid = t + 0.5 * dt
        converged = False
        delta = math.inf
        try:
            f_R, f_P = rhs(t, R, P)
            y_R, y_P = R + dt * f_R, P + dt * f_P
            for _ in range(max_iterations):
                f_R, f_P = rhs(t_mid, 0.5 * (R + y_R), 0.5 * (P + y_P))
                next_R, next_P = R + dt * f_R, P + dt * f_P
                delta = max(abs(next_R - y_R), abs(next_P - y_P))
                y_R, y_P = next_R, next_P
                if delta <= tol:
                    converged = True
                    break
                if not math.isfinite(delta):
                    break
        except OverflowError:
            pass  # diverging iterates; reported below
        if not converged:
            raise ConvergenceError(
                f"implicit midpoint fixed point did not reach {tol} within "
                f"{max_iterations} iterations at step {step} (last update "
                f"{delta:.3e}); reduce dt"
            )
        R, P = y_R, y_P
        t = (step + 1) * dt
        times.append(t)
        states.append(PhaseState(R, P))
        energies.append(energy(t, R, P))
    return Trajectory(tuple(times), tuple(states), tuple(energies))


def find_equilibrium(
    spec: HamiltonianSpec,
    form: str = "expanded",
    initial: PhaseState | None = None,
    tol: float = 1e-12,
    max_iterations: int = 100,
) -> EquilibriumResult:
    """Newton iteration on the stationarity conditions dH/dP = 0, dH/dR = 0
    (and the internal gradients when internal pairs are carried).

    By default the search runs in the reduced description (no internal pairs)
    with internal coordinates pinned at their minimum; pass ``initial`` to
    include them. For a harmonic support U0 = alpha X^2/2 the result also
    carries the order-1/c^2 closed form X = -(M g + g H_int/c^2)/alpha.
    """
    _check_form(form)
    state = initial if initial is not None else spec.state()
    n = state.n_internal
    support = spec.potential.newtonian_part
    harmonic = isinstance(support, forms.HarmonicSupport) and support.alpha > 0.0

    z = _pack(state)
    if initial is None and harmonic:
        hrel0 = internal_hamiltonian(spec, state)
        z[0] = -(spec.total_mass * spec.g + spec.g * hrel0 / spec.c**2) / support.alpha

    rhs = _rhs_factory(spec, n, form)
    dim = 2 + 2 * n
    history: list[float] = []
    residual_vec = rhs(0.0, z)
    for _ in range(max_iterations):
        residual = float(np.max(np.abs(residual_vec)))
        history.append(residual)
        if residual <= tol:
            break
        jac = np.empty((dim, dim))
        for k in range(dim):
            h = 1e-6 * max(1.0, abs(float(z[k])))
            zp = z.copy()
            zm = z.copy()
            zp[k] += h
            zm[k] -= h
            jac[:, k] = (rhs(0.0, zp) - rhs(0.0, zm)) / (2.0 * h)
        try:
            delta = np.linalg.solve(jac, -residual_vec)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular Jacobian in equilibrium search (no restoring direction?); "
                f"residual history {history}"
            ) from exc
        z = z + delta
        residual_vec = rhs(0.0, z)
    else:
        raise ConvergenceError(
            f"equilibrium search did not reach residual {tol} in {max_iterations} "
            f"Newton steps; residual history {history}"
        )

    solution = _unpack(z, n)
    closed_form = None
    if harmonic:
        hrel = internal_hamiltonian(spec, solution)
        closed_form = -(spec.total_mass * spec.g + spec.g * hrel / spec.c**2) / support.alpha
    residual = float(np.max(np.abs(rhs(0.0, _pack(solution)))))
    return EquilibriumResult(state=solution, residual=residual, closed_form_X=closed_form)


def step_schedule(factor: float, at_time: float) -> Callable[[float], float]:
    """Internal-energy schedule jumping from 1 to ``factor`` at ``at_time``."""

    def schedule(t: float) -> float:
        return factor if t >= at_time else 1.0

    return schedule


def drift_under_internal_change(
    spec: HamiltonianSpec,
    schedule: Callable[[float], float],
    state0: PhaseState,
    horizon: float,
    dt: float = 0.01,
    form: str = "expanded",
) -> Trajectory:
    """Integrate from an equilibrium while the internal energy follows
    ``schedule(t)``; a change of internal energy shifts the equilibrium and
    sets the center of mass moving around the new one."""
    if horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got {dt}")
    steps = max(1, math.ceil(horizon / dt))
    return integrate(spec, state0, dt, steps, form=form, schedule=schedule)


def time_average_position(trajectory: Trajectory, t_from: float) -> float:
    """Mean c.m. position over samples with t >= t_from."""
    values = [s.R for t, s in zip(trajectory.times, trajectory.states) if t >= t_from]
    if not values:
        raise ValueError(f"no trajectory samples at or after t={t_from}")
    return math.fsum(values) / len(values)


def midrange_position(trajectory: Trajectory, t_from: float) -> float:
    """Midpoint of the extreme c.m. positions over samples with t >= t_from.

    For motion in an effectively quadratic potential the turning points are
    symmetric about the equilibrium, so the midrange estimates it without the
    O(amplitude) windowing error of a plain time average.
    """
    values = [s.R for t, s in zip(trajectory.times, trajectory.states) if t >= t_from]
    if not values:
        raise ValueError(f"no trajectory samples at or after t={t_from}")
    return 0.5 * (max(values) + min(values))
