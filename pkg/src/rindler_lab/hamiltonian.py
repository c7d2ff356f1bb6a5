"""Composite-system Hamiltonian at order 1/c^2 in an accelerated frame.

A composite system of total rest mass M is described by its center-of-mass
pair (R, P) and internal relative pairs (rho_j, pi_j). Two equivalent energy
functions are implemented:

* the product form ``H_mink * (1 + g R/c^2) + U_ext`` built from the exact
  free center-of-mass energy ``H_mink = sqrt(P^2 c^2 + (M c^2 + H_int)^2)``,
  and
* its expansion through order 1/c^2,

      H_cm + (1 - P^2/(2 M^2 c^2) + g R/c^2) H_int + U_ext,

  whose distinctive piece is the redshift-type coupling g R H_int / c^2
  between the vertical position and the internal energy.

The two agree exactly for P = 0 states and differ by O(1/c^4) otherwise,
which ``check_expansion_consistency`` verifies by sweeping c.

External potentials are handled either as an explicit split
``U0(R) + U1(R, P, rho, pi)/c^2`` or as a per-particle form ``U(x_j, p_j)``
that ``split_external_potential`` reduces to that shape using the order-1/c^2
coordinate relations x_j = R + rho_j + chi_j/c^2 and p_j = (m_j/M) P + pi_j.
The chi_j correction functions are injection points supplied by the caller
(default zero); the corresponding momentum corrections are dropped because
they would only enter at order 1/c^4 here.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, EvaluationError, PreconditionError
from .numdiff import central_derivative


@dataclass(frozen=True)
class PhaseState:
    """A phase-space point: c.m. pair (R, P) plus relative pairs (rho_j, pi_j).

    R is the vertical c.m. coordinate. Relative coordinates may be empty (the
    reduced description of a structureless clock) or carry one pair per
    particle, in which case the canonical constraints sum_j m_j rho_j = 0 and
    sum_j pi_j = 0 are expected; HamiltonianSpec.state enforces them.
    """

    R: float
    P: float
    rel_pos: tuple[float, ...] = ()
    rel_mom: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "P", float(self.P))
        object.__setattr__(self, "rel_pos", tuple(float(v) for v in self.rel_pos))
        object.__setattr__(self, "rel_mom", tuple(float(v) for v in self.rel_mom))
        if len(self.rel_pos) != len(self.rel_mom):
            raise ValueError(
                f"rel_pos and rel_mom must have equal length, got "
                f"{len(self.rel_pos)} and {len(self.rel_mom)}"
            )

    @property
    def n_internal(self) -> int:
        return len(self.rel_pos)


@dataclass(frozen=True)
class PotentialSpec:
    """External supporting potential.

    Provide either the explicit split (``newtonian_part`` U0(R) plus optional
    ``correction_part`` U1(R, P, rho, pi), applied with a 1/c^2 factor) or a
    ``per_particle_form`` U(x_j, p_j) with optional relativistic coordinate
    hooks ``chi`` mapping (P, rho, pi) to per-particle shifts chi_j. All
    fields None means no external potential.
    """

    newtonian_part: Callable[[float], float] | None = None
    correction_part: Callable[[float, float, np.ndarray, np.ndarray], float] | None = None
    per_particle_form: Callable[[float, float], float] | None = None
    chi: Callable[[float, np.ndarray, np.ndarray], Sequence[float]] | None = None

    def __post_init__(self) -> None:
        if self.chi is not None and self.per_particle_form is None:
            raise ValueError("chi hooks are only meaningful with a per_particle_form")

    @property
    def has_split(self) -> bool:
        return self.newtonian_part is not None or self.correction_part is not None


FREE_POTENTIAL = PotentialSpec()


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """Masses, couplings, internal energy function and external potential.

    ``internal_energy`` maps (rho, pi) arrays to the internal energy H_int;
    built-in forms live in :mod:`rindler_lab.forms`.
    """

    masses: tuple[float, ...]
    g: float
    c: float
    internal_energy: Callable
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self) -> None:
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        if not self.masses or any(m <= 0.0 for m in self.masses):
            raise ValueError("masses must be a non-empty sequence of positive values")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"light speed must be positive, got {self.c}")
        if not math.isfinite(self.g):
            raise ValueError(f"acceleration must be finite, got {self.g}")

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    @property
    def rest_energy(self) -> float:
        return self.total_mass * self.c**2

    def state(self, R: float = 0.0, P: float = 0.0, rel_pos=(), rel_mom=()) -> PhaseState:
        """Build a PhaseState with the canonical constraint modes projected out.

        The given relative coordinates are shifted so that sum_j m_j rho_j = 0
        and sum_j pi_j = 0 hold to machine precision. Relative coordinates
        must come one pair per particle, or be omitted entirely.
        """
        rel_pos = tuple(float(v) for v in rel_pos)
        rel_mom = tuple(float(v) for v in rel_mom)
        if not rel_pos and not rel_mom:
            return PhaseState(R, P)
        if len(rel_pos) != len(self.masses) or len(rel_mom) != len(self.masses):
            raise ValueError(
                f"expected one relative pair per particle "
                f"({len(self.masses)}), got {len(rel_pos)}/{len(rel_mom)}"
            )
        m = np.asarray(self.masses, dtype=float)
        total = self.total_mass
        rho = np.asarray(rel_pos, dtype=float)
        pi = np.asarray(rel_mom, dtype=float)
        rho = rho - float(np.dot(m, rho)) / total
        pi = pi - (m / total) * float(np.sum(pi))
        return PhaseState(R, P, tuple(rho), tuple(pi))


def _internal_arrays(state: PhaseState) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.asarray(state.rel_pos, dtype=float),
        np.asarray(state.rel_mom, dtype=float),
    )


def internal_hamiltonian(spec: HamiltonianSpec, state: PhaseState) -> float:
    """Internal energy H_int(rho, pi) from the user-supplied function."""
    rho, pi = _internal_arrays(state)
    value = float(spec.internal_energy(rho, pi))
    if not math.isfinite(value):
        raise EvaluationError(f"internal energy is not finite at {state!r}: {value}")
    return value


def split_external_potential(spec: HamiltonianSpec):
    """Reduce a per-particle potential to the split (U0(R), U1(R, P, rho, pi)).

    U0 keeps the momentum-independent part evaluated at the c.m. (the
    potential is treated as constant over the system's extent), repeated once
    per particle. U1 collects, per particle, the explicit momentum dependence
    of the relativistic part, c^2 (U(R, p_j) - U(R, 0)) with
    p_j = (m_j/M) P + pi_j, plus the coordinate-correction gradient term
    V'(R) chi_j. The full potential at a state is U0(R) + U1(...)/c^2.
    """
    pot = spec.potential
    if pot.per_particle_form is None:
        raise ConfigError("split_external_potential requires a per-particle potential form")
    u = pot.per_particle_form
    chi_fn = pot.chi
    masses = np.asarray(spec.masses, dtype=float)
    n_particles = masses.size
    total = spec.total_mass
    c2 = spec.c**2

    def position_part(x: float) -> float:
        return float(u(x, 0.0))

    def u0(R: float) -> float:
        return n_particles * position_part(R)

    def u1(R: float, P: float, rel_pos, rel_mom) -> float:
        rho = np.asarray(rel_pos, dtype=float)
        pi = np.asarray(rel_mom, dtype=float)
        if rho.size == 0:
            # reduced description: internal coordinates frozen at zero
            rho = np.zeros(n_particles)
            pi = np.zeros(n_particles)
        elif rho.size != n_particles:
            raise ValueError(
                f"expected {n_particles} relative pairs, got {rho.size}"
            )
        base = position_part(R)
        momenta = masses / total * P + pi
        momentum_term = math.fsum(c2 * (float(u(R, p)) - base) for p in momenta)
        if chi_fn is None:
            return momentum_term
        chis = np.asarray(chi_fn(P, rho, pi), dtype=float)
        if chis.size != n_particles:
            raise ValueError(
                f"chi hook returned {chis.size} values for {n_particles} particles"
            )
        slope = central_derivative(position_part, R, 1)
        return momentum_term + slope * math.fsum(chis)

    return u0, u1


def external_potential(spec: HamiltonianSpec, state: PhaseState) -> float:
    """U_ext at this state: U0(R) + U1(R, P, rho, pi)/c^2.

    Uses the explicit split when provided, otherwise the per-particle
    reduction; zero when the spec carries no potential.
    """
    pot = spec.potential
    rho, pi = _internal_arrays(state)
    if pot.has_split:
        value = float(pot.newtonian_part(state.R)) if pot.newtonian_part is not None else 0.0
        if pot.correction_part is not None:
            value += float(pot.correction_part(state.R, state.P, rho, pi)) / spec.c**2
        return value
    if pot.per_particle_form is not None:
        u0, u1 = split_external_potential(spec)
        return u0(state.R) + u1(state.R, state.P, rho, pi) / spec.c**2
    return 0.0


def potential_split_residual(spec: HamiltonianSpec, states) -> float:
    """Max disagreement between the explicit split and the per-particle
    reduction over the given states; both forms must be present."""
    pot = spec.potential
    if not pot.has_split or pot.per_particle_form is None:
        raise ConfigError("residual check needs both the split and the per-particle form")
    u0, u1 = split_external_potential(spec)
    worst = 0.0
    for state in states:
        rho, pi = _internal_arrays(state)
        explicit = float(pot.newtonian_part(state.R)) if pot.newtonian_part else 0.0
        if pot.correction_part is not None:
            explicit += float(pot.correction_part(state.R, state.P, rho, pi)) / spec.c**2
        derived = u0(state.R) + u1(state.R, state.P, rho, pi) / spec.c**2
        worst = max(worst, abs(explicit - derived))
    return worst


def constant_volume_residual(spec: HamiltonianSpec, state: PhaseState) -> float:
    """Magnitude of the neglected rho-dependence of U0: the difference between
    evaluating the position part at each particle and at the c.m. only."""
    pot = spec.potential
    if pot.per_particle_form is None:
        raise ConfigError("residual estimator needs a per-particle potential form")
    u = pot.per_particle_form
    rho, _ = _internal_arrays(state)
    if rho.size == 0:
        rho = np.zeros(len(spec.masses))
    at_particles = math.fsum(float(u(state.R + r, 0.0)) for r in rho)
    at_cm = len(spec.masses) * float(u(state.R, 0.0))
    return abs(at_particles - at_cm)


def minkowski_cm_hamiltonian(spec: HamiltonianSpec, state: PhaseState) -> float:
    """Free c.m. energy sqrt(P^2 c^2 + (M c^2 + H_int)^2), rest mass folded in."""
    hrel = internal_hamiltonian(spec, state)
    return math.hypot(state.P * spec.c, spec.rest_energy + hrel)


def _bracket_value(spec: HamiltonianSpec, state: PhaseState, hrel: float) -> float:
    energy = spec.rest_energy + hrel
    h_mink = math.hypot(state.P * spec.c, energy)
    return h_mink * (1.0 + spec.g * state.R / spec.c**2) + external_potential(spec, state)


def _bracket_value_small(spec: HamiltonianSpec, state: PhaseState, hrel: float) -> float:
    """Product-form energy minus the constant M c^2, evaluated without the
    large-scale cancellation (sqrt(P^2 c^2 + E^2) - M c^2 is O(1) at desk
    scale). Same gradients as the full value; used for finite differencing."""
    energy = spec.rest_energy + hrel
    h_mink = math.hypot(state.P * spec.c, energy)
    above_rest = (state.P * spec.c) ** 2 / (h_mink + energy) + hrel
    c2 = spec.c**2
    return (
        above_rest * (1.0 + spec.g * state.R / c2)
        + spec.total_mass * spec.g * state.R
        + external_potential(spec, state)
    )


def rindler_hamiltonian_bracket(spec: HamiltonianSpec, state: PhaseState) -> float:
    """Product-form energy in the accelerated frame,

        H_mink (1 + g R/c^2) + U_ext,

    where the position-coupling term arises from the symmetrized bracket
    correction (g/2c^2){R, H_mink} evaluated classically.
    """
    value = _bracket_value(spec, state, internal_hamiltonian(spec, state))
    if not math.isfinite(value):
        raise EvaluationError(f"Hamiltonian is not finite at {state!r}")
    return value


def _cm_energy_expanded(
    M: float, g: float, c: float, R: float, P: float, include_rest: bool
) -> float:
    c2 = c * c
    value = (
        P * P / (2.0 * M)
        - P**4 / (8.0 * M**3 * c2)
        + M * g * R
        + g * R * P * P / (2.0 * M * c2)
    )
    if include_rest:
        value += M * c2
    return value


def _expanded_value(
    spec: HamiltonianSpec, state: PhaseState, hrel: float, include_rest: bool
) -> float:
    M, g, c2 = spec.total_mass, spec.g, spec.c**2
    coupling = 1.0 - state.P * state.P / (2.0 * M * M * c2) + g * state.R / c2
    return (
        _cm_energy_expanded(M, g, spec.c, state.R, state.P, include_rest)
        + coupling * hrel
        + external_potential(spec, state)
    )


def total_hamiltonian_expanded(
    spec: HamiltonianSpec, state: PhaseState, include_rest_energy: bool = True
) -> float:
    """Energy through order 1/c^2,

        H_cm + (1 - P^2/(2 M^2 c^2) + g R/c^2) H_int + U_ext,

    with H_cm = M c^2 + P^2/2M - P^4/(8 M^3 c^2) + M g R + g R P^2/(2 M c^2).
    For a system at rest in its observer's frame (R = 0, P = 0) this reduces
    exactly to H_int + U_ext (plus the rest energy unless
    ``include_rest_energy`` is False).
    """
    value = _expanded_value(spec, state, internal_hamiltonian(spec, state), include_rest_energy)
    if not math.isfinite(value):
        raise EvaluationError(f"Hamiltonian is not finite at {state!r}")
    return value


@dataclass(frozen=True)
class ExpansionReport:
    """Outcome of the product-vs-expanded consistency sweep."""

    c_values: tuple[float, ...]
    differences: tuple[float, ...]
    fitted_exponent: float
    passed: bool


def check_expansion_consistency(
    spec: HamiltonianSpec, state: PhaseState, c_values=(10.0, 20.0, 40.0)
) -> ExpansionReport:
    """Sweep the light speed and fit the decay of |expanded - product|.

    The two energies agree through order 1/c^2, so the difference must fall
    like c^-4; the report passes when the fitted exponent is <= -3.8. States
    with P = 0 cancel algebraically at every c, leaving only rounding noise;
    differences below the round-off floor of the energy scale count as exact
    agreement (exponent -inf). Only ``spec.c`` is swept; the potential must
    not embed its own light speed.
    """
    if len(c_values) < 2:
        raise ValueError("need at least two c values to fit a decay exponent")
    eps = np.finfo(float).eps
    points = []
    for c in c_values:
        spec_c = dataclasses.replace(spec, c=float(c))
        expanded = total_hamiltonian_expanded(spec_c, state)
        bracket = rindler_hamiltonian_bracket(spec_c, state)
        difference = abs(expanded - bracket)
        floor = 32.0 * eps * max(abs(expanded), abs(bracket))
        points.append((float(c), difference, difference > floor))
    diffs = tuple(d for _, d, _ in points)
    resolved = [(c, d) for c, d, above in points if above]
    if not resolved:
        return ExpansionReport(tuple(float(c) for c in c_values), diffs, -math.inf, True)
    if len(resolved) < 2:
        raise EvaluationError(
            f"degenerate sweep: differences {diffs} leave fewer than two points "
            f"above the round-off floor, no exponent can be fitted"
        )
    cs, ds = zip(*resolved)
    slope = float(np.polyfit(np.log(cs), np.log(ds), 1)[0])
    return ExpansionReport(
        tuple(float(c) for c in c_values), diffs, slope, slope <= -3.8
    )


def taylor_potential_coefficients(spec: HamiltonianSpec, k: int):
    """Derivative coefficients of U_ext in the c.m. position at R = 0.

    Returns functions U_j(rel_pos, rel_mom, P) for j = 0..k estimating
    d^j U_ext / dR^j |_{R=0} by central differences (Richardson-extrapolated,
    step eps^(1/(j+2))). The coefficients may retain internal-coordinate and
    momentum dependence. Non-smooth potentials raise DifferentiationError at
    evaluation time.
    """
    if k < 0:
        raise ValueError(f"expansion order must be >= 0, got {k}")

    def make(order: int):
        def coefficient(rel_pos=(), rel_mom=(), P: float = 0.0) -> float:
            def profile(x: float) -> float:
                return external_potential(spec, PhaseState(x, P, rel_pos, rel_mom))

            return central_derivative(profile, 0.0, order)

        return coefficient

    return [make(j) for j in range(k + 1)]


def clock_rest_hamiltonian(
    spec: HamiltonianSpec, state: PhaseState, allow_momentum: bool = False
) -> float:
    """Energy of a clock held by its observer (R = 0, P = 0): H_int + U0.

    U0 is the zeroth Taylor coefficient of the external potential at R = 0,
    which may still depend on the internal coordinates. The rest-mass offset
    is excluded, as appropriate for clock-rate comparisons. A constant held
    momentum is tolerated with ``allow_momentum=True``; it does not change
    the structure of the result.
    """
    if state.R != 0.0:
        raise PreconditionError(f"clock must sit at its observer's origin, got R={state.R}")
    if state.P != 0.0 and not allow_momentum:
        raise PreconditionError(
            f"clock must be at rest (P=0), got P={state.P}; pass allow_momentum=True "
            f"for the constant-momentum variant"
        )
    u0 = taylor_potential_coefficients(spec, 0)[0](state.rel_pos, state.rel_mom, state.P)
    return internal_hamiltonian(spec, state) + u0
