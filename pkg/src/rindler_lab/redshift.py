"""Photon exchange between two stationary clocks: the full emission/absorption
experiment and the first-order time-dilation comparison.

Setup, described in the inertial frame momentarily at rest with everything at
t = 0: the upper clock sits at x = b and emits a photon of energy E downward;
the lower clock accelerates upward from x = 0 with proper acceleration g,
following X(T) = (c^2/g)(sqrt(1 + (gT/c)^2) - 1). The photon travels the null
line x = b - cT with conserved four-momentum. At absorption the detector
moves with four-velocity v(tau) and measures

    E_measured = -eta(p, v(tau)) = E exp(g tau/c),

which to first order in g b/c^2 is the familiar (1 + g b/c^2) E. Both the
exact and the first-order values are reported; the first-order factor is also
what a naive comparison of the two clocks' proper-time rates gives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .frames import (
    FourVector,
    FrameSpec,
    MinkowskiEvent,
    minkowski_inner,
    observer_four_velocity,
    proper_time_rate,
)


@dataclass(frozen=True)
class RedshiftResult:
    """Absorption event, detector proper time there, and the measured vs
    first-order photon energies. ``doppler_factor`` is measured/emitted and
    exceeds 1 for b > 0 (the photon falls toward the accelerating detector)."""

    absorption_event: MinkowskiEvent
    detector_proper_time: float
    measured_energy: float
    first_order_energy: float
    doppler_factor: float


def photon_four_momentum(energy: float, direction: int, c: float) -> FourVector:
    """Null four-momentum (E/c, +-E/c) of a photon of energy E moving up (+1)
    or down (-1)."""
    if not (energy > 0.0 and math.isfinite(energy)):
        raise DomainError(f"photon energy must be positive, got {energy}")
    if direction not in (-1, 1):
        raise DomainError(f"direction must be +1 or -1, got {direction}")
    if not (c > 0.0 and math.isfinite(c)):
        raise DomainError(f"light speed must be positive, got {c}")
    return FourVector(t=energy / c, x=direction * energy / c)


def measured_energy(photon: FourVector, observer_velocity: FourVector) -> float:
    """Photon energy -eta(p, v) seen by an observer with four-velocity v.

    v must be timelike (its self-contraction is -c^2 and carries the factor
    of c), so the result has energy units.
    """
    if minkowski_inner(observer_velocity, observer_velocity) >= 0.0:
        raise DomainError(f"observer four-velocity must be timelike, got {observer_velocity}")
    return -minkowski_inner(photon, observer_velocity)


def detector_position(g: float, c: float, T: float) -> float:
    """Worldline X(T) = (c^2/g)(sqrt(1 + (gT/c)^2) - 1) of a detector
    accelerating from rest at the origin."""
    s = g * T / c
    # sqrt(1+s^2)-1 written without cancellation for small s
    return (c * c / g) * (s * s / (math.sqrt(1.0 + s * s) + 1.0))


def run_redshift_experiment(g: float, b: float, e_emitted: float, c: float) -> RedshiftResult:
    """Emit a photon downward from x = b at T = 0 and absorb it on the
    accelerated worldline; report measured and first-order energies.

    The absorption time solves X(T) = b - cT by bracketed bisection (bracket
    [0, 2b/c], widened geometrically if needed) refined by a secant stage to
    about 1e-13 relative. Requires g b/c^2 < 1 so the first-order comparison
    is meaningful.
    """
    for name, value in (("g", g), ("b", b), ("E", e_emitted), ("c", c)):
        if not (value > 0.0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value}")
    shift = g * b / c**2
    if shift >= 1.0:
        raise DomainError(
            f"g*b/c^2 = {shift} >= 1: emitter too far above the detector's "
            f"horizon for the first-order comparison"
        )

    def gap(T: float) -> float:
        return detector_position(g, c, T) - (b - c * T)

    lo, hi = 0.0, 2.0 * b / c
    for _ in range(64):
        if gap(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(
            f"no photon absorption found: bracket grew to T={hi} without a sign change"
        )

    # bisection to ~1e-13 relative in T
    f_lo = gap(lo)
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        f_mid = gap(mid)
        if f_mid > 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid

    # secant polish inside the bracket
    t0, t1 = lo, hi
    f0, f1 = f_lo, gap(hi)
    for _ in range(3):
        if f1 == f0:
            break
        t2 = t1 - f1 * (t1 - t0) / (f1 - f0)
        if not (lo <= t2 <= hi):
            break
        t0, f0, t1, f1 = t1, f1, t2, gap(t2)
    t_abs = t1

    tau = (c / g) * math.asinh(g * t_abs / c)
    photon = photon_four_momentum(e_emitted, -1, c)
    velocity = observer_four_velocity(FrameSpec(g=g, b=0.0, c=c), tau)
    e_measured = measured_energy(photon, velocity)
    return RedshiftResult(
        absorption_event=MinkowskiEvent(t=t_abs, x=b - c * t_abs),
        detector_proper_time=tau,
        measured_energy=e_measured,
        first_order_energy=(1.0 + shift) * e_emitted,
        doppler_factor=e_measured / e_emitted,
    )


def clock_comparison_rate(frame: FrameSpec) -> float:
    """Tick-rate ratio of two identical clocks at vertical separation b as
    observed through photon exchange: 1 + g b/c^2 at first order.

    Each clock, at rest with its own observer, runs at an energy with no
    position coupling; the observed rate difference comes entirely from the
    observers' proper-time relation, not from any single-clock coupling.
    """
    return proper_time_rate(frame)
