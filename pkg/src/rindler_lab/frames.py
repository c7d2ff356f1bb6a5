"""Coordinate kinematics of uniformly accelerated and inertial observers in 1+1 dimensions.

All quantities live in the (time, vertical) plane with metric signature (-, +).
A stationary observer with proper acceleration ``g`` follows the hyperbola

    c T = (x' + c^2/g) sinh(g t'/c),
    X   = (x' + c^2/g) cosh(g t'/c) - c^2/g,

where (t', x') are the accelerated-chart coordinates and (T, X) the inertial
ones. The synchronization epoch is fixed so that both charts agree at t' = 0.
A second stationary observer sitting at x' = b uses the chart

    x~' = x' - b,      t~' = (1 + g b/c^2) t',

with proper time running (1 + g b/c^2) times faster than t' and proper
acceleration g/(1 + g b/c^2).

Units are fully configurable; the default c = 1 keeps 1/c^2 effects O(1) at
desk scale. SI presets are provided as module constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

SI_LIGHT_SPEED = 299792458.0  # m/s
SI_EARTH_GRAVITY = 9.80665  # m/s^2


@dataclass(frozen=True)
class FourVector:
    """Component pair (c*t, x) of an event or momentum in the 1+1 Minkowski plane.

    The time component carries the factor of c, so both components share
    length (or energy/c) units and the metric contraction is
    ``-t*t + x*x``.
    """

    t: float
    x: float


@dataclass(frozen=True)
class FrameSpec:
    """A stationary observer: proper acceleration ``g`` of the base observer,
    vertical offset ``b`` from it, and light speed ``c``.

    Validity requires 1 + g*b/c^2 > 0, i.e. the observer sits above the
    horizon of the base chart.
    """

    g: float
    b: float = 0.0
    c: float = 1.0

    def __post_init__(self) -> None:
        if not (self.g > 0.0 and math.isfinite(self.g)):
            raise DomainError(f"proper acceleration must be positive, got {self.g}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise DomainError(f"light speed must be positive, got {self.c}")
        if not (1.0 + self.g * self.b / self.c**2 > 0.0):
            raise DomainError(
                f"offset b={self.b} puts the observer at or below the horizon "
                f"(need 1 + g*b/c^2 > 0)"
            )


@dataclass(frozen=True)
class RindlerEvent:
    """Event (t', x') in an accelerated chart. Valid events satisfy x' + c^2/g > 0."""

    t: float
    x: float


@dataclass(frozen=True)
class MinkowskiEvent:
    """Event (T, X) in the inertial chart."""

    t: float
    x: float


def minkowski_inner(a: FourVector, b: FourVector) -> float:
    """Metric contraction -a.t*b.t + a.x*b.x (signature -, +)."""
    return -a.t * b.t + a.x * b.x


def proper_time_rate(frame: FrameSpec) -> float:
    """Rate d(tau)/dt' = 1 + g*b/c^2 of the shifted observer's proper time."""
    return 1.0 + frame.g * frame.b / frame.c**2


def effective_acceleration(frame: FrameSpec) -> float:
    """Proper acceleration g/(1 + g*b/c^2) felt by the observer shifted to x' = b."""
    return frame.g / proper_time_rate(frame)


def _require_unshifted(frame: FrameSpec, operation: str) -> None:
    if frame.b != 0.0:
        raise DomainError(
            f"{operation} is defined for the unshifted chart (b=0); apply "
            f"shift_rindler first and use the effective acceleration"
        )


def rindler_to_minkowski(event: RindlerEvent, frame: FrameSpec) -> MinkowskiEvent:
    """Map an accelerated-chart event to the inertial chart.

    Raises DomainError for events at or behind the horizon x' <= -c^2/g.
    """
    _require_unshifted(frame, "rindler_to_minkowski")
    g, c = frame.g, frame.c
    radius = event.x + c * c / g
    if radius <= 0.0:
        raise DomainError(
            f"event x'={event.x} is at or behind the horizon x' = -c^2/g = {-c * c / g}"
        )
    phase = g * event.t / c
    return MinkowskiEvent(
        t=radius * math.sinh(phase) / c,
        x=radius * math.cosh(phase) - c * c / g,
    )


def minkowski_to_rindler(event: MinkowskiEvent, frame: FrameSpec) -> RindlerEvent:
    """Inverse map; requires the event to lie inside the right wedge

    (X + c^2/g)^2 - (cT)^2 > 0 with X + c^2/g > 0.
    """
    _require_unshifted(frame, "minkowski_to_rindler")
    g, c = frame.g, frame.c
    base = event.x + c * c / g
    ct = c * event.t
    if base <= abs(ct):
        raise DomainError(
            f"event (T={event.t}, X={event.x}) lies outside the right wedge of "
            f"an observer with g={g}"
        )
    # factored form of sqrt(base^2 - ct^2) limits cancellation near the wedge edge
    x = math.sqrt((base - ct) * (base + ct)) - c * c / g
    t = (c / g) * math.atanh(ct / base)
    return RindlerEvent(t=t, x=x)


def shift_rindler(event: RindlerEvent, frame: FrameSpec) -> RindlerEvent:
    """Re-express an event in the chart of the observer shifted by b:
    x~' = x' - b and t~' = (1 + g*b/c^2) t'.
    """
    return RindlerEvent(t=proper_time_rate(frame) * event.t, x=event.x - frame.b)


def observer_four_velocity(frame: FrameSpec, tau: float) -> FourVector:
    """Four-velocity (c cosh(g tau/c), c sinh(g tau/c)) of the accelerated observer
    at proper time tau, expressed in the inertial chart. Its self-contraction
    is -c^2.
    """
    _require_unshifted(frame, "observer_four_velocity")
    c = frame.c
    phase = frame.g * tau / c
    return FourVector(t=c * math.cosh(phase), x=c * math.sinh(phase))
