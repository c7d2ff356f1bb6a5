"""Built-in internal-energy and supporting-potential forms.

These are the named forms selectable from scenario configs. All carry analytic
derivatives so the dynamics module can avoid finite differences for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ConstantInternal:
    """Internal Hamiltonian with a fixed energy: a structureless clock."""

    value: float = 0.0

    def __call__(self, rel_pos, rel_mom) -> float:
        return self.value

    def gradient(self, rel_pos, rel_mom):
        rel_pos = np.asarray(rel_pos, dtype=float)
        rel_mom = np.asarray(rel_mom, dtype=float)
        return np.zeros_like(rel_pos), np.zeros_like(rel_mom)

    def minimum_energy(self) -> float:
        return self.value


@dataclass(frozen=True)
class HarmonicInternal:
    """Per-particle harmonic internal Hamiltonian

        H = offset + sum_j [ pi_j^2/(2 m_j) + (k m_j / 2) rho_j^2 ].

    The stiffness is mass-weighted so that the canonical constraints
    sum_j m_j rho_j = 0 and sum_j pi_j = 0 are preserved by the flow.
    For equal unit masses this reduces to the plain spring sum.
    """

    masses: tuple[float, ...]
    stiffness: float = 1.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        if any(m <= 0.0 for m in self.masses):
            raise ValueError("all masses must be positive")
        if self.stiffness < 0.0:
            raise ValueError("stiffness must be non-negative")

    def __call__(self, rel_pos, rel_mom) -> float:
        rho = np.asarray(rel_pos, dtype=float)
        pi = np.asarray(rel_mom, dtype=float)
        if rho.size == 0:
            return self.offset
        m = np.asarray(self.masses, dtype=float)
        kinetic = float(np.sum(pi * pi / (2.0 * m)))
        spring = 0.5 * self.stiffness * float(np.sum(m * rho * rho))
        return self.offset + kinetic + spring

    def gradient(self, rel_pos, rel_mom):
        rho = np.asarray(rel_pos, dtype=float)
        pi = np.asarray(rel_mom, dtype=float)
        if rho.size == 0:
            return np.zeros(0), np.zeros(0)
        m = np.asarray(self.masses, dtype=float)
        return self.stiffness * m * rho, pi / m

    def minimum_energy(self) -> float:
        return self.offset


@dataclass(frozen=True)
class HarmonicSupport:
    """Supporting potential U0(X) = alpha X^2 / 2."""

    alpha: float

    def __call__(self, x: float) -> float:
        return 0.5 * self.alpha * x * x

    def derivative(self, x: float) -> float:
        return self.alpha * x


@dataclass(frozen=True)
class LinearPotential:
    """U0(X) = slope * X; slope = -M g realizes an exact counter-gravity support."""

    slope: float

    def __call__(self, x: float) -> float:
        return self.slope * x

    def derivative(self, x: float) -> float:
        return self.slope


@dataclass(frozen=True)
class PowerLawPotential:
    """U0(X) = coefficient * X**exponent for integer exponent >= 1."""

    coefficient: float
    exponent: int

    def __post_init__(self) -> None:
        if int(self.exponent) != self.exponent or self.exponent < 1:
            raise ValueError(f"exponent must be a positive integer, got {self.exponent}")

    def __call__(self, x: float) -> float:
        return self.coefficient * x ** self.exponent

    def derivative(self, x: float) -> float:
        return self.coefficient * self.exponent * x ** (self.exponent - 1)


@dataclass(frozen=True)
class MomentumSquaredPotential:
    """Per-particle potential with a momentum-dependent relativistic part,

        U(x, p) = V(x) + p^2 W(x) / c^2.

    ``momentum_weight`` may be a constant or a callable W(x). The light speed
    must match the Hamiltonian spec the potential is used with.
    """

    position_part: Callable[[float], float]
    momentum_weight: Callable[[float], float] | float
    c: float

    def _weight(self, x: float) -> float:
        w = self.momentum_weight
        return float(w(x)) if callable(w) else float(w)

    def __call__(self, x: float, p: float) -> float:
        return float(self.position_part(x)) + p * p * self._weight(x) / self.c**2
