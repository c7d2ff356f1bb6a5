"""Interferometric visibility of a composite clock in a vertical superposition.

A clock with internal levels E_n (occupied with probabilities p_n) is held in
a superposition of two heights for a time T. In the supported (accelerated)
description each branch accumulates internal phase at a rate modified by the
position coupling g x E_n / c^2, so the branches become distinguishable and
the path contrast after tracing out the internal state drops to

    V = | sum_n p_n exp(i (1 - lambda) g Dx E_n T / (hbar c^2)) |,

where Dx is the height separation and lambda scales an engineered
counter-coupling of the same shape (lambda = 1 cancels the effect exactly).
In the free-fall description (g = 0) every branch phase is common and V = 1
for any spectrum: the dephasing belongs to the relative motion of system and
observer, not to the system itself.

``visibility`` evaluates the closed form; ``visibility_oracle`` verifies it
by brute force on the joint path (x) internal density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class InternalSpectrum:
    """Discrete internal levels as (energy, probability) pairs.

    Probabilities are non-negative and sum to 1 within 1e-12.
    """

    levels: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        levels = tuple((float(e), float(p)) for e, p in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("spectrum needs at least one level")
        if any(p < 0.0 for _, p in levels):
            raise ValueError("occupation probabilities must be non-negative")
        total = math.fsum(p for _, p in levels)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"occupation probabilities sum to {total}, expected 1")

    @property
    def dimension(self) -> int:
        return len(self.levels)

    @property
    def energies(self) -> tuple[float, ...]:
        return tuple(e for e, _ in self.levels)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.levels)

    @staticmethod
    def geometric(
        spacing: float = 1.0,
        ratio: float = 0.5,
        dim: int | None = None,
        ground_energy: float = 0.0,
    ) -> "InternalSpectrum":
        """Evenly spaced levels with geometric occupations p_n ~ ratio^n,
        renormalized after truncation. Without ``dim`` the level count is
        chosen so the discarded tail is below 1e-9.
        """
        if not (0.0 < ratio < 1.0):
            raise ValueError(f"occupation ratio must lie in (0, 1), got {ratio}")
        if dim is None:
            dim = max(1, math.ceil(math.log(1e-9) / math.log(ratio)))
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        weights = [ratio**n for n in range(dim)]
        total = math.fsum(weights)
        return InternalSpectrum(
            tuple((ground_energy + spacing * n, w / total) for n, w in enumerate(weights))
        )


@dataclass(frozen=True)
class InterferometerConfig:
    """Two superposed heights, hold duration, couplings, and the
    counter-coupling multiplier lambda (0 = none, 1 = exact cancellation)."""

    x_upper: float
    x_lower: float
    duration: float
    g: float
    c: float = 1.0
    hbar: float = 1.0
    counter_coupling: float = 0.0

    def __post_init__(self) -> None:
        if self.x_upper == self.x_lower:
            raise ValueError("the two superposed heights must differ")
        if not (self.duration > 0.0):
            raise ValueError(f"hold duration must be positive, got {self.duration}")
        if not (self.c > 0.0):
            raise ValueError(f"light speed must be positive, got {self.c}")
        if not (self.hbar > 0.0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    @property
    def separation(self) -> float:
        return self.x_upper - self.x_lower


def branch_phase(config: InterferometerConfig, energy: float, x: float) -> float:
    """Internal phase E (1 + (1-lambda) g x/c^2) T / hbar accumulated on a
    branch held at height x."""
    lam = config.counter_coupling
    rate = energy * (1.0 + (1.0 - lam) * config.g * x / config.c**2)
    return rate * config.duration / config.hbar


def _phase_per_energy(config: InterferometerConfig) -> float:
    """Differential branch phase per unit internal energy,
    (1-lambda) g Dx T / (hbar c^2)."""
    lam = config.counter_coupling
    return (1.0 - lam) * config.g * config.separation * config.duration / (
        config.hbar * config.c**2
    )


def visibility(config: InterferometerConfig, spectrum: InternalSpectrum) -> float:
    """Path contrast after tracing out the internal state, in [0, 1].

    Computed as the normalized coherence |sum_n p_n e^{i theta_n}| / sum_n p_n
    with phases referenced to the first occupied level, so any spectrum with
    equal phase differences (g = 0, lambda = 1, or a single level) yields
    exactly 1, and only energy differences of occupied levels matter.
    """
    kappa = _phase_per_energy(config)
    energies = spectrum.energies
    probs = spectrum.probabilities
    reference = next(kappa * e for e, p in zip(energies, probs) if p > 0.0)
    real = math.fsum(p * math.cos(kappa * e - reference) for e, p in zip(energies, probs))
    imag = math.fsum(p * math.sin(kappa * e - reference) for e, p in zip(energies, probs))
    return min(math.hypot(real, imag) / math.fsum(probs), 1.0)


def visibility_oracle(config: InterferometerConfig, spectrum: InternalSpectrum) -> float:
    """Brute-force check of ``visibility`` on the joint density matrix.

    Builds (|u> + |l>)/sqrt(2) on the path qubit tensored with the diagonal
    internal mixed state, evolves with the exact branch unitaries
    exp(-i H_branch T/hbar), H_branch = H_int (1 + (1-lambda) g x/c^2), and
    returns the off-diagonal path coherence magnitude of the reduced path
    state, normalized by its initial value. Limited to 64 levels.
    """
    d = spectrum.dimension
    if d > 64:
        raise ConfigError(f"oracle dimension cap is 64 levels, got {d}")
    energies = np.asarray(spectrum.energies, dtype=float)
    probs = np.asarray(spectrum.probabilities, dtype=float)
    lam = config.counter_coupling

    path = np.full((2, 2), 0.5)  # |+><+|
    rho = np.kron(path, np.diag(probs)).astype(complex)

    scale = config.duration / config.hbar
    mult_upper = 1.0 + (1.0 - lam) * config.g * config.x_upper / config.c**2
    mult_lower = 1.0 + (1.0 - lam) * config.g * config.x_lower / config.c**2
    diag = np.concatenate(
        [np.exp(-1j * energies * mult_upper * scale), np.exp(-1j * energies * mult_lower * scale)]
    )
    unitary = np.diag(diag)
    rho_t = unitary @ rho @ unitary.conj().T

    def path_coherence(matrix: np.ndarray) -> complex:
        entries = [matrix[n, d + n] for n in range(d)]
        return complex(
            math.fsum(e.real for e in entries), math.fsum(e.imag for e in entries)
        )

    initial = path_coherence(rho)
    final = path_coherence(rho_t)
    return min(abs(final) / abs(initial), 1.0)


@dataclass(frozen=True)
class FrameDependenceReport:
    """Visibility in the supported description, in free fall, and their gap."""

    supported_visibility: float
    freefall_visibility: float
    difference: float


def frame_dependence_report(
    config: InterferometerConfig, spectrum: InternalSpectrum
) -> FrameDependenceReport:
    """Contrast with the configured acceleration versus the free-fall (g = 0)
    description of the same experiment; the free-fall value is exactly 1 for
    every spectrum."""
    supported = visibility(config, spectrum)
    freefall = visibility(replace(config, g=0.0), spectrum)
    return FrameDependenceReport(
        supported_visibility=supported,
        freefall_visibility=freefall,
        difference=supported - freefall,
    )
