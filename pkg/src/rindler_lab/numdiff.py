"""Central finite differences with Richardson extrapolation and a smoothness guard."""

from __future__ import annotations

import math
import sys
from typing import Callable

from .errors import DifferentiationError

_EPS = sys.float_info.epsilon


def derivative_step(order: int, scale: float = 1.0) -> float:
    """Step h = max(1, |scale|) * eps^(1/(order+2)) balancing truncation and round-off."""
    return max(1.0, abs(scale)) * _EPS ** (1.0 / (order + 2))


def central_derivative(
    f: Callable[[float], float],
    x: float,
    order: int,
    step: float | None = None,
) -> float:
    """Estimate the order-th derivative of ``f`` at ``x``.

    Uses the symmetric central-difference stencil at steps h and h/2 with one
    Richardson extrapolation level. A third stencil at h/4 feeds a convergence
    guard: if successive estimates fail to shrink the way a twice-differentiable
    function must (factor ~4 per halving), DifferentiationError is raised with
    the residual.
    """
    if order < 0:
        raise ValueError(f"derivative order must be >= 0, got {order}")
    if order == 0:
        return float(f(x))
    h = derivative_step(order, x) if step is None else float(step)
    coeffs = [(-1) ** i * math.comb(order, i) for i in range(order + 1)]
    offsets = [order / 2.0 - i for i in range(order + 1)]

    def stencil(hh: float) -> tuple[float, float]:
        terms = []
        fmax = 0.0
        for coeff, off in zip(coeffs, offsets):
            value = float(f(x + off * hh))
            fmax = max(fmax, abs(value))
            terms.append(coeff * value)
        return math.fsum(terms) / hh**order, fmax

    d1, m1 = stencil(h)
    d2, m2 = stencil(h / 2.0)
    d4, m4 = stencil(h / 4.0)

    fscale = max(m1, m2, m4, 1e-300)
    noise_floor = (2.0**order) * _EPS * fscale / (h / 4.0) ** order
    coarse = d1 - d2
    fine = d2 - d4
    if abs(fine) > 64.0 * noise_floor and abs(coarse) < 1.5 * abs(fine):
        raise DifferentiationError(
            f"finite differences do not converge at x={x!r} (order {order}): "
            f"estimates {d1!r}, {d2!r}, {d4!r}, residual {abs(fine)!r}"
        )
    return (4.0 * d2 - d1) / 3.0
