"""Reduction of the semi-Markov kernel to per-triple discount coefficients.

For a holding-time law ``H`` and discount rate ``alpha``, everything the
value recursion needs is two scalars:

* ``d``, the expected discounted duration of one sojourn
  (the integral of ``exp(-alpha t) (1 - H(t))`` over ``t >= 0``), and
* ``lam``, the expected discount accrued over one full sojourn
  (the integral of ``exp(-alpha t)`` against ``H(dt)``).

Integration by parts ties them together: ``d == (1 - lam) / alpha``.  All
supported laws have closed forms, so the coefficients are exact and cheap;
numerical quadrature appears only in the test suite as an independent check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Deterministic,
    DirectWeights,
    Exponential,
    GameModel,
    SojournLaw,
    Triple,
    Uniform,
)

# Below this value of alpha*upper the uniform closed form (1 - e^-z)/z is
# replaced by its Taylor expansion; the truncation error is below 1 ulp there.
_UNIFORM_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True)
class DiscountedCoefficients:
    """One triple's reward discount weight and continuation factor."""

    d: float
    lam: float


def continuation_weight(law: SojournLaw, alpha: float) -> float:
    """Expected discount accrued over one sojourn, in (0, 1).

    Closed forms: ``rate/(alpha+rate)`` for exponential, ``(1-e^-z)/z`` with
    ``z = alpha*upper`` for uniform, ``e^(-alpha*duration)`` for
    deterministic.  Direct weights pass through unchanged.
    """
    if alpha <= 0.0:
        raise ValueError(f"discount rate must be positive, got {alpha!r}")
    if isinstance(law, Exponential):
        return law.rate / (alpha + law.rate)
    if isinstance(law, Uniform):
        z = alpha * law.upper
        if z < _UNIFORM_SERIES_CUTOFF:
            return 1.0 - z / 2.0 + z * z / 6.0
        return -math.expm1(-z) / z
    if isinstance(law, Deterministic):
        return math.exp(-alpha * law.duration)
    if isinstance(law, DirectWeights):
        return law.lam
    raise TypeError(f"unsupported sojourn law {law!r}")


def reward_weight(law: SojournLaw, alpha: float) -> float:
    """Expected discounted duration of one sojourn, ``(1 - lam)/alpha``."""
    return (1.0 - continuation_weight(law, alpha)) / alpha


def coefficients(law: SojournLaw, alpha: float) -> DiscountedCoefficients:
    lam = continuation_weight(law, alpha)
    return DiscountedCoefficients(d=(1.0 - lam) / alpha, lam=lam)


def discounted_kernel_row(
    m: GameModel, triple: Triple
) -> tuple[float, float, np.ndarray]:
    """Coefficients and the continuation-weighted transition row of a triple.

    Returns ``(d, lam, lam * p(.|x,a,b))``; the row's entries are nonnegative
    and sum to ``lam``.  Raises ``KeyError`` for a triple the model does not
    contain.
    """
    if triple not in m.discount:
        raise KeyError(f"unknown triple {triple!r}")
    c = coefficients(m.sojourn[triple], m.discount[triple])
    row = c.lam * np.asarray(m.transition[triple], dtype=float)
    return c.d, c.lam, row
