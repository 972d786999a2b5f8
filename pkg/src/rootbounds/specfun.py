"""Scalar special functions behind the closed-form bound and zero-count
formulas: the error function, its inverse, and the CDFs of |N(0,1)| and of
the absolute ratio of two independent standard normals.

erf/erfc delegate to the C library's kernels (piecewise rational
approximation, with the tail computed through the complementary form).
erfinv is an initial rational estimate polished by Newton iterations on erf;
near the endpoints the Newton residual is formed through erfc so the round
trip keeps absolute accuracy where 1 - erf(x) would cancel.
"""

from __future__ import annotations

import math

__all__ = [
    "Probability",
    "SQRT2",
    "abs_cauchy_ratio_cdf",
    "abs_normal_cdf",
    "erf",
    "erfc",
    "erfinv",
]

SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class Probability(float):
    """A float constrained to [0, 1]; construction outside the range fails."""

    __slots__ = ()

    def __new__(cls, value: float) -> "Probability":
        v = float(value)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {value!r}")
        return super().__new__(cls, v)


def erf(x: float) -> float:
    """Error function (2/sqrt(pi)) * integral of exp(-t^2) over [0, x]."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"erf requires a finite argument, got {x!r}")
    return math.erf(x)


def erfc(x: float) -> float:
    """Complementary error function 1 - erf(x), accurate deep in the tail."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"erfc requires a finite argument, got {x!r}")
    return math.erfc(x)


def erfinv(p: float) -> float:
    """Inverse error function on (-1, 1).

    A Winitzki-style estimate seeds Newton iteration on erf. For |p| >= 0.5
    the residual is computed as (1 - |p|) - erfc(x), which stays fully
    accurate as p approaches +-1 where erf(x) - p would lose all its digits.
    """
    p = float(p)
    if not -1.0 < p < 1.0:
        raise ValueError(f"erfinv requires -1 < p < 1, got {p!r}")
    if p == 0.0:
        return 0.0
    a = abs(p)
    ln_s = math.log((1.0 - a) * (1.0 + a))
    t = 2.0 / (math.pi * 0.147) + 0.5 * ln_s
    x = math.sqrt(math.sqrt(t * t - ln_s / 0.147) - t)
    for _ in range(20):
        if a >= 0.5:
            residual = (1.0 - a) - math.erfc(x)
        else:
            residual = math.erf(x) - a
        derivative = _TWO_OVER_SQRT_PI * math.exp(-x * x)
        if derivative == 0.0:
            break
        step = residual / derivative
        x -= step
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    return x if p > 0.0 else -x


def abs_normal_cdf(y: float) -> Probability:
    """CDF of |X| for X ~ N(0, 1): hard 0 for y <= 0, erf(y/sqrt(2)) above."""
    y = float(y)
    if y <= 0.0:
        return Probability(0.0)
    if math.isinf(y):
        return Probability(1.0)
    return Probability(math.erf(y / SQRT2))


def abs_cauchy_ratio_cdf(w: float) -> Probability:
    """CDF of |X1/X2| for independent standard normals X1, X2.

    The ratio X1/X2 is standard Cauchy, so folding onto [0, inf) gives
    (2/pi) * arctan(w). Evaluated as 2*atan(w)/pi so that w = 1 yields
    exactly 0.5: atan(1) is the correctly rounded pi/4, and the final
    division then cancels exactly.
    """
    w = float(w)
    if w <= 0.0:
        return Probability(0.0)
    if math.isinf(w):
        return Probability(1.0)
    return Probability(2.0 * math.atan(w) / math.pi)
