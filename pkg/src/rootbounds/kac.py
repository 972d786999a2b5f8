"""Expected number of real zeros of a random polynomial whose coefficients
are independent standard normals: exact integral evaluation, logarithmic
asymptotic, and a Monte Carlo cross-check.

The integral form is (4/pi) times the integral over t in [0, 1] of

    sqrt( 1/(1-t^2)^2 - (n+1)^2 t^(2n) / (1-t^(2n+2))^2 ).

Both terms blow up like 1/(1-t)^2 at the right endpoint while their
difference stays bounded, so the radicand is evaluated as a factored
difference of squares built from expm1/log1p pieces. That form is accurate
while n*(-ln t) stays above ~0.02; the last sliver of the range is
integrated with a short series in s = -ln t around the endpoint limit
sqrt(n(n+2)/12) instead of being fed to the quadrature.
"""

from __future__ import annotations

import functools
import math
import operator
from dataclasses import dataclass

from scipy.integrate import quad

from .bounds import EnsembleKind
from .montecarlo import FAILURE_RATE_LIMIT, FailureRateError, trial_statistics

__all__ = [
    "ASYMPTOTIC_CONSTANT",
    "KacEstimate",
    "QuadratureError",
    "kac_asymptotic",
    "kac_integral",
    "mc_real_roots",
]

ASYMPTOTIC_CONSTANT = 0.6257358072

_MAX_INTEGRAL_DEGREE = 10**6
_METHODS = ("integral", "asymptotic", "monte-carlo")


class QuadratureError(RuntimeError):
    """Adaptive refinement stopped before reaching the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(message)
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class KacEstimate:
    """An expected-real-zeros value with its method and error measure.

    error_indicator means: achieved quadrature error bound (integral),
    the order bound C/n^2 (asymptotic), or the standard error of the mean
    (monte-carlo). trial_failures is nonzero only for monte-carlo.
    """

    value: float
    method: str
    error_indicator: float
    trial_failures: int = 0

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if not self.value >= 0.0:
            raise ValueError(f"value must be nonnegative, got {self.value!r}")


def _check_degree(n: int, cap: int | None = None) -> int:
    if isinstance(n, bool):
        raise ValueError(f"degree must be an integer, got {n!r}")
    try:
        n = int(operator.index(n))
    except TypeError:
        raise ValueError(f"degree must be an integer, got {n!r}") from None
    if n < 1:
        raise ValueError(f"degree must be at least 1, got {n}")
    if cap is not None and n > cap:
        raise ValueError(f"degree must be at most {cap}, got {n}")
    return n


def _radicand(t: float, n: int) -> float:
    """The bracketed expression, rearranged so the 1/(1-t)^2 poles cancel.

    With A = 1/(1-t^2) and B = (n+1) t^n / (1-t^(2n+2)), computes
    A^2 - B^2 as (A-B)(A+B); the A-B factor is assembled from expm1/log1p
    primitives so the leading divergences cancel exactly.
    """
    if t <= 0.0:
        return 1.0
    if t >= 1.0:
        return n * (n + 2.0) / 12.0
    log_t = math.log1p(t - 1.0)
    t_n = math.exp(n * log_t)
    one_m_t2 = -math.expm1(2.0 * log_t)
    one_m_t2n2 = -math.expm1((2.0 * n + 2.0) * log_t)
    a_minus_b = (one_m_t2n2 - (n + 1.0) * t_n * one_m_t2) / (one_m_t2 * one_m_t2n2)
    a_plus_b = 1.0 / one_m_t2 + (n + 1.0) * t_n / one_m_t2n2
    return a_minus_b * a_plus_b


def _integrand(t: float, n: int) -> float:
    return math.sqrt(max(_radicand(t, n), 0.0))


def _quad_panel(n: int, a: float, b: float, tol: float) -> tuple[float, float]:
    result = quad(
        _integrand,
        a,
        b,
        args=(n,),
        epsabs=tol / 4.0,
        epsrel=1e-12,
        limit=200,
        full_output=1,
    )
    value, achieved = result[0], result[1]
    if len(result) > 3:
        raise QuadratureError(
            f"quadrature on [{a:g}, {b:g}] stopped at error {achieved:g}: {result[3]}",
            error_estimate=float(achieved),
        )
    return float(value), float(achieved)


def kac_integral(n: int, tol: float = 1e-8) -> KacEstimate:
    """Expected real-zero count of a degree-n draw, by adaptive quadrature.

    The range [0, 1-delta] goes to the adaptive integrator (split into two
    panels for large n, where the mass concentrates near the endpoint);
    delta = min(1e-3, 0.02/n) marks where the factored radicand runs out
    of accuracy. On [1-delta, 1] the integrand is sqrt(n(n+2)/12) times
    (1 + s + gamma s^2 + O(s^3)) in s = -ln t, which integrates in closed
    form; the omitted orders contribute the series term of error_indicator.
    """
    n = _check_degree(n, cap=_MAX_INTEGRAL_DEGREE)
    tol = float(tol)
    if not (math.isfinite(tol) and tol > 0.0):
        raise ValueError(f"tol must be a positive finite real, got {tol!r}")
    delta = min(1e-3, 0.02 / n)
    upper = 1.0 - delta
    if n > 60:
        mid = 1.0 - 30.0 / n
        panels = ((0.0, mid), (mid, upper))
    else:
        panels = ((0.0, upper),)
    main = 0.0
    quad_error = 0.0
    for a, b in panels:
        value, achieved = _quad_panel(n, a, b, tol)
        main += value
        quad_error += achieved

    s0 = -math.log1p(-delta)
    limit_sq = n * (n + 2.0) / 12.0
    gamma = -(n + 3.0) * (n - 1.0) / 10.0
    i0 = -math.expm1(-s0)
    i1 = s0**2 / 2.0 - s0**3 / 3.0 + s0**4 / 8.0 - s0**5 / 30.0
    i2 = s0**3 / 3.0 - s0**4 / 4.0 + s0**5 / 10.0 - s0**6 / 36.0
    tail = math.sqrt(limit_sq) * (i0 + i1 + gamma * i2)
    series_error = math.sqrt(limit_sq) * (n * s0) ** 4 * s0

    scale = 4.0 / math.pi
    return KacEstimate(
        value=scale * (main + tail),
        method="integral",
        error_indicator=scale * (quad_error + series_error),
    )


def _asymptotic_value(n: int) -> float:
    return (2.0 / math.pi) * math.log(n) + ASYMPTOTIC_CONSTANT + 2.0 / (n * math.pi)


@functools.lru_cache(maxsize=1)
def _asymptotic_error_constant() -> float:
    """C such that |integral - asymptotic| <= C/n^2 over the calibration set."""
    return max(
        abs(kac_integral(k).value - _asymptotic_value(k)) * k * k for k in (50, 100, 150, 200)
    )


def kac_asymptotic(n: int) -> KacEstimate:
    """(2/pi) ln n + 0.6257358072 + 2/(n pi), error indicator C/n^2.

    C is calibrated once per process against kac_integral on
    n in {50, 100, 150, 200} and cached.
    """
    n = _check_degree(n)
    return KacEstimate(
        value=_asymptotic_value(n),
        method="asymptotic",
        error_indicator=_asymptotic_error_constant() / (n * n),
    )


def mc_real_roots(n: int, trials: int, seed: int, workers: int = 1) -> KacEstimate:
    """Mean real-root count over general-normal draws, with its standard error."""
    stats = trial_statistics(EnsembleKind.GENERAL_NORMAL, n, trials, seed, workers)
    if stats.trial_failures > FAILURE_RATE_LIMIT * trials:
        raise FailureRateError(stats.trial_failures, trials)
    counts = stats.real_count.astype(float)
    m = counts.size
    se = float(counts.std(ddof=1)) / math.sqrt(m) if m > 1 else 0.0
    return KacEstimate(
        value=float(counts.mean()),
        method="monte-carlo",
        error_indicator=se,
        trial_failures=stats.trial_failures,
    )
