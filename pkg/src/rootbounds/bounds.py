"""Closed-form probabilistic root bounds for the two random ensembles, in
both directions: radius -> probability guarantee and probability -> radius.

Ensembles: monic-normal fixes a_n = 1 with a_0..a_{n-1} independent standard
normals; general-normal draws all n+1 coefficients standard normal. The
lower-probability forms compose the relevant coefficient CDF with the Cauchy
enclosure radius; the monic upper bound comes from the product of root moduli
equaling |a_0|.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from enum import Enum

from .specfun import (
    SQRT2,
    Probability,
    abs_cauchy_ratio_cdf,
    abs_normal_cdf,
    erf,
    erfinv,
)

__all__ = [
    "BoundCertificate",
    "EnsembleKind",
    "certificate",
    "general_bound_for_prob",
    "general_lower_prob",
    "monic_bound_for_prob",
    "monic_lower_prob",
    "monic_upper_prob",
]

# erf saturates to 1.0 in double precision past ~5.9, so the upper-bound
# argument c^n/sqrt(2) may be clamped once it exceeds 7
_ERF_SATURATION = 7.0
_LOG_SATURATION = math.log(_ERF_SATURATION * SQRT2)


class EnsembleKind(Enum):
    """Coefficient law: monic (a_n = 1) or fully normal."""

    MONIC_NORMAL = "monic-normal"
    GENERAL_NORMAL = "general-normal"

    @classmethod
    def from_label(cls, label: str) -> "EnsembleKind":
        """Accept the short CLI labels as well as the full kind strings."""
        table = {
            "monic": cls.MONIC_NORMAL,
            "monic-normal": cls.MONIC_NORMAL,
            "general": cls.GENERAL_NORMAL,
            "general-normal": cls.GENERAL_NORMAL,
        }
        try:
            return table[label]
        except KeyError:
            raise ValueError(f"unknown ensemble {label!r}") from None


@dataclass(frozen=True)
class BoundCertificate:
    """A radius with its probability guarantees and the rules they came from.

    p_upper is None for the general ensemble, which has no upper-bound rule.
    """

    radius: float
    degree: int
    ensemble: EnsembleKind
    p_lower: Probability
    p_upper: Probability | None
    lower_rule: str
    upper_rule: str | None

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("certificate radius must be positive")
        if self.p_upper is not None and self.p_lower > self.p_upper:
            raise ValueError("certificate requires p_lower <= p_upper")


def _check_degree(n: int) -> int:
    if isinstance(n, bool):
        raise ValueError(f"degree must be an integer, got {n!r}")
    try:
        n = int(operator.index(n))
    except TypeError:
        raise ValueError(f"degree must be an integer, got {n!r}") from None
    if n < 1:
        raise ValueError(f"degree must be at least 1, got {n}")
    return n


def _check_open_probability(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie strictly inside (0, 1), got {p!r}")
    return p


def _root_1n(p: float, n: int) -> float:
    # p^(1/n) via exp(log1p(p-1)/n): keeps ~1 ulp absolute accuracy near 1,
    # where direct pow loses the digits the inverse bound needs at large n
    return math.exp(math.log1p(p - 1.0) / n)


def monic_lower_prob(c: float, n: int) -> Probability:
    """P(all roots of a monic-normal draw lie in |z| <= c) >= this value.

    Equals F(c-1)^n where F is the CDF of |N(0,1)|: if every non-leading
    coefficient has magnitude at most c-1, the Cauchy enclosure already
    confines all roots to radius c. Hard 0 for c <= 1.
    """
    n = _check_degree(n)
    return Probability(abs_normal_cdf(float(c) - 1.0) ** n)


def monic_bound_for_prob(p: float, n: int) -> float:
    """Radius c with monic_lower_prob(c, n) >= p: sqrt(2)*erfinv(p^(1/n)) + 1."""
    n = _check_degree(n)
    p = _check_open_probability(p)
    return SQRT2 * erfinv(_root_1n(p, n)) + 1.0


def monic_upper_prob(c: float, n: int) -> Probability:
    """P(all roots of a monic-normal draw lie in |z| <= c) <= erf(c^n/sqrt(2)).

    The product of root moduli equals |a_0|, so the largest modulus is at
    least |a_0|^(1/n); confinement to radius c forces |a_0| <= c^n. The
    threshold test runs in log space so c^n never overflows; erf saturates
    to 1.0 in double precision well before c^n/sqrt(2) reaches 7.
    """
    n = _check_degree(n)
    c = float(c)
    if c < 0.0:
        raise ValueError(f"radius must be nonnegative, got {c!r}")
    if c == 0.0:
        return Probability(0.0)
    if n * math.log(c) >= _LOG_SATURATION:
        return Probability(1.0)
    return Probability(erf(c**n / SQRT2))


def general_lower_prob(c: float, n: int) -> Probability:
    """P(all roots of a general-normal draw lie in |z| <= c) >= this value.

    Equals G(c-1)^n where G is the CDF of |N(0,1)/N(0,1)|: the general
    Cauchy enclosure is 1 + max|a_i/a_n|, and each |a_i/a_n| is the absolute
    value of a standard Cauchy variable. Hard 0 for c <= 1.
    """
    n = _check_degree(n)
    return Probability(abs_cauchy_ratio_cdf(float(c) - 1.0) ** n)


def general_bound_for_prob(p: float, n: int) -> float:
    """Radius c with general_lower_prob(c, n) >= p: 1 + tan((pi/2)*p^(1/n)).

    Once p^(1/n) > 1 - 1e-8 the tangent argument crowds its pole, so the
    value is computed as the cotangent of (pi/2)*(1 - p^(1/n)), which is
    exact in the limit and loses nothing for small complements.
    """
    n = _check_degree(n)
    p = _check_open_probability(p)
    log_q = math.log1p(p - 1.0) / n
    complement = -math.expm1(log_q)  # 1 - p^(1/n), no cancellation
    if complement < 1e-8:
        return 1.0 + 1.0 / math.tan(0.5 * math.pi * complement)
    return 1.0 + math.tan(0.5 * math.pi * math.exp(log_q))


_LOWER_RULES = {
    EnsembleKind.MONIC_NORMAL: "max-abs-coefficient-cdf",
    EnsembleKind.GENERAL_NORMAL: "coefficient-ratio-cdf",
}
_UPPER_RULE_MONIC = "root-modulus-product"


def certificate(c: float, n: int, ensemble: EnsembleKind) -> BoundCertificate:
    """Bundle the applicable probability guarantees for radius c at degree n."""
    if not isinstance(ensemble, EnsembleKind):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    c = float(c)
    if ensemble is EnsembleKind.MONIC_NORMAL:
        lower = monic_lower_prob(c, n)
        upper = monic_upper_prob(c, n)
        upper_rule = _UPPER_RULE_MONIC
    else:
        lower = general_lower_prob(c, n)
        upper = None
        upper_rule = None
    return BoundCertificate(
        radius=c,
        degree=n,
        ensemble=ensemble,
        p_lower=lower,
        p_upper=upper,
        lower_rule=_LOWER_RULES[ensemble],
        upper_rule=upper_rule,
    )
