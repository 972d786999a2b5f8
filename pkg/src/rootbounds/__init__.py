"""Root bounds for random polynomials with standard normal coefficients.

The package computes deterministic Cauchy enclosures and closed-form
probabilistic bounds for the roots of random polynomials (monic or fully
random coefficients), evaluates the expected number of real zeros both
exactly and asymptotically, and backs every formula with a reproducible
Monte Carlo engine. The `rootbounds` command line exposes all of it and
can regenerate the full figure dataset from a seed.
"""

from .bounds import (
    BoundCertificate,
    EnsembleKind,
    certificate,
    general_bound_for_prob,
    general_lower_prob,
    monic_bound_for_prob,
    monic_lower_prob,
    monic_upper_prob,
)
from .kac import (
    KacEstimate,
    QuadratureError,
    kac_asymptotic,
    kac_integral,
    mc_real_roots,
)
from .montecarlo import (
    DegreeSweepRow,
    EmpiricalSummary,
    FailureRateError,
    MemoryGuardError,
    SimConfig,
    Substream,
    TrialStats,
    UnitDiskSummary,
    WilsonRow,
    degree_sweep,
    estimate_bound_probability,
    max_modulus_distribution,
    rng_substream,
    root_cloud,
    sample_polynomial,
    trial_statistics,
    unit_disk_count,
    wilson_interval,
)
from .polynomial import (
    Polynomial,
    RootFindingError,
    RootSet,
    cauchy_bound_general,
    cauchy_bound_monic,
    count_real_roots,
    find_roots,
    max_root_modulus,
)
from .specfun import (
    Probability,
    abs_cauchy_ratio_cdf,
    abs_normal_cdf,
    erf,
    erfc,
    erfinv,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCertificate",
    "DegreeSweepRow",
    "EmpiricalSummary",
    "EnsembleKind",
    "FailureRateError",
    "KacEstimate",
    "MemoryGuardError",
    "Polynomial",
    "Probability",
    "QuadratureError",
    "RootFindingError",
    "RootSet",
    "SimConfig",
    "Substream",
    "TrialStats",
    "UnitDiskSummary",
    "WilsonRow",
    "__version__",
    "abs_cauchy_ratio_cdf",
    "abs_normal_cdf",
    "cauchy_bound_general",
    "cauchy_bound_monic",
    "certificate",
    "count_real_roots",
    "degree_sweep",
    "erf",
    "erfc",
    "erfinv",
    "estimate_bound_probability",
    "find_roots",
    "general_bound_for_prob",
    "general_lower_prob",
    "kac_asymptotic",
    "kac_integral",
    "max_modulus_distribution",
    "max_root_modulus",
    "mc_real_roots",
    "monic_bound_for_prob",
    "monic_lower_prob",
    "monic_upper_prob",
    "rng_substream",
    "root_cloud",
    "sample_polynomial",
    "trial_statistics",
    "unit_disk_count",
    "wilson_interval",
]
