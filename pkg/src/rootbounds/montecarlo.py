"""Reproducible Monte Carlo engine for the two coefficient ensembles.

Randomness is counter-based: every trial owns a substream keyed by a 64-bit
mix of (seed, trial_index), and each normal variate inside a trial comes
from a fixed (key, counter) pair via Box-Muller. A variate's value therefore
never depends on execution order, chunking, or worker count, which is what
makes results byte-identical across any degree of parallelism. All uint64
arithmetic is done on numpy arrays, where wraparound is the defined and
silent behavior.

Trials are processed in fixed-size chunks through the batched root finder;
a chunk that leaves unconverged rows retries just those rows once with a
rotated starting configuration and a higher sweep cap before they are
counted as failures.
"""

from __future__ import annotations

import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import EnsembleKind
from .polynomial import (
    DEFAULT_ROOT_TOL,
    REAL_ROOT_TOL,
    Polynomial,
    aberth_roots_batch,
)
from .specfun import SQRT2, erfinv

__all__ = [
    "DegreeSweepRow",
    "EmpiricalSummary",
    "FailureRateError",
    "MemoryGuardError",
    "SimConfig",
    "Substream",
    "TrialStats",
    "UnitDiskSummary",
    "WilsonRow",
    "Z95",
    "degree_sweep",
    "estimate_bound_probability",
    "max_modulus_distribution",
    "rng_substream",
    "root_cloud",
    "sample_polynomial",
    "trial_statistics",
    "unit_disk_count",
    "wilson_interval",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_MULT_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_MULT_2 = np.uint64(0x94D049BB133111EB)

# two-sided 95% normal quantile, used by the Wilson interval
Z95 = SQRT2 * erfinv(0.95)

# a run fails once more than this fraction of trials misses convergence
FAILURE_RATE_LIMIT = 1e-3

_ROOT_CLOUD_LIMIT = 10_000_000
_RETRY_ANGLE_OFFSET = 1.1
_RETRY_MAX_ITERATIONS = 2000


class FailureRateError(RuntimeError):
    """Too many root-finder failures for the estimate to be trusted."""

    def __init__(self, failures: int, trials: int):
        super().__init__(
            f"{failures} of {trials} trials failed root finding "
            f"(limit {FAILURE_RATE_LIMIT:.1%})"
        )
        self.failures = failures
        self.trials = trials


class MemoryGuardError(ValueError):
    """Requested output would exceed the in-memory root budget."""


# ---------------------------------------------------------------------------
# counter-based RNG


def _mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer over a uint64 array."""
    x = x.copy()
    x ^= x >> np.uint64(30)
    x *= _MIX_MULT_1
    x ^= x >> np.uint64(27)
    x *= _MIX_MULT_2
    x ^= x >> np.uint64(31)
    return x


def _seed_key(seed: int) -> np.uint64:
    seed = operator.index(seed) & _MASK64
    return _mix64(np.array([seed], dtype=np.uint64))[0]


def _stream_keys(seed: int, trial_indices: np.ndarray) -> np.ndarray:
    """One stream key per trial index (uint64 array in, uint64 array out)."""
    return _mix64(trial_indices * _GOLDEN + _seed_key(seed))


def _uniforms(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """float64 in (0, 1], one per broadcast (key, counter) pair.

    The +1 before scaling by 2^-53 keeps 0 out of the range so that
    log(u) below is always finite.
    """
    bits = _mix64(keys + (counters + np.uint64(1)) * _GOLDEN)
    return ((bits >> np.uint64(11)) + np.uint64(1)) * 2.0**-53


def _normal_block(keys: np.ndarray, first: int, count: int) -> np.ndarray:
    """Standard normals at stream positions first..first+count-1.

    Shape (len(keys), count). Box-Muller pair j is pinned to uniform
    counters (2j, 2j+1) and yields positions 2j and 2j+1, so any requested
    window reproduces the same values regardless of how it is split.
    """
    pair_lo = first // 2
    pair_hi = (first + count - 1) // 2
    pairs = np.arange(pair_lo, pair_hi + 1, dtype=np.uint64)
    cols = keys[:, None]
    u1 = _uniforms(cols, (pairs * np.uint64(2))[None, :])
    u2 = _uniforms(cols, (pairs * np.uint64(2) + np.uint64(1))[None, :])
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    block = np.empty((len(keys), 2 * len(pairs)))
    block[:, 0::2] = radius * np.cos(theta)
    block[:, 1::2] = radius * np.sin(theta)
    offset = first - 2 * pair_lo
    return block[:, offset : offset + count]


class Substream:
    """Deterministic per-trial stream of standard normal variates."""

    __slots__ = ("key", "_position", "leading_redraws")

    def __init__(self, key):
        self.key = np.uint64(key)
        self._position = 0
        self.leading_redraws = 0

    def normals(self, count: int) -> np.ndarray:
        count = operator.index(count)
        if count < 0:
            raise ValueError("count must be nonnegative")
        if count == 0:
            return np.empty(0)
        out = _normal_block(np.array([self.key], dtype=np.uint64), self._position, count)[0]
        self._position += count
        return out


def rng_substream(seed: int, trial_index: int) -> Substream:
    """The substream for one trial; same (seed, index) -> same stream."""
    idx = np.array([operator.index(trial_index) & _MASK64], dtype=np.uint64)
    return Substream(_stream_keys(seed, idx)[0])


# ---------------------------------------------------------------------------
# sampling


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


def _check_trials(trials: int, minimum: int = 1) -> int:
    try:
        trials = int(operator.index(trials))
    except TypeError:
        raise ValueError(f"trials must be an integer, got {trials!r}") from None
    if trials < minimum:
        raise ValueError(f"trials must be at least {minimum}, got {trials}")
    return trials


def sample_polynomial(ensemble: EnsembleKind, n: int, stream: Substream) -> Polynomial:
    """One coefficient draw: monic fixes a_n = 1, general draws all n+1.

    No rejection is applied to small leading coefficients; only an exact
    zero (impossible under the uniform construction, but possible for a
    degenerate stream) is redrawn, and the redraw is counted on the stream.
    """
    n = _check_degree(n)
    if not isinstance(ensemble, EnsembleKind):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if ensemble is EnsembleKind.MONIC_NORMAL:
        return Polynomial(tuple(stream.normals(n)) + (1.0,))
    coeffs = stream.normals(n + 1)
    while coeffs[-1] == 0.0:
        stream.leading_redraws += 1
        coeffs[-1] = stream.normals(1)[0]
    return Polynomial(coeffs)


def _coefficient_rows(ensemble_value: str, n: int, keys: np.ndarray) -> tuple[np.ndarray, int]:
    """Batch equivalent of sample_polynomial: (B, n+1) rows, redraw count."""
    B = len(keys)
    if ensemble_value == EnsembleKind.MONIC_NORMAL.value:
        rows = np.empty((B, n + 1))
        rows[:, :n] = _normal_block(keys, 0, n)
        rows[:, n] = 1.0
        return rows, 0
    rows = _normal_block(keys, 0, n + 1)
    redraws = 0
    position = n + 1
    while True:
        bad = np.flatnonzero(rows[:, -1] == 0.0)
        if bad.size == 0:
            return rows, redraws
        redraws += int(bad.size)
        rows[bad, -1] = _normal_block(keys[bad], position, 1)[:, 0]
        position += 1


# ---------------------------------------------------------------------------
# estimator plumbing


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    trials = _check_trials(trials)
    successes = operator.index(successes)
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class SimConfig:
    """The reproducibility unit: everything a sampling run depends on."""

    ensemble: EnsembleKind
    n: int
    trials: int
    seed: int
    c_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if not isinstance(self.ensemble, EnsembleKind):
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        object.__setattr__(self, "n", _check_degree(self.n))
        object.__setattr__(self, "trials", _check_trials(self.trials))
        object.__setattr__(self, "seed", operator.index(self.seed))
        grid = tuple(float(c) for c in self.c_grid)
        if any(not math.isfinite(c) for c in grid):
            raise ValueError("c_grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("c_grid must be strictly increasing")
        object.__setattr__(self, "c_grid", grid)


@dataclass(frozen=True)
class WilsonRow:
    """Empirical P(max root modulus <= c) with its 95% Wilson interval."""

    c: float
    probability: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    """Per-trial max-modulus samples plus the summaries drawn from them.

    samples is in trial order and excludes failed trials. histogram fields
    are populated by max_modulus_distribution only: 65 equal-width break
    points (64 bins) spanning [0, 99.5th percentile], and the bin counts.
    """

    samples: np.ndarray
    rows: tuple[WilsonRow, ...]
    mean: float
    median: float
    deciles: tuple[float, ...]
    trial_failures: int
    histogram_breaks: tuple[float, ...] | None = None
    histogram_counts: tuple[int, ...] | None = None


@dataclass(frozen=True)
class DegreeSweepRow:
    degree: int
    mean_max_modulus: float
    mean_cauchy_bound: float
    se_max_modulus: float
    se_cauchy_bound: float


@dataclass(frozen=True)
class UnitDiskSummary:
    """Mean root counts strictly inside and strictly outside |z| = 1."""

    n: int
    trials: int
    mean_inside: float
    se_inside: float
    mean_outside: float
    se_outside: float
    trial_failures: int


@dataclass(frozen=True, eq=False)
class TrialStats:
    """Per-trial root statistics over the converged trials, in trial order."""

    max_modulus: np.ndarray
    cauchy_bound: np.ndarray
    modulus_product: np.ndarray
    coefficient_ratio: np.ndarray
    real_count: np.ndarray
    inside_count: np.ndarray
    outside_count: np.ndarray
    trial_failures: int
    leading_redraws: int


def _chunk_size(n: int) -> int:
    # keep the (B, n, n) Aberth work arrays near a fixed memory budget
    return max(1, min(16384, 4_000_000 // max(16, n * n)))


def _chunk_ranges(trials: int, step: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def _solve_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Roots and convergence mask, with one rotated-start retry."""
    roots, _, converged = aberth_roots_batch(rows)
    if not converged.all():
        bad = np.flatnonzero(~converged)
        retry_roots, _, retry_ok = aberth_roots_batch(
            rows[bad],
            tol=DEFAULT_ROOT_TOL,
            max_iterations=_RETRY_MAX_ITERATIONS,
            angle_offset=_RETRY_ANGLE_OFFSET,
        )
        roots[bad] = retry_roots
        converged[bad] = retry_ok
    return roots, converged


def _stats_task(args: tuple) -> tuple:
    """Sample, solve, and reduce one contiguous block of trial indices.

    Top-level so process pools can pickle it. Returns only per-trial
    reductions, never the roots, to keep inter-process traffic small.
    """
    ensemble_value, n, seed, lo, hi, index_offset = args
    idx = np.arange(lo, hi, dtype=np.uint64)
    if index_offset:
        idx = idx + np.uint64(index_offset)
    keys = _stream_keys(seed, idx)
    rows, redraws = _coefficient_rows(ensemble_value, n, keys)
    roots, converged = _solve_rows(rows)
    mods = np.abs(roots)
    max_modulus = mods.max(axis=1)
    cauchy = 1.0 + np.abs(rows[:, :-1]).max(axis=1) / np.abs(rows[:, -1])
    product = mods.prod(axis=1)
    ratio = np.abs(rows[:, 0]) / np.abs(rows[:, -1])
    real_count = (np.abs(roots.imag) <= REAL_ROOT_TOL * (1.0 + mods)).sum(axis=1)
    inside = (mods < 1.0).sum(axis=1)
    outside = (mods > 1.0).sum(axis=1)
    return (max_modulus, cauchy, product, ratio, real_count, inside, outside, converged, redraws)


def _cloud_task(args: tuple) -> tuple:
    """Like _stats_task but keeps the roots themselves."""
    ensemble_value, n, seed, lo, hi, index_offset = args
    idx = np.arange(lo, hi, dtype=np.uint64)
    if index_offset:
        idx = idx + np.uint64(index_offset)
    keys = _stream_keys(seed, idx)
    rows, _ = _coefficient_rows(ensemble_value, n, keys)
    roots, converged = _solve_rows(rows)
    return roots, converged


def _map_chunks(task, args_list: list, workers: int) -> list:
    if workers <= 1 or len(args_list) <= 1:
        return [task(args) for args in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, args_list))


def trial_statistics(
    ensemble: EnsembleKind,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
    index_offset: int = 0,
) -> TrialStats:
    """Root statistics for `trials` independent draws of one configuration.

    Chunk boundaries depend only on (n, trials) and chunk results are
    reassembled in trial order, so the output is identical for any worker
    count. Failed trials are dropped from every array and counted.
    """
    n = _check_degree(n)
    trials = _check_trials(trials)
    if not isinstance(ensemble, EnsembleKind):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    args = [
        (ensemble.value, n, seed, lo, hi, index_offset)
        for lo, hi in _chunk_ranges(trials, _chunk_size(n))
    ]
    parts = _map_chunks(_stats_task, args, workers)
    columns = [np.concatenate([part[i] for part in parts]) for i in range(8)]
    redraws = sum(part[8] for part in parts)
    converged = columns[7]
    failures = int(trials - converged.sum())
    kept = [column[converged] for column in columns[:7]]
    return TrialStats(
        max_modulus=kept[0],
        cauchy_bound=kept[1],
        modulus_product=kept[2],
        coefficient_ratio=kept[3],
        real_count=kept[4],
        inside_count=kept[5],
        outside_count=kept[6],
        trial_failures=failures,
        leading_redraws=int(redraws),
    )


def _check_failure_rate(failures: int, trials: int) -> None:
    if failures > FAILURE_RATE_LIMIT * trials:
        raise FailureRateError(failures, trials)


def _summarize(
    samples: np.ndarray,
    c_grid: tuple[float, ...],
    trial_failures: int,
    with_histogram: bool,
) -> EmpiricalSummary:
    if samples.size == 0:
        raise FailureRateError(trial_failures, trial_failures)
    ordered = np.sort(samples)
    m = int(ordered.size)
    rows = []
    for c in c_grid:
        hits = int(np.searchsorted(ordered, c, side="right"))
        low, high = wilson_interval(hits, m)
        rows.append(WilsonRow(c=float(c), probability=hits / m, ci_low=low, ci_high=high))
    deciles = tuple(float(q) for q in np.quantile(ordered, np.linspace(0.1, 0.9, 9)))
    breaks = None
    counts = None
    if with_histogram:
        top = float(np.quantile(ordered, 0.995))
        edges = np.linspace(0.0, top, 65)
        counts = tuple(int(k) for k in np.histogram(samples, bins=edges)[0])
        breaks = tuple(float(e) for e in edges)
    return EmpiricalSummary(
        samples=samples,
        rows=tuple(rows),
        mean=float(ordered.mean()),
        median=float(np.quantile(ordered, 0.5)),
        deciles=deciles,
        trial_failures=trial_failures,
        histogram_breaks=breaks,
        histogram_counts=counts,
    )


# ---------------------------------------------------------------------------
# public estimators


def estimate_bound_probability(config: SimConfig, workers: int = 1) -> EmpiricalSummary:
    """Empirical P(max root modulus <= c) over config.c_grid, Wilson 95% CIs."""
    if not config.c_grid:
        raise ValueError("estimate_bound_probability requires a non-empty c_grid")
    stats = trial_statistics(config.ensemble, config.n, config.trials, config.seed, workers)
    _check_failure_rate(stats.trial_failures, config.trials)
    return _summarize(stats.max_modulus, config.c_grid, stats.trial_failures, with_histogram=False)


def max_modulus_distribution(config: SimConfig, workers: int = 1) -> EmpiricalSummary:
    """Full max-modulus sample with deciles and histogram-ready breaks."""
    if config.trials < 100:
        raise ValueError("max_modulus_distribution requires at least 100 trials")
    stats = trial_statistics(config.ensemble, config.n, config.trials, config.seed, workers)
    _check_failure_rate(stats.trial_failures, config.trials)
    return _summarize(stats.max_modulus, config.c_grid, stats.trial_failures, with_histogram=True)


def root_cloud(n: int, trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Concatenated roots of `trials` general-normal degree-n draws.

    Trial-major order. The output holds n * trials complex values (fewer
    only if trials failed, which the failure-rate guard keeps below 0.1%).
    """
    n = _check_degree(n)
    trials = _check_trials(trials)
    if n * trials > _ROOT_CLOUD_LIMIT:
        raise MemoryGuardError(
            f"root cloud of {n * trials} roots exceeds the {_ROOT_CLOUD_LIMIT} limit"
        )
    args = [
        (EnsembleKind.GENERAL_NORMAL.value, n, seed, lo, hi, 0)
        for lo, hi in _chunk_ranges(trials, _chunk_size(n))
    ]
    parts = _map_chunks(_cloud_task, args, workers)
    roots = np.concatenate([part[0] for part in parts])
    converged = np.concatenate([part[1] for part in parts])
    failures = int(trials - converged.sum())
    _check_failure_rate(failures, trials)
    return roots[converged].ravel()


def degree_sweep(degrees, trials: int, seed: int, workers: int = 1) -> tuple[DegreeSweepRow, ...]:
    """Mean max root modulus and mean Cauchy bound per degree (general draws).

    Each degree runs on its own disjoint block of trial indices so the rows
    are independent; degrees must lie in [1, 100].
    """
    degree_list = [_check_degree(d) for d in degrees]
    if not degree_list:
        raise ValueError("degrees must be non-empty")
    if any(d > 100 for d in degree_list):
        raise ValueError("degree_sweep degrees must lie in [1, 100]")
    trials = _check_trials(trials)
    out = []
    for d in degree_list:
        stats = trial_statistics(
            EnsembleKind.GENERAL_NORMAL,
            d,
            trials,
            seed,
            workers,
            index_offset=d << 32,
        )
        _check_failure_rate(stats.trial_failures, trials)
        m = stats.max_modulus.size
        scale = 1.0 / math.sqrt(m) if m > 1 else 0.0
        out.append(
            DegreeSweepRow(
                degree=d,
                mean_max_modulus=float(stats.max_modulus.mean()),
                mean_cauchy_bound=float(stats.cauchy_bound.mean()),
                se_max_modulus=float(stats.max_modulus.std(ddof=1)) * scale if m > 1 else 0.0,
                se_cauchy_bound=float(stats.cauchy_bound.std(ddof=1)) * scale if m > 1 else 0.0,
            )
        )
    return tuple(out)


def unit_disk_count(n: int, trials: int, seed: int, workers: int = 1) -> UnitDiskSummary:
    """Mean root counts inside and outside the unit circle (general draws)."""
    n = _check_degree(n)
    trials = _check_trials(trials)
    stats = trial_statistics(EnsembleKind.GENERAL_NORMAL, n, trials, seed, workers)
    _check_failure_rate(stats.trial_failures, trials)
    inside = stats.inside_count.astype(np.float64)
    outside = stats.outside_count.astype(np.float64)
    m = inside.size
    scale = 1.0 / math.sqrt(m) if m > 1 else 0.0
    return UnitDiskSummary(
        n=n,
        trials=trials,
        mean_inside=float(inside.mean()),
        se_inside=float(inside.std(ddof=1)) * scale if m > 1 else 0.0,
        mean_outside=float(outside.mean()),
        se_outside=float(outside.std(ddof=1)) * scale if m > 1 else 0.0,
        trial_failures=stats.trial_failures,
    )
