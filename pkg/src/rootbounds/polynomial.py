"""Polynomial representation, deterministic Cauchy root enclosures, and a
batched Aberth-Ehrlich complex root finder with root-derived statistics.

The root finder iterates all roots of a polynomial simultaneously and is
vectorized across many same-degree polynomials at once (the Monte Carlo
engine feeds it whole trial batches). Two numerical guards matter:

* Evaluation: Horner's scheme on the monic-normalized coefficients for
  |z| <= 1; for |z| > 1 the reversed-coefficient form q(w) = z^-n p(z),
  w = 1/z, so that high powers never overflow. The Newton ratio becomes
  p/p' = z*q / (n*q - w*q').
* Initial points: a circle of radius cauchy_bound/2 at angles
  2*pi*k/n + 0.4 (the offset breaks the conjugate symmetry of real
  coefficients). Past degree 100 a single circle collapses onto the root
  cluster by only a factor (1 - 2/n) per sweep, which blows any reasonable
  iteration cap, so per-root radii from the Newton polygon of the
  coefficient magnitudes (upper convex hull of (k, ln|a_k|)) are used
  instead; they land within a few sweeps of the final configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "DEFAULT_ANGLE_OFFSET",
    "DEFAULT_MAX_ITERATIONS",
    "DEFAULT_ROOT_TOL",
    "Polynomial",
    "REAL_ROOT_TOL",
    "RootFindingError",
    "RootSet",
    "aberth_roots_batch",
    "cauchy_bound_general",
    "cauchy_bound_monic",
    "count_real_roots",
    "find_roots",
    "max_root_modulus",
]

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_MAX_ITERATIONS = 500
DEFAULT_ANGLE_OFFSET = 0.4
REAL_ROOT_TOL = 1e-8

# single-circle starts stop scaling past this degree; see module docstring
_POLYGON_INIT_DEGREE = 100


class RootFindingError(RuntimeError):
    """The simultaneous iteration missed the convergence test at the cap."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial a_0 + a_1 z + ... + a_n z^n, coefficients ascending."""

    coefficients: tuple[float, ...]

    def __init__(self, coefficients: Sequence[float]):
        coeffs = tuple(float(a) for a in coefficients)
        if len(coeffs) < 2:
            raise ValueError("degree must be at least 1 (need two or more coefficients)")
        if not all(math.isfinite(a) for a in coeffs):
            raise ValueError("coefficients must all be finite")
        if coeffs[-1] == 0.0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z):
        """Horner evaluation at a scalar or ndarray of points."""
        acc = np.multiply(z, 0) + self.coefficients[-1]
        for a in self.coefficients[-2::-1]:
            acc = acc * z + a
        return acc


@dataclass(frozen=True)
class RootSet:
    """All roots of one polynomial, counted with multiplicity.

    residual_scale is the scale-free backward error
    max_r |P(r)| / (max|a_i| * (1 + |r|)^degree); a converged solve keeps it
    at or below the root-finder tolerance.
    """

    roots: tuple[complex, ...]
    residual_scale: float


def cauchy_bound_monic(P: Polynomial) -> float:
    """Root enclosure 1 + max|a_j| (j < n) for a monic polynomial."""
    if P.coefficients[-1] != 1.0:
        raise ValueError("cauchy_bound_monic requires a monic polynomial (a_n = 1)")
    return 1.0 + max(abs(a) for a in P.coefficients[:-1])


def cauchy_bound_general(P: Polynomial) -> float:
    """Root enclosure 1 + max|a_i / a_n| (i < n); a_n != 0 by construction."""
    an = abs(P.coefficients[-1])
    return 1.0 + max(abs(a) for a in P.coefficients[:-1]) / an


def _newton_polygon_radii(abs_coeffs: np.ndarray) -> np.ndarray:
    """Per-root starting radii from the upper convex hull of (k, ln|a_k|).

    Edge from (k1, y1) to (k2, y2) contributes k2 - k1 radii at
    (|a_k1|/|a_k2|)^(1/(k2-k1)), which tracks the moduli of the actual roots.
    """
    n = len(abs_coeffs) - 1
    logs = np.full(n + 1, -np.inf)
    nz = abs_coeffs > 0.0
    logs[nz] = np.log(abs_coeffs[nz])
    hull: list[tuple[int, float]] = []
    for k in range(n + 1):
        if logs[k] == -np.inf:
            continue
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (k - x1) <= (logs[k] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((k, float(logs[k])))
    radii = np.empty(n)
    if len(hull) < 2:
        # everything below the leading term vanished: all roots at zero
        radii[:] = 0.5
        return radii
    pos = 0
    for (k1, y1), (k2, y2) in zip(hull[:-1], hull[1:]):
        count = k2 - k1
        radii[pos : pos + count] = math.exp(min((y1 - y2) / count, 345.0))
        pos += count
    return radii


def _start_points(monic_rows: np.ndarray, angle_offset: float) -> np.ndarray:
    B, m = monic_rows.shape
    n = m - 1
    if n > _POLYGON_INIT_DEGREE:
        radii = np.empty((B, n))
        for b in range(B):
            radii[b] = _newton_polygon_radii(np.abs(monic_rows[b]))
    else:
        cauchy = 1.0 + np.abs(monic_rows[:, :-1]).max(axis=1)
        radii = np.broadcast_to((0.5 * cauchy)[:, None], (B, n))
    angles = 2.0 * np.pi * np.arange(n) / n + angle_offset
    return radii * np.exp(1j * angles)[None, :]


def _newton_ratios(monic: np.ndarray, reversed_monic: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p/p' for every point of every row, overflow-free at any |z|."""
    B, n = z.shape
    out = np.empty_like(z)
    outer = np.abs(z) > 1.0
    inner = ~outer
    if inner.any():
        zz = z[inner]
        cc = np.broadcast_to(monic[:, None, :], (B, n, n + 1))[inner]
        p = np.zeros_like(zz)
        dp = np.zeros_like(zz)
        for j in range(n, -1, -1):
            dp = dp * zz + p
            p = p * zz + cc[:, j]
        dp = np.where(dp == 0.0, 1e-300, dp)
        out[inner] = p / dp
    if outer.any():
        zz = z[outer]
        w = 1.0 / zz
        cc = np.broadcast_to(reversed_monic[:, None, :], (B, n, n + 1))[outer]
        q = np.zeros_like(zz)
        dq = np.zeros_like(zz)
        for j in range(n, -1, -1):
            dq = dq * w + q
            q = q * w + cc[:, j]
        denom = n * q - w * dq
        denom = np.where(denom == 0.0, 1e-300, denom)
        out[outer] = zz * q / denom
    return out


def aberth_roots_batch(
    coefficient_rows: np.ndarray,
    tol: float = DEFAULT_ROOT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    angle_offset: float = DEFAULT_ANGLE_OFFSET,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Simultaneously find all roots of many same-degree polynomials.

    coefficient_rows: (B, n+1) array, ascending degree, nonzero leading
    column. Returns (roots (B, n) complex, iterations (B,), converged (B,)).
    Rows that miss the cap keep their last iterates with converged False;
    the caller decides whether to retry with a different angle_offset.
    """
    rows = np.asarray(coefficient_rows, dtype=np.complex128)
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise ValueError("expected a (B, n+1) coefficient array with n >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    B, m = rows.shape
    n = m - 1
    monic = rows / rows[:, -1:]
    reversed_monic = np.ascontiguousarray(monic[:, ::-1])

    z = _start_points(monic, angle_offset)
    roots = z.copy()
    iterations = np.full(B, max_iterations, dtype=np.int64)
    converged = np.zeros(B, dtype=bool)

    remaining = np.arange(B)
    za, ca, cra = z, monic, reversed_monic
    root_active = np.ones_like(za, dtype=bool)

    for sweep in range(max_iterations):
        ratios = _newton_ratios(ca, cra, za)
        diff = za[:, :, None] - za[:, None, :]
        np.einsum("bii->bi", diff)[...] = np.inf
        collided = diff == 0.0
        if collided.any():
            # coincident iterates repel with infinite strength and stall;
            # nudge the affected rows deterministically and resweep
            rows_hit = collided.any(axis=(1, 2))
            za[rows_hit] *= 1.0 + 1e-10 * (1.0 + np.arange(n))[None, :]
            continue
        repulsion = (1.0 / diff).sum(axis=2)
        corrections = ratios / (1.0 - ratios * repulsion)
        corrections[~root_active] = 0.0
        za = za - corrections
        settled = np.abs(corrections) <= tol * (1.0 + np.abs(za))
        root_active &= ~settled
        done = ~root_active.any(axis=1)
        if done.any():
            finished = remaining[done]
            roots[finished] = za[done]
            iterations[finished] = sweep + 1
            converged[finished] = True
            keep = ~done
            if not keep.any():
                return roots, iterations, converged
            za = za[keep]
            ca = ca[keep]
            cra = cra[keep]
            remaining = remaining[keep]
            root_active = root_active[keep]
    roots[remaining] = za
    return roots, iterations, converged


def _residual_scale(coefficients: np.ndarray, roots: np.ndarray) -> float:
    """max_r |P(r)| / (max|a| * (1+|r|)^n), evaluated in log space."""
    n = len(coefficients) - 1
    acc = np.zeros_like(roots) + coefficients[-1]
    for a in coefficients[-2::-1]:
        acc = acc * roots + a
    absp = np.abs(acc)
    max_coeff = np.abs(coefficients).max()
    with np.errstate(divide="ignore"):
        log_scale = np.log(absp) - math.log(max_coeff) - n * np.log1p(np.abs(roots))
    return float(np.exp(log_scale.max()))


def find_roots(
    P: Polynomial,
    tol: float = DEFAULT_ROOT_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    angle_offset: float = DEFAULT_ANGLE_OFFSET,
) -> RootSet:
    """All complex roots of P by Aberth-Ehrlich simultaneous iteration.

    Convergence: the largest per-root correction falls to tol * (1 + |r|).
    Every returned root then satisfies |P(r)| <= tol * max|a_i| * (1+|r|)^n.
    Raises RootFindingError (carrying the sweep count) if the cap is hit.
    """
    row = np.asarray([P.coefficients], dtype=np.complex128)
    roots, iterations, converged = aberth_roots_batch(
        row, tol=tol, max_iterations=max_iterations, angle_offset=angle_offset
    )
    if not converged[0]:
        raise RootFindingError(
            f"root iteration missed tolerance {tol:g} after {max_iterations} "
            f"sweeps at degree {P.degree}",
            iterations=int(iterations[0]),
        )
    found = roots[0]
    residual = _residual_scale(np.asarray(P.coefficients, dtype=np.float64), found)
    return RootSet(tuple(complex(r) for r in found), residual)


def max_root_modulus(R: RootSet) -> float:
    if not R.roots:
        raise ValueError("empty root set")
    return max(abs(r) for r in R.roots)


def count_real_roots(R: RootSet) -> int:
    """Roots with |Im r| <= 1e-8 * (1 + |r|) count as real."""
    return sum(1 for r in R.roots if abs(r.imag) <= REAL_ROOT_TOL * (1.0 + abs(r)))
