"""Command-line surface: closed-form bound calculators, expected-real-zeros
evaluators, Monte Carlo experiments, and a one-shot figure-data reproduction.

Every command emits one CSV table (header row, 12 significant digits,
newline-terminated) to --out or standard output; `figures` writes a fixed
set of CSV files plus a manifest. Exit codes: 0 success, 2 usage or domain
error, 3 failure-rate or memory-guard violation, 4 unwritable figures
directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .bounds import (
    EnsembleKind,
    certificate,
    general_bound_for_prob,
    general_lower_prob,
    monic_bound_for_prob,
    monic_lower_prob,
)
from .kac import kac_asymptotic, kac_integral, mc_real_roots
from .montecarlo import (
    FailureRateError,
    MemoryGuardError,
    SimConfig,
    degree_sweep,
    estimate_bound_probability,
    max_modulus_distribution,
    root_cloud,
    unit_disk_count,
)

__all__ = ["OutputTable", "main"]

FIGURES_DEFAULT_SEED = 20240101
FIGURES_DEFAULT_TRIALS = 100000

# per-degree trial count for the degree-sweep figure; the sweep covers 20
# degrees, so it is capped independently of the headline --trials value
FIG8_TRIALS_CAP = 10000


def _format_number(value) -> str:
    return f"{float(value):.12g}"


@dataclass(frozen=True)
class OutputTable:
    """One named table: ordered (column, unit) schema plus numeric rows."""

    name: str
    columns: tuple[tuple[str, str], ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        arity = len(self.columns)
        for row in self.rows:
            if len(row) != arity:
                raise ValueError(
                    f"table {self.name!r} row has {len(row)} cells, expected {arity}"
                )

    def to_csv(self) -> str:
        lines = [",".join(name for name, _ in self.columns)]
        lines.extend(",".join(_format_number(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _emit(table: OutputTable, out_path: str | None) -> None:
    text = table.to_csv()
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_c_grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad c value in {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("c grid must contain at least one value")
    return values

def _parse_degree_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(
            f"expected LO..HI, got {text!r}"
        )
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI with integers, got {text!r}") from None
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty degree range {text!r}")
    return lo_i, hi_i


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootbounds",
        description=(
            "Deterministic and probabilistic root bounds for random polynomials "
            "with independent standard normal coefficients, expected-real-zeros "
            "evaluation, and reproducible Monte Carlo experiments."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser(
        "bound", help="radius that bounds all roots with at least probability p"
    )
    bound.add_argument("--ensemble", required=True, choices=["monic", "general"])
    bound.add_argument("--n", required=True, type=int, help="polynomial degree")
    bound.add_argument("--p", required=True, type=float, help="target probability in (0,1)")
    bound.add_argument("--out", default=None, help="write CSV here instead of stdout")
    bound.set_defaults(func=cmd_bound)

    prob = sub.add_parser(
        "prob", help="probability guarantees that radius c bounds all roots"
    )
    prob.add_argument("--ensemble", required=True, choices=["monic", "general"])
    prob.add_argument("--n", required=True, type=int, help="polynomial degree")
    prob.add_argument("--c", required=True, type=float, help="candidate radius")
    prob.add_argument("--out", default=None, help="write CSV here instead of stdout")
    prob.set_defaults(func=cmd_prob)

    kac = sub.add_parser("kac", help="expected number of real zeros at degree n")
    kac.add_argument("--n", required=True, type=int, help="polynomial degree")
    kac.add_argument("--method", required=True, choices=["integral", "asymptotic", "mc"])
    kac.add_argument("--trials", type=int, default=100000, help="mc only (default 100000)")
    kac.add_argument("--seed", type=int, default=0, help="mc only (default 0)")
    kac.add_argument("--tol", type=float, default=1e-8, help="integral only (default 1e-8)")
    kac.add_argument("--out", default=None, help="write CSV here instead of stdout")
    kac.set_defaults(func=cmd_kac)

    simulate = sub.add_parser("simulate", help="Monte Carlo experiments")
    simulate.add_argument("--ensemble", required=True, choices=["monic", "general"])
    simulate.add_argument("--n", type=int, default=None, help="polynomial degree")
    simulate.add_argument("--trials", required=True, type=int)
    simulate.add_argument("--seed", required=True, type=int)
    mode = simulate.add_mutually_exclusive_group(required=True)
    mode.add_argument(
        "--c-grid",
        type=_parse_c_grid,
        default=None,
        metavar="C1,C2,...",
        help="empirical bound probabilities with Wilson 95%% intervals",
    )
    mode.add_argument(
        "--max-dist",
        action="store_true",
        help="histogram of the max root modulus (64 bins to the 99.5th percentile)",
    )
    mode.add_argument(
        "--root-cloud",
        action="store_true",
        help="all roots of the sampled draws (general ensemble only)",
    )
    mode.add_argument(
        "--degree-sweep",
        type=_parse_degree_range,
        default=None,
        metavar="LO..HI",
        help="mean max modulus and mean Cauchy bound per degree (general only)",
    )
    mode.add_argument(
        "--unit-disk",
        action="store_true",
        help="mean root counts inside/outside the unit circle (general only)",
    )
    simulate.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    simulate.add_argument("--out", default=None, help="write CSV here instead of stdout")
    simulate.set_defaults(func=cmd_simulate)

    figures = sub.add_parser(
        "figures", help="write fig1.csv..fig8.csv plus manifest.json into a directory"
    )
    figures.add_argument("--out", required=True, help="output directory")
    figures.add_argument("--seed", type=int, default=FIGURES_DEFAULT_SEED)
    figures.add_argument(
        "--trials",
        type=int,
        default=FIGURES_DEFAULT_TRIALS,
        help=f"trials for the degree-5 runs (default {FIGURES_DEFAULT_TRIALS}); "
        f"the degree-sweep figure uses at most {FIG8_TRIALS_CAP} per degree",
    )
    figures.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    figures.set_defaults(func=cmd_figures)
    return parser


# ---------------------------------------------------------------------------
# commands


def cmd_bound(args) -> int:
    kind = EnsembleKind.from_label(args.ensemble)
    if kind is EnsembleKind.MONIC_NORMAL:
        radius = monic_bound_for_prob(args.p, args.n)
        round_trip = monic_lower_prob(radius, args.n)
    else:
        radius = general_bound_for_prob(args.p, args.n)
        round_trip = general_lower_prob(radius, args.n)
    table = OutputTable(
        name="bound",
        columns=(
            ("n", "degree"),
            ("p", "probability"),
            ("radius", "length"),
            ("round_trip_probability", "probability"),
        ),
        rows=((args.n, args.p, radius, float(round_trip)),),
    )
    _emit(table, args.out)
    return 0


def cmd_prob(args) -> int:
    kind = EnsembleKind.from_label(args.ensemble)
    cert = certificate(args.c, args.n, kind)
    if cert.p_upper is None:
        table = OutputTable(
            name="prob",
            columns=(("c", "length"), ("n", "degree"), ("p_lower", "probability")),
            rows=((cert.radius, cert.degree, float(cert.p_lower)),),
        )
    else:
        table = OutputTable(
            name="prob",
            columns=(
                ("c", "length"),
                ("n", "degree"),
                ("p_lower", "probability"),
                ("p_upper", "probability"),
            ),
            rows=((cert.radius, cert.degree, float(cert.p_lower), float(cert.p_upper)),),
        )
    _emit(table, args.out)
    return 0


def cmd_kac(args) -> int:
    if args.method == "integral":
        est = kac_integral(args.n, tol=args.tol)
    elif args.method == "asymptotic":
        est = kac_asymptotic(args.n)
    else:
        est = mc_real_roots(args.n, args.trials, args.seed)
    table = OutputTable(
        name="kac",
        columns=(
            ("n", "degree"),
            ("value", "count"),
            ("error_indicator", "count"),
            ("trial_failures", "count"),
        ),
        rows=((args.n, est.value, est.error_indicator, est.trial_failures),),
    )
    _emit(table, args.out)
    return 0


def _wilson_table(summary) -> OutputTable:
    return OutputTable(
        name="bound-probability",
        columns=(
            ("c", "length"),
            ("probability", "probability"),
            ("ci_low", "probability"),
            ("ci_high", "probability"),
        ),
        rows=tuple((r.c, r.probability, r.ci_low, r.ci_high) for r in summary.rows),
    )


def _histogram_table(summary) -> OutputTable:
    breaks = summary.histogram_breaks
    counts = summary.histogram_counts
    return OutputTable(
        name="max-modulus-histogram",
        columns=(("bin_low", "length"), ("bin_high", "length"), ("count", "count")),
        rows=tuple(
            (breaks[i], breaks[i + 1], counts[i]) for i in range(len(counts))
        ),
    )


def cmd_simulate(args) -> int:
    kind = EnsembleKind.from_label(args.ensemble)
    general_only_modes = (
        ("--root-cloud", args.root_cloud),
        ("--degree-sweep", args.degree_sweep is not None),
        ("--unit-disk", args.unit_disk),
    )
    for flag, active in general_only_modes:
        if active and kind is not EnsembleKind.GENERAL_NORMAL:
            print(f"error: {flag} requires --ensemble general", file=sys.stderr)
            return 2
    if args.degree_sweep is None and args.n is None:
        print("error: --n is required for this mode", file=sys.stderr)
        return 2

    if args.c_grid is not None:
        config = SimConfig(kind, args.n, args.trials, args.seed, args.c_grid)
        table = _wilson_table(estimate_bound_probability(config, workers=args.workers))
    elif args.max_dist:
        config = SimConfig(kind, args.n, args.trials, args.seed)
        table = _histogram_table(max_modulus_distribution(config, workers=args.workers))
    elif args.root_cloud:
        roots = root_cloud(args.n, args.trials, args.seed, workers=args.workers)
        table = OutputTable(
            name="root-cloud",
            columns=(("re", "length"), ("im", "length")),
            rows=tuple((float(z.real), float(z.imag)) for z in roots),
        )
    elif args.degree_sweep is not None:
        lo, hi = args.degree_sweep
        rows = degree_sweep(range(lo, hi + 1), args.trials, args.seed, workers=args.workers)
        table = OutputTable(
            name="degree-sweep",
            columns=(
                ("degree", "degree"),
                ("mean_max_modulus", "length"),
                ("mean_cauchy_bound", "length"),
                ("se_max_modulus", "length"),
                ("se_cauchy_bound", "length"),
            ),
            rows=tuple(
                (r.degree, r.mean_max_modulus, r.mean_cauchy_bound, r.se_max_modulus, r.se_cauchy_bound)
                for r in rows
            ),
        )
    else:
        summary = unit_disk_count(args.n, args.trials, args.seed, workers=args.workers)
        table = OutputTable(
            name="unit-disk",
            columns=(
                ("n", "degree"),
                ("trials", "count"),
                ("mean_inside", "count"),
                ("se_inside", "count"),
                ("mean_outside", "count"),
                ("se_outside", "count"),
            ),
            rows=(
                (
                    summary.n,
                    summary.trials,
                    summary.mean_inside,
                    summary.se_inside,
                    summary.mean_outside,
                    summary.se_outside,
                ),
            ),
        )
    _emit(table, args.out)
    return 0


MONIC_FIGURE_GRID = tuple((100 + 5 * k) / 100.0 for k in range(81))
GENERAL_FIGURE_GRID = tuple((2 + k) / 2.0 for k in range(81))


def cmd_figures(args) -> int:
    out_dir = args.out
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".write-probe")
        with open(probe, "w", encoding="utf-8") as handle:
            handle.write("ok")
        os.remove(probe)
    except OSError as exc:
        print(f"error: cannot write to {out_dir!r}: {exc}", file=sys.stderr)
        return 4
    if args.trials < 100:
        print("error: figures needs --trials >= 100", file=sys.stderr)
        return 2

    seed = args.seed
    trials = args.trials
    workers = args.workers
    fig8_trials = min(trials, FIG8_TRIALS_CAP)

    fig1 = OutputTable(
        name="fig1",
        columns=(("c", "length"), ("p_lower", "probability")),
        rows=tuple((c, float(monic_lower_prob(c, 5))) for c in MONIC_FIGURE_GRID),
    )
    monic_summary = max_modulus_distribution(
        SimConfig(EnsembleKind.MONIC_NORMAL, 5, trials, seed, MONIC_FIGURE_GRID),
        workers=workers,
    )
    fig2 = _wilson_table(monic_summary)
    fig3 = OutputTable(
        name="fig3",
        columns=(("c", "length"), ("p_lower", "probability")),
        rows=tuple((c, float(general_lower_prob(c, 5))) for c in GENERAL_FIGURE_GRID),
    )
    general_summary = max_modulus_distribution(
        SimConfig(EnsembleKind.GENERAL_NORMAL, 5, trials, seed + 1, GENERAL_FIGURE_GRID),
        workers=workers,
    )
    fig4 = _wilson_table(general_summary)
    fig5 = _histogram_table(monic_summary)
    fig6 = _histogram_table(general_summary)

    cloud = root_cloud(1000, 20, seed + 2, workers=workers)
    total = cloud.size
    fig7 = OutputTable(
        name="fig7",
        columns=(
            ("re", "length"),
            ("im", "length"),
            ("unit_re", "length"),
            ("unit_im", "length"),
        ),
        rows=tuple(
            (
                float(z.real),
                float(z.imag),
                math.cos(2.0 * math.pi * j / total),
                math.sin(2.0 * math.pi * j / total),
            )
            for j, z in enumerate(cloud)
        ),
    )
    sweep_rows = degree_sweep(range(1, 21), fig8_trials, seed + 3, workers=workers)
    fig8 = OutputTable(
        name="fig8",
        columns=(
            ("degree", "degree"),
            ("mean_max_modulus", "length"),
            ("mean_cauchy_bound", "length"),
            ("se_max_modulus", "length"),
            ("se_cauchy_bound", "length"),
        ),
        rows=tuple(
            (r.degree, r.mean_max_modulus, r.mean_cauchy_bound, r.se_max_modulus, r.se_cauchy_bound)
            for r in sweep_rows
        ),
    )

    tables = {
        "fig1.csv": fig1,
        "fig2.csv": fig2,
        "fig3.csv": fig3,
        "fig4.csv": fig4,
        "fig5.csv": fig5,
        "fig6.csv": fig6,
        "fig7.csv": fig7,
        "fig8.csv": fig8,
    }
    manifest = {
        "tool": "rootbounds",
        "version": __version__,
        "seed": seed,
        "trials": trials,
        "fig8_trials_per_degree": fig8_trials,
        "figure_seeds": {
            "fig2_fig5": seed,
            "fig4_fig6": seed + 1,
            "fig7": seed + 2,
            "fig8": seed + 3,
        },
        "files": sorted(tables),
    }
    try:
        for filename, table in tables.items():
            with open(os.path.join(out_dir, filename), "w", encoding="utf-8", newline="") as f:
                f.write(table.to_csv())
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
            f.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"error: cannot write to {out_dir!r}: {exc}", file=sys.stderr)
        return 4
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FailureRateError, MemoryGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
