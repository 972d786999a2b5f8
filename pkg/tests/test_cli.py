"""End-to-end CLI tests: argument handling, CSV schemas, exit codes, and the
figure-data writer. Commands run in-process through main(); one test goes
through a real subprocess to cover the installed entry point."""

import json
import math
import shutil
import subprocess
import sys

import pytest

from rootbounds.bounds import monic_lower_prob, monic_upper_prob
from rootbounds.cli import (
    FIG8_TRIALS_CAP,
    FIGURES_DEFAULT_SEED,
    GENERAL_FIGURE_GRID,
    MONIC_FIGURE_GRID,
    OutputTable,
    main,
)


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _parse_csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    return header, rows


# --- table plumbing --------------------------------------------------------


def test_output_table_checks_arity():
    with pytest.raises(ValueError):
        OutputTable(name="t", columns=(("a", "count"),), rows=((1.0, 2.0),))


def test_output_table_formats_12_significant_digits():
    table = OutputTable(
        name="t",
        columns=(("a", "count"), ("b", "count")),
        rows=((math.pi, 1.0 / 3.0),),
    )
    text = table.to_csv()
    assert text == "a,b\n3.14159265359,0.333333333333\n"
    assert text.endswith("\n")


# --- bound / prob ----------------------------------------------------------


def test_bound_monic_high_degree(capsys):
    code, out, _ = _run(
        capsys, ["bound", "--ensemble", "monic", "--n", "100000", "--p", "0.99"]
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["n", "p", "radius", "round_trip_probability"]
    (n, p, radius, round_trip) = rows[0]
    assert n == 100000 and p == 0.99
    assert 6.31 <= radius <= 6.35
    assert round_trip >= 0.99 - 1e-9


def test_bound_general_degree_one(capsys):
    code, out, _ = _run(capsys, ["bound", "--ensemble", "general", "--n", "1", "--p", "0.5"])
    assert code == 0
    _, rows = _parse_csv(out)
    assert abs(rows[0][2] - 2.0) <= 1e-11


def test_bound_rejects_probability_one(capsys):
    code, _, err = _run(capsys, ["bound", "--ensemble", "monic", "--n", "5", "--p", "1.0"])
    assert code == 2
    assert "error" in err


def test_prob_monic_has_both_bounds(capsys):
    code, out, _ = _run(capsys, ["prob", "--ensemble", "monic", "--n", "5", "--c", "2.0"])
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["c", "n", "p_lower", "p_upper"]
    assert 0.146 <= rows[0][2] <= 0.150
    assert rows[0][3] == float(monic_upper_prob(2.0, 5))


def test_prob_general_lower_only(capsys):
    code, out, _ = _run(capsys, ["prob", "--ensemble", "general", "--n", "5", "--c", "1.0"])
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["c", "n", "p_lower"]
    assert rows[0][2] == 0.0


def test_prob_rejects_unknown_ensemble():
    with pytest.raises(SystemExit) as info:
        main(["prob", "--ensemble", "cubic", "--n", "5", "--c", "2.0"])
    assert info.value.code == 2


# --- kac -------------------------------------------------------------------


def test_kac_integral_degree_one(capsys):
    code, out, _ = _run(capsys, ["kac", "--n", "1", "--method", "integral"])
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["n", "value", "error_indicator", "trial_failures"]
    assert abs(rows[0][1] - 1.0) <= 1e-8
    assert rows[0][3] == 0


def test_kac_asymptotic(capsys):
    code, out, _ = _run(capsys, ["kac", "--n", "100", "--method", "asymptotic"])
    assert code == 0
    _, rows = _parse_csv(out)
    expected = 2.0 / math.pi * math.log(100.0) + 0.6257358072 + 2.0 / (100.0 * math.pi)
    assert abs(rows[0][1] - expected) <= 1e-10


def test_kac_mc_degree_one_exact(capsys):
    code, out, _ = _run(
        capsys, ["kac", "--n", "1", "--method", "mc", "--trials", "200", "--seed", "0"]
    )
    assert code == 0
    _, rows = _parse_csv(out)
    assert rows[0][1] == 1.0
    assert rows[0][2] == 0.0


def test_kac_rejects_degree_zero(capsys):
    code, _, err = _run(capsys, ["kac", "--n", "0", "--method", "integral"])
    assert code == 2
    assert "error" in err


# --- simulate --------------------------------------------------------------


def test_simulate_c_grid(capsys):
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "monic", "--n", "4",
            "--trials", "400", "--seed", "3", "--c-grid", "1.5,2.5",
        ],
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["c", "probability", "ci_low", "ci_high"]
    assert [r[0] for r in rows] == [1.5, 2.5]
    for r in rows:
        assert 0.0 <= r[2] <= r[1] <= r[3] <= 1.0
    assert rows[0][1] <= rows[1][1]


def test_simulate_c_grid_must_increase(capsys):
    code, _, err = _run(
        capsys,
        [
            "simulate", "--ensemble", "monic", "--n", "4",
            "--trials", "400", "--seed", "3", "--c-grid", "2.5,1.5",
        ],
    )
    assert code == 2
    assert "increasing" in err


def test_simulate_max_dist(capsys):
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "general", "--n", "3",
            "--trials", "150", "--seed", "1", "--max-dist",
        ],
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["bin_low", "bin_high", "count"]
    assert len(rows) == 64
    assert rows[0][0] == 0.0
    for r in rows:
        assert r[1] > r[0]
    assert sum(r[2] for r in rows) <= 150


def test_simulate_root_cloud(capsys):
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "general", "--n", "3",
            "--trials", "5", "--seed", "2", "--root-cloud",
        ],
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["re", "im"]
    assert len(rows) == 15


def test_simulate_root_cloud_needs_general(capsys):
    code, _, err = _run(
        capsys,
        [
            "simulate", "--ensemble", "monic", "--n", "3",
            "--trials", "5", "--seed", "2", "--root-cloud",
        ],
    )
    assert code == 2
    assert "general" in err


def test_simulate_root_cloud_memory_guard(capsys):
    code, _, err = _run(
        capsys,
        [
            "simulate", "--ensemble", "general", "--n", "10000",
            "--trials", "10000", "--seed", "2", "--root-cloud",
        ],
    )
    assert code == 3
    assert "error" in err


def test_simulate_degree_sweep(capsys):
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "general",
            "--trials", "200", "--seed", "6", "--degree-sweep", "1..4",
        ],
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == [
        "degree", "mean_max_modulus", "mean_cauchy_bound", "se_max_modulus", "se_cauchy_bound"
    ]
    assert [r[0] for r in rows] == [1.0, 2.0, 3.0, 4.0]
    for r in rows:
        assert r[2] >= r[1]


def test_simulate_degree_sweep_range_syntax():
    with pytest.raises(SystemExit) as info:
        main([
            "simulate", "--ensemble", "general",
            "--trials", "200", "--seed", "6", "--degree-sweep", "4..1",
        ])
    assert info.value.code == 2


def test_simulate_unit_disk(capsys):
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "general", "--n", "2",
            "--trials", "300", "--seed", "4", "--unit-disk",
        ],
    )
    assert code == 0
    header, rows = _parse_csv(out)
    assert header == ["n", "trials", "mean_inside", "se_inside", "mean_outside", "se_outside"]
    assert rows[0][0] == 2 and rows[0][1] == 300
    assert 0.0 <= rows[0][2] <= 2.0


def test_simulate_requires_degree_for_grid_mode(capsys):
    code, _, err = _run(
        capsys,
        ["simulate", "--ensemble", "monic", "--trials", "10", "--seed", "0", "--c-grid", "2.0"],
    )
    assert code == 2
    assert "--n" in err


def test_simulate_writes_out_file(capsys, tmp_path):
    out_file = tmp_path / "grid.csv"
    code, out, _ = _run(
        capsys,
        [
            "simulate", "--ensemble", "monic", "--n", "3",
            "--trials", "120", "--seed", "5", "--c-grid", "2.0",
            "--out", str(out_file),
        ],
    )
    assert code == 0
    assert out == ""
    text = out_file.read_text(encoding="utf-8")
    assert text.startswith("c,probability,")
    assert text.endswith("\n")


# --- figures ---------------------------------------------------------------


def test_figures_writes_all_files(capsys, tmp_path):
    out_dir = tmp_path / "figs"
    code, _, _ = _run(
        capsys,
        ["figures", "--out", str(out_dir), "--seed", "7", "--trials", "200"],
    )
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == [f"fig{i}.csv" for i in range(1, 9)] + ["manifest.json"]

    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["tool"] == "rootbounds"
    assert manifest["seed"] == 7
    assert manifest["trials"] == 200
    assert manifest["fig8_trials_per_degree"] == 200
    assert manifest["files"] == [f"fig{i}.csv" for i in range(1, 9)]
    assert manifest["figure_seeds"]["fig7"] == 9

    fig1_lines = (out_dir / "fig1.csv").read_text(encoding="utf-8").strip().split("\n")
    assert fig1_lines[0] == "c,p_lower"
    assert len(fig1_lines) == 1 + len(MONIC_FIGURE_GRID)
    assert "2,0.148291443089" in fig1_lines
    header, rows = _parse_csv((out_dir / "fig3.csv").read_text(encoding="utf-8"))
    assert len(rows) == len(GENERAL_FIGURE_GRID)

    _, fig7_rows = _parse_csv((out_dir / "fig7.csv").read_text(encoding="utf-8"))
    assert len(fig7_rows) == 20 * 1000
    # unit-circle reference columns trace |z| = 1
    for r in fig7_rows[:50]:
        assert abs(math.hypot(r[2], r[3]) - 1.0) <= 1e-12

    _, fig8_rows = _parse_csv((out_dir / "fig8.csv").read_text(encoding="utf-8"))
    assert [r[0] for r in fig8_rows] == list(range(1, 21))


def test_figures_rejects_tiny_trials(capsys, tmp_path):
    code, _, err = _run(
        capsys, ["figures", "--out", str(tmp_path / "x"), "--trials", "50"]
    )
    assert code == 2
    assert "trials" in err


def test_figures_unwritable_directory(capsys, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    code, _, err = _run(capsys, ["figures", "--out", str(blocker), "--trials", "200"])
    assert code == 4
    assert "error" in err


def test_figures_grids_match_contract():
    assert MONIC_FIGURE_GRID[0] == 1.0
    assert MONIC_FIGURE_GRID[-1] == 5.0
    assert len(MONIC_FIGURE_GRID) == 81
    assert GENERAL_FIGURE_GRID[0] == 1.0
    assert GENERAL_FIGURE_GRID[-1] == 41.0
    assert len(GENERAL_FIGURE_GRID) == 81
    assert FIGURES_DEFAULT_SEED == 20240101
    assert FIG8_TRIALS_CAP == 10000


# --- entry point -----------------------------------------------------------


def test_version_flag():
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0


def test_installed_console_script():
    exe = shutil.which("rootbounds")
    if exe is None:
        result = subprocess.run(
            [sys.executable, "-m", "rootbounds.cli", "prob",
             "--ensemble", "general", "--n", "1", "--c", "2.0"],
            capture_output=True, text=True,
        )
    else:
        result = subprocess.run(
            [exe, "prob", "--ensemble", "general", "--n", "1", "--c", "2.0"],
            capture_output=True, text=True,
        )
    assert result.returncode == 0
    assert result.stdout.startswith("c,n,p_lower")
    assert abs(float(result.stdout.strip().split("\n")[1].split(",")[2]) - 0.5) <= 1e-11
