import csv
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def run_script(name, csv_path, out_path):
    return subprocess.run(
        [sys.executable, str(SCRIPTS / name), str(csv_path), str(out_path)],
        capture_output=True, text=True, cwd=SCRIPTS,
    )


@pytest.mark.parametrize("script,fixture", [
    ("plot_pattern.py", "pattern.csv"),
    ("plot_pgmap.py", "pgmap.csv"),
    ("plot_pe.py", "pe.csv"),
])
def test_script_renders_fixture(tmp_path, script, fixture):
    out = tmp_path / (script.replace(".py", "") + ".png")
    res = run_script(script, FIXTURES / fixture, out)
    assert res.returncode == 0, res.stderr
    assert out.exists() and out.stat().st_size > 0


def test_pattern_renders_four_traces(tmp_path):
    out = tmp_path / "pattern.png"
    res = run_script("plot_pattern.py", FIXTURES / "pattern.csv", out)
    assert "(4 traces)" in res.stdout


def test_pe_single_method_curve(tmp_path):
    # strip the fixture down to one method: still a valid single-curve plot
    with open(FIXTURES / "pe.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    header = list(rows[0].keys())
    single = tmp_path / "pe_single.csv"
    with open(single, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        for row in rows:
            if row["method"] == "MRT":
                writer.writerow(row)
    out = tmp_path / "pe_single.png"
    res = run_script("plot_pe.py", single, out)
    assert res.returncode == 0, res.stderr
    assert "(1 curves)" in res.stdout
    assert out.exists() and out.stat().st_size > 0


def test_missing_columns_reported_by_name(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("snr_db,method\n-20,MRT\n")
    res = run_script("plot_pe.py", bad, tmp_path / "x.png")
    assert res.returncode != 0
    assert "pe_closed_form" in res.stderr


def test_pgmap_tag_cell_matches_summary(tmp_path):
    # cross-file consistency: map value at the tag position must agree
    # with the summary file from the same run, within serialization rounding
    with open(FIXTURES / "summary.csv", newline="") as fh:
        summary = {(r["method"], r["alpha_db"]): float(r["pg_bde_db"])
                   for r in csv.DictReader(fh)}
    with open(FIXTURES / "pgmap.csv", newline="") as fh:
        cells = {}
        for r in csv.DictReader(fh):
            if float(r["x_m"]) == 0.0 and float(r["y_m"]) == 2.0:
                cells[(r["method"], r["alpha_db"])] = float(r["pg_db"])
    assert set(summary) == set(cells)
    for key, want in summary.items():
        assert cells[key] == pytest.approx(want, abs=1e-9)

    out = tmp_path / "pgmap.png"
    res = run_script("plot_pgmap.py", FIXTURES / "pgmap.csv", out)
    assert res.returncode == 0 and out.exists()
