from __future__ import annotations

import subprocess
import sys

import pytest

DIMS = "8,16,32"


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "ergolab.cli", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Reduced-scale CSVs produced by the simulation CLI itself, so these
    tests exercise the real interchange files rather than hand-typed ones."""
    root = tmp_path_factory.mktemp("csv")
    hs = root / "avg_hs.csv"
    bures = root / "avg_bures.csv"
    run_cli(["avg", "--measure", "hs", "--dims", DIMS, "--samples", "150",
             "--seed", "5", "--out", str(hs)])
    run_cli(["avg", "--measure", "bures", "--dims", DIMS, "--samples", "150",
             "--seed", "5", "--out", str(bures)])
    merged = root / "avg.csv"
    hs_lines = hs.read_text().rstrip("\n").split("\n")
    bures_lines = bures.read_text().rstrip("\n").split("\n")
    merged.write_text("\n".join(hs_lines + bures_lines[1:]) + "\n")

    tails = root / "tails.csv"
    run_cli(["tails", "--measure", "bures", "--dims", DIMS, "--samples", "3000",
             "--seed", "6", "--ell-grid", "log:0.008:0.2:12", "--out", str(tails)])
    fits_ell = root / "fits_ell.csv"
    run_cli(["fit", "--in", str(tails), "--mode", "vary-ell", "--quantity", "both",
             "--out", str(fits_ell)])
    fits_d = root / "fits_d.csv"
    run_cli(["fit", "--in", str(tails), "--mode", "vary-d", "--quantity", "both",
             "--out", str(fits_d)])
    return root


@pytest.fixture(scope="session")
def avg_csv(data_dir):
    return str(data_dir / "avg.csv")


@pytest.fixture(scope="session")
def tails_csv(data_dir):
    return str(data_dir / "tails.csv")


@pytest.fixture(scope="session")
def fits_ell_csv(data_dir):
    return str(data_dir / "fits_ell.csv")


@pytest.fixture(scope="session")
def fits_d_csv(data_dir):
    return str(data_dir / "fits_d.csv")
