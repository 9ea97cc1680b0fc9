from __future__ import annotations

import math

import pytest

from plotkit.tables import (
    AVERAGES_COLUMNS,
    TAILS_COLUMNS,
    SchemaError,
    read_table,
    usable_probability,
)


class TestReadTable:
    def test_averages_kind_and_types(self, avg_csv):
        table = read_table(avg_csv)
        assert table.kind == "averages"
        assert table.columns == AVERAGES_COLUMNS
        # three dims per measure, two measures merged
        assert len(table.rows) == 6
        row = table.rows[0]
        assert isinstance(row["d"], int)
        assert isinstance(row["mean_erg_hat"], float)
        assert row["measure"] == "hilbert_schmidt"

    def test_tails_kind(self, tails_csv):
        table = read_table(tails_csv)
        assert table.kind == "tails"
        assert table.columns == TAILS_COLUMNS
        assert len(table.rows) == 3 * 12
        assert {r["d"] for r in table.rows} == {8, 16, 32}
        for row in table.rows:
            assert isinstance(row["count_erg"], int)
            assert 0.0 <= row["p_erg"] <= 1.0

    def test_fits_kind_and_none_cells(self, fits_ell_csv, fits_d_csv):
        ell_fits = read_table(fits_ell_csv)
        assert ell_fits.kind == "fits"
        for row in ell_fits.rows:
            assert row["mode"] == "vary-ell"
            assert row["fixed_ell"] is None
            assert isinstance(row["fixed_d"], int)
        d_fits = read_table(fits_d_csv)
        for row in d_fits.rows:
            assert row["fixed_d"] is None
            assert row["fixed_ell"] > 0

    def test_column_accessor(self, avg_csv):
        table = read_table(avg_csv)
        assert len(table.column("mean_nsr")) == 6
        with pytest.raises(SchemaError, match="missing column p_erg"):
            table.column("p_erg")


class TestSchemaDiagnostics:
    def test_missing_column_is_named(self, avg_csv, tmp_path):
        lines = open(avg_csv).read().rstrip("\n").split("\n")
        drop = AVERAGES_COLUMNS.index("std_erg_hat")
        mangled = ["," .join(c for i, c in enumerate(l.split(",")) if i != drop) for l in lines]
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(mangled) + "\n")
        with pytest.raises(SchemaError, match="missing column std_erg_hat"):
            read_table(str(bad))

    def test_unexpected_column_is_named(self, avg_csv, tmp_path):
        lines = open(avg_csv).read().rstrip("\n").split("\n")
        lines[0] += ",comment"
        lines[1:] = [l + ",x" for l in lines[1:]]
        bad = tmp_path / "extra.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="unexpected column comment"):
            read_table(str(bad))

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_table(str(p))

    def test_header_only(self, tmp_path):
        p = tmp_path / "headeronly.csv"
        p.write_text(",".join(AVERAGES_COLUMNS) + "\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_table(str(p))

    def test_short_row_reports_line(self, avg_csv, tmp_path):
        lines = open(avg_csv).read().rstrip("\n").split("\n")
        lines[2] = ",".join(lines[2].split(",")[:-1])
        bad = tmp_path / "short.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match=":3:"):
            read_table(str(bad))


class TestUsableProbability:
    def test_open_interval_only(self):
        assert usable_probability(0.5)
        assert not usable_probability(0.0)
        assert not usable_probability(1.0)
        assert not usable_probability(None)
        assert not usable_probability(math.nan)
