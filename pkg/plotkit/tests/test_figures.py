from __future__ import annotations

import hashlib
import math

import pytest

import plotkit.cli
from plotkit.figures import FigureSpec, render
from plotkit.tables import read_table


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


class TestFigureSpec:
    def test_validation(self, avg_csv):
        with pytest.raises(ValueError, match="figure"):
            FigureSpec(avg_csv, "histogram", "x.png")
        with pytest.raises(ValueError, match="extension"):
            FigureSpec(avg_csv, "averages", "x.pdf")
        with pytest.raises(ValueError, match="quantity"):
            FigureSpec(avg_csv, "tails_vs_ell", "x.png", quantity="energy")
        with pytest.raises(ValueError, match="fits_csv"):
            FigureSpec(avg_csv, "averages", "x.png", overlay_fit=True)


class TestAverages:
    def test_two_series_with_inset(self, avg_csv, tmp_path):
        out = str(tmp_path / "avg.png")
        res = render(FigureSpec(avg_csv, "averages", out))
        assert res.output == out
        with open(out, "rb") as fh:
            assert fh.read(8).startswith(b"\x89PNG")
        assert set(res.series) == {
            "hilbert_schmidt", "bures", "inset:hilbert_schmidt", "inset:bures",
        }
        # main series carries the raw CSV values
        table = read_table(avg_csv)
        hs = {r["d"]: r["mean_erg_hat"] for r in table.rows if r["measure"] == "hilbert_schmidt"}
        assert res.series["hilbert_schmidt"] == [(float(d), hs[d]) for d in sorted(hs)]
        # the inset applies only the nested-log transform
        x, y = res.series["inset:hilbert_schmidt"][0]
        assert x == pytest.approx(math.log(16), abs=1e-12)
        assert y == pytest.approx(hs[16] * math.log(math.log(math.log(16))), abs=1e-12)

    def test_no_inset_below_d16(self, avg_csv, tmp_path):
        lines = open(avg_csv).read().rstrip("\n").split("\n")
        small = [lines[0]] + [l for l in lines[1:] if l.split(",")[1] == "8"]
        path = tmp_path / "small.csv"
        path.write_text("\n".join(small) + "\n")
        res = render(FigureSpec(str(path), "averages", str(tmp_path / "s.png")))
        assert set(res.series) == {"hilbert_schmidt", "bures"}

    def test_nsr_series(self, avg_csv, tmp_path):
        res = render(FigureSpec(avg_csv, "nsr", str(tmp_path / "nsr.png")))
        table = read_table(avg_csv)
        want = [
            (float(r["d"]), r["mean_nsr"])
            for r in table.rows
            if r["measure"] == "bures"
        ]
        assert res.series["bures"] == sorted(want)


class TestTailsFigures:
    def test_vs_ell_annotations_match_fit_output(self, tails_csv, fits_ell_csv, tmp_path):
        res = render(
            FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "t.png"),
                       overlay_fit=True, fits_csv=fits_ell_csv)
        )
        assert len(res.series) == 3
        fits = {
            row["fixed_d"]: row["slope"]
            for row in read_table(fits_ell_csv).rows
            if row["quantity"] == "ergotropy"
        }
        assert len(res.annotations) == 3
        for note in res.annotations:
            assert abs(note["slope"] - fits[note["d"]]) <= 1e-9
            assert note["slope"] > 0

    def test_vs_ell_point_transform(self, tails_csv, tmp_path):
        res = render(FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "t2.png")))
        table = read_table(tails_csv)
        usable = [r for r in table.rows if r["d"] == 8 and 0 < r["p_erg"] < 1]
        want = sorted(
            (math.log(r["ell"]), math.log(-math.log(r["p_erg"]))) for r in usable
        )
        assert res.series["bures d=8"] == want

    def test_vs_ell_entropy_quantity(self, tails_csv, fits_ell_csv, tmp_path):
        res = render(
            FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "t3.png"),
                       overlay_fit=True, fits_csv=fits_ell_csv, quantity="entropy")
        )
        fits = {
            row["fixed_d"]: row["slope"]
            for row in read_table(fits_ell_csv).rows
            if row["quantity"] == "entropy"
        }
        for note in res.annotations:
            assert abs(note["slope"] - fits[note["d"]]) <= 1e-9

    def test_vs_d_annotation_at_selected_ell(self, tails_csv, fits_d_csv, tmp_path):
        res = render(
            FigureSpec(tails_csv, "tails_vs_d", str(tmp_path / "d.png"),
                       overlay_fit=True, fits_csv=fits_d_csv)
        )
        assert res.series
        (fit_row,) = [
            r for r in read_table(fits_d_csv).rows if r["quantity"] == "ergotropy"
        ]
        match = [n for n in res.annotations if math.isclose(n["ell"], fit_row["fixed_ell"], rel_tol=1e-9)]
        assert len(match) == 1
        assert abs(match[0]["slope"] - fit_row["slope"]) <= 1e-9

    def test_svg_output(self, tails_csv, tmp_path):
        out = str(tmp_path / "t.svg")
        render(FigureSpec(tails_csv, "tails_vs_ell", out))
        with open(out) as fh:
            assert fh.read(100).lstrip().startswith("<?xml")


class TestRenderingContract:
    def test_read_only_and_deterministic(self, tails_csv, fits_ell_csv, tmp_path):
        before = sha(tails_csv), sha(fits_ell_csv)
        spec = FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "a.png"),
                          overlay_fit=True, fits_csv=fits_ell_csv)
        first = render(spec)
        second = render(FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "b.png"),
                                   overlay_fit=True, fits_csv=fits_ell_csv))
        assert first.series == second.series
        assert first.annotations == second.annotations
        assert (sha(tails_csv), sha(fits_ell_csv)) == before

    def test_kind_mismatch_errors(self, avg_csv, tails_csv, tmp_path):
        with pytest.raises(ValueError, match="needs a tails table"):
            render(FigureSpec(avg_csv, "tails_vs_ell", str(tmp_path / "x.png")))
        with pytest.raises(ValueError, match="needs a averages table"):
            render(FigureSpec(tails_csv, "averages", str(tmp_path / "y.png")))
        with pytest.raises(ValueError, match="fits table"):
            render(FigureSpec(tails_csv, "tails_vs_ell", str(tmp_path / "z.png"),
                              overlay_fit=True, fits_csv=avg_csv))


class TestCli:
    def test_end_to_end(self, tails_csv, fits_ell_csv, tmp_path, capsys):
        out = str(tmp_path / "fig.png")
        code = plotkit.cli.main([
            "--in", tails_csv, "--figure", "tails_vs_ell", "--out", out,
            "--overlay-fit", "--fits", fits_ell_csv,
        ])
        assert code == 0
        cap = capsys.readouterr()
        assert "wrote" in cap.out
        assert "slope" in cap.out

    def test_error_exit(self, tmp_path, capsys):
        code = plotkit.cli.main([
            "--in", str(tmp_path / "missing.csv"), "--figure", "averages",
            "--out", str(tmp_path / "x.png"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err
