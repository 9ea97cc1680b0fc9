"""Render the four figure types from simulation CSV files.

All statistics are read from the input tables; the only arithmetic here is
the axis transforms ln, ln(-ln p), and ln ln ln d. Fit lines and slope
annotations come verbatim from a fits table produced by the simulation CLI,
never from a refit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .tables import Table, read_table, usable_probability

FIGURES = ("averages", "nsr", "tails_vs_d", "tails_vs_ell")
QUANTITIES = ("ergotropy", "entropy")

# d must exceed e^e before ln ln ln d is positive; integer dimensions from
# 16 up qualify
_INSET_MIN_D = 16


@dataclass(frozen=True)
class FigureSpec:
    """One figure request; output format follows the file extension."""

    input_csv: str
    figure: str
    output: str
    overlay_fit: bool = False
    fits_csv: str | None = None
    quantity: str = "ergotropy"

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}")
        ext = self.output.rpartition(".")[2].lower()
        if ext not in ("png", "svg"):
            raise ValueError(f"output extension must be png or svg, got {self.output!r}")
        if self.overlay_fit and self.fits_csv is None:
            raise ValueError("overlay_fit requires fits_csv")


@dataclass(frozen=True)
class RenderResult:
    """What was drawn: per-series point coordinates and fit annotations."""

    output: str
    figure: str
    series: dict[str, list[tuple[float, float]]]
    annotations: list[dict] = field(default_factory=list)

    @property
    def n_series(self) -> int:
        return len(self.series)


def _measures(table: Table) -> list[str]:
    seen = dict.fromkeys(row["measure"] for row in table.rows)
    return list(seen)


def _require_kind(table: Table, figure: str, kind: str) -> None:
    if table.kind != kind:
        raise ValueError(f"figure {figure!r} needs a {kind} table, got {table.kind}")


def _load_fits(spec: FigureSpec) -> list[dict]:
    if not spec.overlay_fit:
        return []
    fits = read_table(spec.fits_csv)
    if fits.kind != "fits":
        raise ValueError(f"fits_csv must hold a fits table, got {fits.kind}")
    return [row for row in fits.rows if row["quantity"] == spec.quantity]


def _averages_like(table: Table, ycol: str, ecol: str, ax, with_inset: bool):
    series: dict[str, list[tuple[float, float]]] = {}
    inset_rows = []
    for measure in _measures(table):
        rows = sorted(
            (r for r in table.rows if r["measure"] == measure and not math.isnan(r[ycol])),
            key=lambda r: r["d"],
        )
        if not rows:
            continue
        xs = [r["d"] for r in rows]
        ys = [r[ycol] for r in rows]
        errs = [r[ecol] for r in rows]
        ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=2, label=measure)
        series[measure] = list(zip(map(float, xs), ys))
        inset_rows += [r for r in rows if r["d"] >= _INSET_MIN_D]
    ax.set_xscale("log")
    ax.set_xlabel("d")
    ax.legend()
    if not with_inset or not inset_rows:
        return series
    sub = ax.inset_axes((0.55, 0.12, 0.4, 0.35))
    for measure in _measures(table):
        rows = sorted((r for r in inset_rows if r["measure"] == measure), key=lambda r: r["d"])
        if not rows:
            continue
        xs = [math.log(r["d"]) for r in rows]
        ys = [r["mean_erg_hat"] * math.log(math.log(math.log(r["d"]))) for r in rows]
        sub.plot(xs, ys, marker=".")
        series[f"inset:{measure}"] = list(zip(xs, ys))
    sub.set_xlabel("ln d", fontsize=7)
    sub.set_ylabel("mean erg * lnlnln d", fontsize=7)
    sub.tick_params(labelsize=6)
    return series


def _tail_series(table: Table, spec: FigureSpec):
    """(measure, d, ell, ln(-ln p)) tuples for the usable grid points."""
    pcol = "p_erg" if spec.quantity == "ergotropy" else "p_ent"
    pts = []
    for row in table.rows:
        if usable_probability(row[pcol]):
            pts.append(
                (row["measure"], row["d"], row["ell"], math.log(-math.log(row[pcol])))
            )
    if not pts:
        raise ValueError("no grid points with 0 < p < 1 to plot")
    return pts


def _overlay_line(ax, fit_row, xs):
    lo, hi = min(xs), max(xs)
    slope, intercept = fit_row["slope"], fit_row["intercept"]
    ax.plot([lo, hi], [slope * lo + intercept, slope * hi + intercept],
            linestyle="--", linewidth=1)
    ax.annotate(f"slope {slope:.3f}", (hi, slope * hi + intercept), fontsize=7)


def _tails_vs_ell(table: Table, spec: FigureSpec, fits, ax):
    pts = _tail_series(table, spec)
    series: dict[str, list[tuple[float, float]]] = {}
    annotations = []
    keys = dict.fromkeys((m, d) for m, d, _, _ in pts)
    for measure, d in keys:
        got = sorted((p[2], p[3]) for p in pts if p[0] == measure and p[1] == d)
        xs = [math.log(ell) for ell, _ in got]
        ys = [y for _, y in got]
        label = f"{measure} d={d}"
        ax.plot(xs, ys, marker="o", label=label)
        series[label] = list(zip(xs, ys))
        for row in fits:
            if row["mode"] == "vary-ell" and row["measure"] == measure and row["fixed_d"] == d:
                _overlay_line(ax, row, xs)
                annotations.append(
                    {"measure": measure, "d": d, "slope": row["slope"],
                     "r_squared": row["r_squared"]}
                )
    ax.set_xlabel("ln ell")
    ax.set_ylabel("ln(-ln P)")
    ax.legend(fontsize=7)
    return series, annotations


def _tails_vs_d(table: Table, spec: FigureSpec, fits, ax):
    pts = _tail_series(table, spec)
    series: dict[str, list[tuple[float, float]]] = {}
    annotations = []
    for measure in dict.fromkeys(p[0] for p in pts):
        mine = [p for p in pts if p[0] == measure]
        all_dims = sorted({p[1] for p in mine})
        for ell in sorted({p[2] for p in mine}):
            at_ell = sorted((p[1], p[3]) for p in mine if p[2] == ell)
            if [d for d, _ in at_ell] != all_dims:
                continue  # a saturated count somewhere; the series would lie
            xs = [math.log(d) for d, _ in at_ell]
            ys = [y for _, y in at_ell]
            label = f"{measure} ell={ell:.6g}"
            ax.plot(xs, ys, marker="o", label=label)
            series[label] = list(zip(xs, ys))
            for row in fits:
                if (
                    row["mode"] == "vary-d"
                    and row["measure"] == measure
                    and row["fixed_ell"] is not None
                    and math.isclose(row["fixed_ell"], ell, rel_tol=1e-9)
                ):
                    _overlay_line(ax, row, xs)
                    annotations.append(
                        {"measure": measure, "ell": ell, "slope": row["slope"],
                         "r_squared": row["r_squared"]}
                    )
    if not series:
        raise ValueError("no ell value is usable at every dimension")
    ax.set_xlabel("ln d")
    ax.set_ylabel("ln(-ln P)")
    ax.legend(fontsize=7)
    return series, annotations


def render(spec: FigureSpec) -> RenderResult:
    """Draw one figure and write it to spec.output."""
    table = read_table(spec.input_csv)
    fits = _load_fits(spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=150)
    annotations: list[dict] = []
    try:
        if spec.figure == "averages":
            _require_kind(table, "averages", "averages")
            ax.set_ylabel("mean normalized ergotropy")
            series = _averages_like(table, "mean_erg_hat", "sem_erg_hat", ax, with_inset=True)
        elif spec.figure == "nsr":
            _require_kind(table, "nsr", "averages")
            ax.set_ylabel("mean noise-to-signal ratio")
            series = _averages_like(table, "mean_nsr", "sem_nsr", ax, with_inset=False)
            if not series:
                raise ValueError("no rows with a defined NSR to plot")
        elif spec.figure == "tails_vs_ell":
            _require_kind(table, "tails_vs_ell", "tails")
            series, annotations = _tails_vs_ell(table, spec, fits, ax)
        else:
            _require_kind(table, "tails_vs_d", "tails")
            series, annotations = _tails_vs_d(table, spec, fits, ax)
        fig.tight_layout()
        fig.savefig(spec.output, metadata={"Date": None} if spec.output.endswith(".svg") else None)
    finally:
        plt.close(fig)
    return RenderResult(
        output=spec.output, figure=spec.figure, series=series, annotations=annotations
    )
