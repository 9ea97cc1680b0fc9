"""CSV readers for the three table kinds the plotting scripts accept.

The column lists are the interchange contract with the simulation CLI and
are spelled out here on purpose: this package reads files, not the library
that wrote them, so the schema must stand on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

AVERAGES_COLUMNS = (
    "measure",
    "d",
    "n_samples",
    "mean_erg_hat",
    "sem_erg_hat",
    "std_erg_hat",
    "mean_entropy_hat",
    "sem_entropy_hat",
    "mean_nsr",
    "sem_nsr",
    "n_nsr_undefined",
    "mean_energy_hat",
)

TAILS_COLUMNS = AVERAGES_COLUMNS + ("ell", "count_erg", "p_erg", "count_ent", "p_ent")

FITS_COLUMNS = (
    "measure",
    "mode",
    "quantity",
    "fixed_d",
    "fixed_ell",
    "slope",
    "intercept",
    "r_squared",
    "n_points",
)

_SCHEMAS = {
    "tails": TAILS_COLUMNS,
    "averages": AVERAGES_COLUMNS,
    "fits": FITS_COLUMNS,
}

_INT_COLUMNS = frozenset(
    ("d", "n_samples", "n_nsr_undefined", "count_erg", "count_ent", "fixed_d", "n_points")
)
_STR_COLUMNS = frozenset(("measure", "mode", "quantity"))


class SchemaError(ValueError):
    """The file does not match any table this package knows how to plot."""


@dataclass(frozen=True)
class Table:
    kind: str
    columns: tuple[str, ...]
    rows: tuple[dict, ...]

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise SchemaError(f"missing column {name}")
        return [row[name] for row in self.rows]


def _parse_cell(name: str, cell: str):
    if name in _STR_COLUMNS:
        return cell
    if cell == "":
        return None
    if name in _INT_COLUMNS:
        return int(cell)
    return float(cell)


def _identify(header: tuple[str, ...]) -> str:
    for kind, columns in _SCHEMAS.items():
        if header == columns:
            return kind
    # diagnose against the closest schema by symmetric column difference
    best_kind = min(
        _SCHEMAS, key=lambda k: len(set(header) ^ set(_SCHEMAS[k]))
    )
    missing = [c for c in _SCHEMAS[best_kind] if c not in header]
    if missing:
        raise SchemaError(
            f"header does not match the {best_kind} schema: missing column "
            + ", ".join(missing)
        )
    extra = [c for c in header if c not in _SCHEMAS[best_kind]]
    raise SchemaError(
        f"header does not match the {best_kind} schema: unexpected column "
        + ", ".join(extra)
    )


def read_table(path: str) -> Table:
    """Parse a CSV written by the simulation CLI; the header decides the kind."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().split("\n") if line]
    if not lines:
        raise SchemaError(f"{path} is empty")
    header = tuple(lines[0].split(","))
    kind = _identify(header)
    if len(lines) == 1:
        raise SchemaError(f"{path} has no data rows")
    rows = []
    for num, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(
                f"{path}:{num}: expected {len(header)} cells, found {len(cells)}"
            )
        try:
            rows.append({n: _parse_cell(n, c) for n, c in zip(header, cells)})
        except ValueError as exc:
            raise SchemaError(f"{path}:{num}: {exc}") from None
    return Table(kind=kind, columns=header, rows=tuple(rows))


def usable_probability(p: float | None) -> bool:
    """Only 0 < p < 1 survives the ln(-ln p) axis transform."""
    return p is not None and not math.isnan(p) and 0.0 < p < 1.0
