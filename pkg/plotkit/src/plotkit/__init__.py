"""Figure scripts for the simulation CSV schema."""
from .figures import FIGURES, QUANTITIES, FigureSpec, RenderResult, render
from .tables import (
    AVERAGES_COLUMNS,
    FITS_COLUMNS,
    TAILS_COLUMNS,
    SchemaError,
    Table,
    read_table,
)

__version__ = "0.1.0"

__all__ = [
    "AVERAGES_COLUMNS",
    "FIGURES",
    "FITS_COLUMNS",
    "FigureSpec",
    "QUANTITIES",
    "RenderResult",
    "SchemaError",
    "TAILS_COLUMNS",
    "Table",
    "read_table",
    "render",
]
