"""Figure rendering for rate-sweep CSV tables.

The sibling computation package writes CSV files (header comments with
the full run config, one header row, numeric rows); this package turns
them into vector figures and knows nothing else about where the numbers
came from.
"""

from .errors import ValidationError
from .figures import TEMPLATES, FigureJob, build_figure, render
from .tables import Table, read_table

__all__ = [
    "FigureJob",
    "TEMPLATES",
    "Table",
    "ValidationError",
    "build_figure",
    "read_table",
    "render",
]
