"""Long-format CSV export of the plot tables stored in a result bundle.

Nothing is recomputed on export: the CSV rows are the bundle's stored rows.
"""

from __future__ import annotations

import os

from .errors import DataQualityError
from .io import write_curves

# figure id -> pipeline whose bundle carries the table
FIGURES = {
    "1f": "resonance",
    "2c": "flux",
    "3a": "flux",
    "3b": "thermal",
    "3c": "thermal",
    "4b": "kerr",
    "4c": "kerr",
    "4d": "kerr",
    "S5": "thermal",
    "S8": "thermal",
    "S9": "thermal",
    "S10": "thermal",
    "S11": "flux",
    "S12": "flux",
}


class UnknownFigureError(ValueError):
    pass


def _cell(v):
    if v is None:
        return ""
    return v


def emit_plot_data(bundle, figure: str, out_dir) -> str:
    """Write ``fig_<id>.csv`` from ``bundle['plots'][figure]``; returns the path."""
    if figure not in FIGURES:
        raise UnknownFigureError(f"unknown figure id {figure!r}; valid ids: {', '.join(FIGURES)}")
    plots = bundle.get("plots", {})
    if figure not in plots:
        have = sorted(k for k in plots if k in FIGURES)
        raise DataQualityError(
            f"bundle from the {bundle.get('pipeline')!r} pipeline has no data for figure {figure}; "
            f"it needs a {FIGURES[figure]!r} bundle (this one has: {', '.join(have) or 'none'})")
    table = plots[figure]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"fig_{figure}.csv")
    write_curves(path, table["columns"], ([_cell(c) for c in r] for r in table["rows"]))
    return path
