"""Figure templates and deterministic vector rendering."""

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  backend must be set first

from .errors import ValidationError  # noqa: E402
from .tables import Table, read_table  # noqa: E402

# identical figures must serialize to identical bytes
matplotlib.rcParams["svg.hashsalt"] = "plotkit"

_RATE_LABEL = "rate (function bits per channel use)"


class Template(NamedTuple):
    x_column: str
    rate_columns: tuple
    x_label: str


TEMPLATES = {
    "mac-sum": Template("K", ("computation", "separation", "cutset"),
                        "number of senders K"),
    "dsbs-orthogonal": Template("alpha", ("hybrid", "separation", "linear", "cutset"),
                                "flip probability alpha"),
    "superposition": Template("h2", ("superposition", "equal_layer", "cutset"),
                              "gain of the second sender h2"),
}

_SAVE_FORMATS = {
    ".svg": {"metadata": {"Date": None}},
    ".pdf": {"metadata": {"CreationDate": None}},
}


@dataclass(frozen=True)
class FigureJob:
    """One rendering request: which CSV, which template, where to."""

    input_csv: str
    template: str
    output: str


def build_figure(table: Table, template_id: str):
    """Plot one line per rate column of ``table``; returns (figure, axes).

    The caller owns the figure and must close it.
    """
    if template_id not in TEMPLATES:
        known = ", ".join(sorted(TEMPLATES))
        raise ValidationError(f"unknown template {template_id!r}; known: {known}")
    template = TEMPLATES[template_id]
    needed = (template.x_column,) + template.rate_columns
    missing = [name for name in needed if name not in table.columns]
    if missing:
        raise ValidationError(
            f"{table.path} is missing columns required by {template_id!r}: "
            + ", ".join(missing))
    x = table.column(template.x_column)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in template.rate_columns:
        ax.plot(x, table.column(name), label=name, linewidth=1.8,
                marker="o", markersize=3)
    ax.set_xlabel(template.x_label)
    ax.set_ylabel(_RATE_LABEL)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig, ax


def render(job: FigureJob) -> Path:
    """Render ``job`` to a vector-image file and return its path."""
    out = Path(job.output)
    if out.suffix not in _SAVE_FORMATS:
        known = ", ".join(sorted(_SAVE_FORMATS))
        raise ValidationError(f"unsupported output format {out.suffix!r}; known: {known}")
    table = read_table(job.input_csv)
    fig, _ = build_figure(table, job.template)
    try:
        fig.savefig(out, format=out.suffix[1:], **_SAVE_FORMATS[out.suffix])
    finally:
        plt.close(fig)
    return out
