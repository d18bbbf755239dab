"""Reading CSV tables that carry ``# key=value`` metadata comments."""

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError


@dataclass(frozen=True)
class Table:
    """One parsed CSV file: metadata comments, header, numeric columns."""

    path: str
    meta: dict
    columns: tuple
    data: dict

    @property
    def n_rows(self) -> int:
        return len(self.data[self.columns[0]]) if self.columns else 0

    def column(self, name: str):
        return self.data[name]


def read_table(path) -> Table:
    """Parse a CSV file into a :class:`Table`.

    Lines starting with ``#`` are metadata comments; ``key=value`` ones
    land in ``meta``.  The first non-comment line is the header, every
    later line one numeric row.  The file is only read, never written.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"input CSV not found: {path}")
    comments = []
    body = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            comments.append(line.lstrip("#").strip())
        elif line.strip():
            body.append(line)
    meta = {}
    for text in comments:
        if "=" in text:
            key, _, value = text.partition("=")
            meta[key.strip()] = value.strip()
    rows = list(csv.reader(body))
    if not rows:
        raise ValidationError(f"no header row in {path}")
    header = tuple(name.strip() for name in rows[0])
    if len(set(header)) != len(header):
        raise ValidationError(f"duplicate column names in {path}: {header}")
    data = {name: [] for name in header}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"{path}: row {lineno} has {len(row)} fields, header has {len(header)}")
        for name, field in zip(header, row):
            try:
                data[name].append(float(field))
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: row {lineno}, column {name!r}: "
                    f"{field!r} is not a number") from exc
    if not data[header[0]]:
        raise ValidationError(f"no data rows in {path}")
    return Table(str(path), meta, header, data)
