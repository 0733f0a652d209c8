"""Versioned CSV output.

Plain RFC-4180 files: comma separated, CRLF rows, minimal quoting,
'.' decimal point via repr.  Every file starts with a header row whose
first two columns are schema_version and config_hash, and every data
row repeats both values, so a single row stays self-describing after
any long-format concatenation.
"""

from __future__ import annotations

import csv

__all__ = ["write_csv", "read_csv"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # plain builtin repr even for numpy scalars
        return repr(float(value))
    return str(value)


def write_csv(path, schema_version: str, config_hash: str, columns, rows) -> None:
    """Write rows (sequences matching `columns`) under the versioned header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["schema_version", "config_hash", *columns])
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(
                    f"row has {len(row)} cells, schema {schema_version} "
                    f"expects {len(columns)}")
            writer.writerow([schema_version, config_hash,
                             *[_cell(v) for v in row]])


def read_csv(path):
    """Header list and row dicts; every row keeps its schema columns."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV")
        rows = [dict(zip(header, row)) for row in reader]
    return header, rows
