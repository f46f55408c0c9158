"""Table emitters: CSV, JSON and Markdown with one shared cell rendering."""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Iterable

from .ledger import render

FORMATS = ("csv", "json", "md")


def cell(value) -> str:
    """Cell text for CSV / Markdown; JSON keeps the same strings."""
    out = render(value)
    if out is None:
        return ""
    if isinstance(out, bool):
        return "true" if out else "false"
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


class TableEmitter:
    """Streams rows of a fixed column set.

    CSV and Markdown are written row by row; JSON rows are buffered and
    written as one array on ``close`` so the output is always valid JSON.
    """

    def __init__(self, stream: IO[str], columns: Iterable[str], fmt: str = "csv"):
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
        self.stream = stream
        self.columns = list(columns)
        self.fmt = fmt
        self._json_rows: list[dict] = []
        self._writer = None
        self._closed = False
        if fmt == "csv":
            self._writer = csv.writer(stream, lineterminator="\n")
            self._writer.writerow(self.columns)
        elif fmt == "md":
            stream.write("| " + " | ".join(self.columns) + " |\n")
            stream.write("|" + "---|" * len(self.columns) + "\n")

    def write(self, row: dict) -> None:
        if self.fmt == "json":
            self._json_rows.append({k: _json_value(row.get(k)) for k in self.columns} | _extras(row, self.columns))
        elif self.fmt == "csv":
            self._writer.writerow([cell(row.get(k)) for k in self.columns])
        else:
            self.stream.write("| " + " | ".join(cell(row.get(k)).replace("|", "\\|") for k in self.columns) + " |\n")
        self.stream.flush()

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        if self.fmt == "json":
            self.stream.write(dumps(self._json_rows))
        self.stream.flush()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _json_value(value):
    if value is None or isinstance(value, (bool, list, dict)):
        return value
    if isinstance(value, int):
        return value if abs(value) < 2**53 else str(value)
    return render(value)


def _extras(row: dict, columns) -> dict:
    """JSON-only error columns for interval-valued cells."""
    from .intervals import RealApprox

    out = {}
    for k in columns:
        v = row.get(k)
        if isinstance(v, RealApprox):
            out[k + "_err"] = f"{v.err:.3e}"
    return out


def to_text(rows: list[dict], columns, fmt: str) -> str:
    buf = io.StringIO()
    with TableEmitter(buf, columns, fmt) as em:
        for r in rows:
            em.write(r)
    return buf.getvalue()
