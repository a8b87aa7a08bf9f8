"""Report tables and their text, CSV and JSON renderings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

# cell flags
EXACT = "exact"
LOWER_BOUND = "lower-bound"
BOUND = "bound"
CLAMPED = "clamped"
UNVERIFIED = "unverified-bound"
REFERENCE = "reference"
INPUT = "input"
FLAGS = (EXACT, LOWER_BOUND, BOUND, CLAMPED, UNVERIFIED, REFERENCE, INPUT)

DIGITS = 6
DAGGER = "†"


@dataclass(frozen=True)
class Cell:
    """A numeric value with its flag, or a bare text value."""

    value: float | str | None
    flag: str | None = None
    raw: float | None = None

    def __post_init__(self):
        numeric = isinstance(self.value, (int, float)) and not isinstance(self.value, bool)
        if numeric and self.flag not in FLAGS:
            raise ValueError(f"numeric cell needs one of the flags {FLAGS}, got {self.flag!r}")
        if numeric:
            object.__setattr__(self, "value", float(self.value))

    @property
    def numeric(self) -> bool:
        return isinstance(self.value, float)

    def text(self, digits: int = DIGITS) -> str:
        if self.value is None:
            return "-"
        if not self.numeric:
            return str(self.value)
        s = fmt_number(self.value, digits)
        return s + DAGGER if self.flag == CLAMPED else s


def fmt_number(x: float, digits: int = DIGITS) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}f}"


def fmt_step(n) -> str:
    return "inf" if n == math.inf else str(int(n))


def bound_cell(value: float, raw: float, unverified: bool = False) -> Cell:
    if unverified:
        return Cell(value, UNVERIFIED, raw)
    return Cell(value, CLAMPED if raw > value else BOUND, raw)


@dataclass
class Row:
    name: str
    cells: list[Cell]


@dataclass
class ReportTable:
    title: str
    columns: list[str]
    rows: list[Row] = field(default_factory=list)
    summary: list[Row] = field(default_factory=list)
    summary_columns: list[str] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)

    def add(self, name: str, cells) -> None:
        cells = list(cells)
        if len(cells) != len(self.columns):
            raise ValueError(f"row {name!r} has {len(cells)} cells for {len(self.columns)} columns")
        self.rows.append(Row(name, cells))

    def add_summary(self, name: str, *cells: Cell) -> None:
        self.summary.append(Row(name, list(cells)))

    def row(self, name: str) -> Row:
        for r in self.rows + self.summary:
            if r.name == name:
                return r
        raise KeyError(name)

    def value(self, name: str, column: str | None = None) -> float | str | None:
        r = self.row(name)
        if column is None:
            return r.cells[0].value
        return r.cells[self.columns.index(column)].value

    def has_clamped(self) -> bool:
        return any(c.flag == CLAMPED for r in self.rows + self.summary for c in r.cells)

    # -- renderings --

    def render(self, digits: int = DIGITS) -> str:
        out = [self.title, "=" * len(self.title)]
        if self.summary:
            width = max(len(r.name) for r in self.summary)
            if self.summary_columns:
                out.append(" " * width + "  " + "  ".join(self.summary_columns))
            for r in self.summary:
                vals = "  ".join(f"{c.text(digits)} [{c.flag}]" if c.numeric else c.text(digits)
                                 for c in r.cells)
                out.append(f"{r.name:<{width}}  {vals}")
            out.append("")
        if self.rows:
            texts = [[c.text(digits) for c in r.cells] for r in self.rows]
            name_w = max(len(r.name) for r in self.rows)
            col_w = [max([len(h)] + [len(t[j]) for t in texts]) for j, h in enumerate(self.columns)]
            flag_w = max(len(_row_flag(r)) for r in self.rows)
            header = f"{'':<{name_w}}  " + "  ".join(f"{h:>{w}}" for h, w in zip(self.columns, col_w))
            out.append(header + ("  flag" if flag_w else ""))
            out.append("-" * (len(header) + (6 if flag_w else 0)))
            for r, t in zip(self.rows, texts):
                line = f"{r.name:<{name_w}}  " + "  ".join(f"{s:>{w}}" for s, w in zip(t, col_w))
                out.append(line + (f"  {_row_flag(r)}" if flag_w else ""))
        notes = list(self.annotations)
        if self.has_clamped():
            notes.append(f"{DAGGER} bound clamped to 1; the closed form exceeds 1 (raw value in JSON output)")
        if notes:
            out.append("")
            out += [f"note: {a}" for a in notes]
        return "\n".join(out) + "\n"

    def to_records(self) -> list[dict]:
        recs = []
        for section, rows, cols in (("summary", self.summary, self.summary_columns),
                                    ("table", self.rows, self.columns)):
            for r in rows:
                for j, c in enumerate(r.cells):
                    col = cols[j] if j < len(cols) else ""
                    recs.append({"table": self.title, "section": section, "row": r.name,
                                 "column": col, "value": c.value, "flag": c.flag})
        return recs

    def to_csv(self, digits: int = DIGITS) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table", "section", "row", "column", "value", "flag"])
        for rec in self.to_records():
            v = rec["value"]
            v = fmt_number(v, digits) if isinstance(v, float) else ("" if v is None else v)
            w.writerow([rec["table"], rec["section"], rec["row"], rec["column"], v, rec["flag"] or ""])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        def enc(v):
            return fmt_step(v) if isinstance(v, float) and math.isinf(v) else v

        def cell(c):
            d = {"value": enc(c.value), "flag": c.flag}
            if c.raw is not None:
                d["raw"] = c.raw
            return d

        return {
            "title": self.title,
            "columns": self.columns,
            "summary_columns": self.summary_columns,
            "summary": [{"name": r.name, "cells": [cell(c) for c in r.cells]}
                        for r in self.summary],
            "rows": [{"name": r.name, "cells": [cell(c) for c in r.cells]}
                     for r in self.rows],
            "annotations": self.annotations,
        }


def _row_flag(r: Row) -> str:
    flags = sorted({c.flag for c in r.cells if c.numeric})
    return "/".join(flags)


def write_outputs(tables: list[ReportTable], csv_path=None, json_path=None) -> None:
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            for k, t in enumerate(tables):
                text = t.to_csv()
                if k:
                    text = text.split("\n", 1)[1]
                fh.write(text)
    if json_path:
        payload = {"tables": [t.to_json_dict() for t in tables]}
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, default=str)
            fh.write("\n")
