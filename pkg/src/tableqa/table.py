"""Table comprehension: load raw CSV, infer implicit structure, emit an
enriched table.

Every source column keeps its original strings as a ``dimension`` column;
columns recognized as numeric, date, time or score-valued additionally get
derived typed columns (a numeric twin, a date twin, or a three-way score
split).  A synthetic RowID metric encodes body-row order, and rows that
look like "Total" summaries are separated from the body so aggregation
never double-counts them.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .text import normalize, stem
from .values import (
    Date, Empty, Number, RecognizerConfig, Score, Text, Time, TypedValue,
    DEFAULT_RECOGNIZERS, parse_cell, surface_of,
)

log = logging.getLogger(__name__)

ROWID_COLUMN = "_rowid"
TOTAL_WORDS = {"total", "totals", "overall", "sum"}

# Fraction of non-empty cells that must parse for a column to earn a
# derived typed twin.
TYPED_TWIN_THRESHOLD = 0.5


class TableLoadError(Exception):
    """Raised when a CSV file cannot be turned into a RawTable."""


@dataclass(frozen=True)
class RawTable:
    name: str
    header: list[str]
    rows: list[list[str]]


@dataclass(frozen=True)
class ComprehendedColumn:
    id: str
    name: str
    role: str  # dimension | metric | date | time
    values: list[TypedValue]  # indexed by physical row
    origin: str | None = None  # source column id for derived columns
    part: int = 0  # split-part index within the source column


@dataclass(frozen=True)
class ComprehendedTable:
    name: str
    columns: list[ComprehendedColumn]
    body_rows: list[int]  # physical indices of non-Total rows
    total_rows: list[int]

    def column(self, column_id: str) -> ComprehendedColumn:
        for col in self.columns:
            if col.id == column_id:
                return col
        raise KeyError(column_id)

    def has_column(self, column_id: str) -> bool:
        return any(col.id == column_id for col in self.columns)

    def columns_with_role(self, role: str) -> list[ComprehendedColumn]:
        return [col for col in self.columns if col.role == role]


def load_csv(path: str | Path, name: str | None = None) -> RawTable:
    """Read an RFC-4180 CSV file (or a .tsv variant) with a header row.

    Short rows are padded with empty cells and long rows truncated (with a
    warning); rows are never dropped.
    """
    path = Path(path)
    delimiter = "\t" if path.suffix.lower() == ".tsv" else ","
    try:
        with open(path, newline="", encoding="utf-8-sig") as handle:
            reader = csv.reader(handle, delimiter=delimiter)
            records = list(reader)
    except OSError as exc:
        raise TableLoadError(f"cannot read table file {path}: {exc}") from exc
    except csv.Error as exc:
        raise TableLoadError(f"malformed CSV in {path}: {exc}") from exc
    records = [row for row in records if row]
    if not records:
        raise TableLoadError(f"empty table file: {path}")
    header = [cell.strip() for cell in records[0]]
    header = [cell if cell else f"col{i}" for i, cell in enumerate(header)]
    arity = len(header)
    rows = []
    for i, record in enumerate(records[1:]):
        cells = [cell.strip() for cell in record]
        if len(cells) != arity:
            log.warning("row %d of %s has %d cells, expected %d; adjusting",
                        i, path.name, len(cells), arity)
            cells = (cells + [""] * arity)[:arity]
        rows.append(cells)
    return RawTable(name=name or path.stem, header=header, rows=rows)


def _detect_total_rows(raw: RawTable) -> list[int]:
    """A row is a Total row when its first non-empty cell is a total word."""
    found = []
    for i, row in enumerate(raw.rows):
        for cell in row:
            if cell.strip():
                if normalize(cell) in TOTAL_WORDS:
                    found.append(i)
                break
    return found


def _classify(cells: list[str], config: RecognizerConfig) -> str:
    """Decide which derived twin (if any) a source column earns: one of
    'number', 'date', 'time', 'score', 'text'.

    A bare year like "1985" reads as both a date and a number; a column of
    them is a date column only when nothing breaks the pattern, otherwise
    the years count toward a numeric column ([1440, 2400, 250] is money,
    not years).
    """
    parsed = [parse_cell(cell, config) for cell in cells]
    non_empty = [v for v in parsed if not isinstance(v, Empty)]
    if not non_empty:
        return "text"
    score = full_date = bare_year = time = number = 0
    for value in non_empty:
        if isinstance(value, Score):
            score += 1
        elif isinstance(value, Date):
            if value.month is None and value.day is None:
                bare_year += 1
            else:
                full_date += 1
        elif isinstance(value, Time):
            time += 1
        elif isinstance(value, Number):
            number += 1
    total = len(non_empty)
    if score / total >= TYPED_TWIN_THRESHOLD:
        return "score"
    if ((full_date + bare_year) / total >= TYPED_TWIN_THRESHOLD
            and (full_date > 0 or bare_year == total)):
        return "date"
    if time / total >= TYPED_TWIN_THRESHOLD:
        return "time"
    if (number + bare_year) / total >= TYPED_TWIN_THRESHOLD:
        return "number"
    return "text"


def comprehend(raw: RawTable, config: RecognizerConfig = DEFAULT_RECOGNIZERS) -> ComprehendedTable:
    """Enrich a raw table with typed columns, RowID, and Total-row separation."""
    n_rows = len(raw.rows)
    total_rows = _detect_total_rows(raw)
    total_set = set(total_rows)
    body_rows = [i for i in range(n_rows) if i not in total_set]

    columns: list[ComprehendedColumn] = []

    # RowID first: zero-based body order, Empty on total rows.
    rowid_values: list[TypedValue] = [Empty()] * n_rows
    for position, row_index in enumerate(body_rows):
        rowid_values[row_index] = Number(float(position), surface=str(position))
    columns.append(ComprehendedColumn(
        id=ROWID_COLUMN, name="RowID", role="metric", values=rowid_values))

    for k, heading in enumerate(raw.header):
        source_id = f"c{k}"
        cells = [row[k] for row in raw.rows]
        body_cells = [cells[i] for i in body_rows]
        kind = _classify(body_cells, config)
        parsed = [parse_cell(cell, config) for cell in cells]

        # every source column keeps its strings as a dimension
        dim_values: list[TypedValue] = [
            Empty() if not cell.strip() else Text(cell.strip()) for cell in cells]
        columns.append(ComprehendedColumn(
            id=source_id, name=heading, role="dimension", values=dim_values))

        if kind == "number":
            metric_values: list[TypedValue] = []
            for v in parsed:
                if isinstance(v, Number):
                    metric_values.append(v)
                elif isinstance(v, Date) and v.month is None and v.day is None:
                    # bare years in a numeric column carry their value
                    metric_values.append(Number(float(v.year), surface=v.surface))
                else:
                    metric_values.append(Empty())
            columns.append(ComprehendedColumn(
                id=f"{source_id}_num", name=heading, role="metric",
                values=metric_values, origin=source_id, part=1))
        elif kind == "date":
            date_values: list[TypedValue] = [
                v if isinstance(v, Date) else Empty() for v in parsed]
            columns.append(ComprehendedColumn(
                id=f"{source_id}_date", name=heading, role="date",
                values=date_values, origin=source_id, part=1))
        elif kind == "time":
            time_values: list[TypedValue] = [
                v if isinstance(v, Time) else Empty() for v in parsed]
            columns.append(ComprehendedColumn(
                id=f"{source_id}_time", name=heading, role="time",
                values=time_values, origin=source_id, part=1))
        elif kind == "score":
            results: list[TypedValue] = []
            points_for: list[TypedValue] = []
            points_against: list[TypedValue] = []
            for v in parsed:
                if isinstance(v, Score):
                    results.append(Text(v.result) if v.result else Empty())
                    points_for.append(Number(float(v.points_for), surface=str(v.points_for)))
                    points_against.append(Number(float(v.points_against), surface=str(v.points_against)))
                else:
                    results.append(Empty())
                    points_for.append(Empty())
                    points_against.append(Empty())
            columns.append(ComprehendedColumn(
                id=f"{source_id}_res", name=f"{heading} result", role="dimension",
                values=results, origin=source_id, part=1))
            columns.append(ComprehendedColumn(
                id=f"{source_id}_pf", name=f"{heading} points for", role="metric",
                values=points_for, origin=source_id, part=2))
            columns.append(ComprehendedColumn(
                id=f"{source_id}_pa", name=f"{heading} points against", role="metric",
                values=points_against, origin=source_id, part=3))

    return ComprehendedTable(name=raw.name, columns=columns,
                             body_rows=body_rows, total_rows=total_rows)


# ---------------------------------------------------------------------------
# Knowledge base
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeadingRef:
    column: str


@dataclass(frozen=True)
class CellRef:
    column: str
    row: int


Reference = HeadingRef | CellRef


@dataclass
class KnowledgeBase:
    """Index from normalized surface strings to typed table references."""

    entries: dict[str, list[Reference]] = field(default_factory=dict)
    # token -> keys containing that token, for phrase and partial matching
    token_index: dict[str, set[str]] = field(default_factory=dict)
    # stemmed token -> keys, so stemmed lookups need no vocabulary scan
    stem_index: dict[str, set[str]] = field(default_factory=dict)
    token_frequency: dict[str, int] = field(default_factory=dict)
    max_key_tokens: int = 1

    def add(self, surface: str, ref: Reference) -> None:
        key = normalize(surface)
        if not key:
            return
        refs = self.entries.setdefault(key, [])
        if ref not in refs:
            refs.append(ref)
        tokens = key.split()
        self.max_key_tokens = max(self.max_key_tokens, len(tokens))
        for token in tokens:
            self.token_index.setdefault(token, set()).add(key)
            self.stem_index.setdefault(stem(token), set()).add(key)
            self.token_frequency[token] = self.token_frequency.get(token, 0) + 1

    def lookup(self, surface: str) -> list[Reference]:
        return self.entries.get(normalize(surface), [])

    def keys_containing(self, token: str) -> set[str]:
        return self.token_index.get(token, set())

    def keys_with_stem(self, stemmed: str) -> set[str]:
        return self.stem_index.get(stemmed, set())

    def vocabulary(self) -> set[str]:
        return set(self.token_index)


def build_knowledge_base(table: ComprehendedTable) -> KnowledgeBase:
    """Index every column heading and every distinct cell string."""
    kb = KnowledgeBase()
    for col in table.columns:
        kb.add(col.name, HeadingRef(col.id))
    for col in table.columns:
        if col.role != "dimension":
            continue
        for row, value in enumerate(col.values):
            text = surface_of(value)
            if text:
                kb.add(text, CellRef(col.id, row))
    return kb
