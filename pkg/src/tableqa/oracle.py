"""Brute-force reference executor.

A deliberately naive, independent evaluation of query plans over small
tables (<= 50 rows), used only to cross-check the real executor.  It
shares the plan and value datatypes but none of the execution code: row
scans are plain loops and comparisons are re-derived from the raw values.
"""

from __future__ import annotations

import re

from .executor import ExecResult, QueryPlan, Stage
from .grammar import CompareFilter, DateRange, EqualsFilter, PositionFilter
from .table import ComprehendedTable
from .values import Date, Empty, Number, Text, Time, TypedValue


def _canon_text(text: str) -> str:
    words = re.sub(r"\s+", " ", text.strip().lower()).split(" ")
    cleaned = []
    for word in words:
        word = re.sub(r"^\W+|\W+$", "", word)
        if word:
            cleaned.append(word)
    return " ".join(cleaned)


def _value_text(value: TypedValue) -> str:
    if isinstance(value, Text):
        return value.value
    if isinstance(value, Number):
        return value.surface or str(value.value)
    if isinstance(value, (Date, Time)):
        return value.surface
    if isinstance(value, Empty):
        return ""
    return value.surface


def _value_number(value: TypedValue):
    if isinstance(value, Number):
        return value.value
    if isinstance(value, Time):
        return value.seconds
    return None


def _value_key(value: TypedValue):
    if isinstance(value, Number):
        return value.value
    if isinstance(value, Date):
        return (value.year or 0, value.month or 0, value.day or 0)
    if isinstance(value, Time):
        return value.seconds
    return _canon_text(_value_text(value))


def _column_values(table: ComprehendedTable, column: str):
    for col in table.columns:
        if col.id == column:
            return col.values
    return None


def _passes_date(value: TypedValue, date_range: DateRange) -> bool:
    if not isinstance(value, Date):
        return False

    def prefix(date: Date, parts: int):
        components = [date.year, date.month, date.day][:parts]
        return None if any(c is None for c in components) else tuple(components)

    def granularity(date: Date) -> int:
        if date.day is not None:
            return 3
        if date.month is not None:
            return 2
        return 1

    if date_range.start is not None:
        n = granularity(date_range.start)
        mine = prefix(value, n)
        bound = prefix(date_range.start, n)
        if mine is None:
            return False
        if date_range.start_inclusive:
            if mine < bound:
                return False
        elif mine <= bound:
            return False
    if date_range.end is not None:
        n = granularity(date_range.end)
        mine = prefix(value, n)
        bound = prefix(date_range.end, n)
        if mine is None:
            return False
        if date_range.end_inclusive:
            if mine > bound:
                return False
        elif mine >= bound:
            return False
    return True


def _row_passes(table: ComprehendedTable, row: int, f) -> bool:
    if isinstance(f, EqualsFilter):
        values = _column_values(table, f.column)
        if values is None:
            return False
        value = values[row]
        if isinstance(value, Empty):
            return False
        return _canon_text(_value_text(value)) == _canon_text(f.value)
    if isinstance(f, CompareFilter):
        values = _column_values(table, f.column)
        if values is None:
            return False
        number = _value_number(values[row])
        if number is None:
            return False
        if f.op == ">":
            return number > f.bound
        if f.op == ">=":
            return number >= f.bound
        if f.op == "<":
            return number < f.bound
        if f.op == "<=":
            return number <= f.bound
        if f.op == "==":
            return number == f.bound
        if f.op == "!=":
            return number != f.bound
    return False


def _oracle_stage_rows(stage: Stage, table: ComprehendedTable) -> list[int] | None:
    """Surviving row indices, or None when the stage references a column
    the table does not have."""
    simple = [f for f in stage.filters if not isinstance(f, PositionFilter)]
    positional = [f for f in stage.filters if isinstance(f, PositionFilter)]
    for f in simple:
        if _column_values(table, f.column) is None:
            return None

    rows = []
    for row in table.body_rows:
        if all(_row_passes(table, row, f) for f in simple):
            rows.append(row)

    if stage.date_range is not None:
        date_cols = [c for c in table.columns if c.role == "date"]
        if not date_cols:
            return []
        values = date_cols[0].values
        rows = [r for r in rows if _passes_date(values[r], stage.date_range)]

    for f in positional:
        if f.relation == "first":
            rows = rows[:1]
            continue
        if f.relation == "last":
            rows = rows[-1:]
            continue
        if isinstance(f.anchor, EqualsFilter) and _column_values(table, f.anchor.column) is None:
            return None
        anchors = [r for r in rows if _row_passes(table, r, f.anchor)]
        step = 1 if f.relation in ("after", "next") else -1
        picked = []
        for anchor in anchors:
            where = rows.index(anchor) + step
            if 0 <= where < len(rows):
                candidate = rows[where]
                if candidate not in anchors and candidate not in picked:
                    picked.append(candidate)
        rows = picked

    if stage.sort is not None:
        column, direction = stage.sort
        values = _column_values(table, column)
        if values is None:
            return None
        keyed = [(r, _value_key(values[r])) for r in rows
                 if not isinstance(values[r], Empty)]
        empties = [r for r in rows if isinstance(values[r], Empty)]
        # selection sort keeps this independent of list.sort internals
        ordered = []
        remaining = list(keyed)
        while remaining:
            best = 0
            for i in range(1, len(remaining)):
                if direction == "desc":
                    if remaining[i][1] > remaining[best][1]:
                        best = i
                else:
                    if remaining[i][1] < remaining[best][1]:
                        best = i
            ordered.append(remaining.pop(best)[0])
        rows = ordered + empties

    if stage.limit is not None:
        rows = rows[: stage.limit]
    return rows


def _oracle_stage_values(stage: Stage, table: ComprehendedTable) -> list[list[TypedValue]]:
    rows = _oracle_stage_rows(stage, table)
    if rows is None:
        return []
    if stage.aggregate is not None:
        op, column = stage.aggregate
        values = _column_values(table, column)
        if values is None:
            return []
        if op == "count":
            return [[Number(float(len(rows)), surface=str(len(rows)))]]
        if op == "count-distinct":
            distinct = []
            for r in rows:
                if isinstance(values[r], Empty):
                    continue
                key = _value_key(values[r])
                if key not in distinct:
                    distinct.append(key)
            return [[Number(float(len(distinct)), surface=str(len(distinct)))]]
        numbers = [(r, _value_number(values[r])) for r in rows]
        numbers = [(r, v) for r, v in numbers if v is not None]
        if not numbers:
            return []
        if op == "sum":
            total = 0.0
            for _, v in numbers:
                total += v
            return [[Number(total, surface=f"{total:g}")]]
        if op == "average":
            total = 0.0
            for _, v in numbers:
                total += v
            mean = total / len(numbers)
            return [[Number(mean, surface=f"{mean:g}")]]
        if op in ("max", "min"):
            best_row, best = numbers[0]
            for r, v in numbers[1:]:
                if (op == "max" and v > best) or (op == "min" and v < best):
                    best_row, best = r, v
            return [[values[best_row]]]
        return []
    column = stage.project
    if column is None:
        for col in table.columns:
            if col.role == "dimension" and col.id != "_rowid":
                column = col.id
                break
        else:
            column = table.columns[0].id
    values = _column_values(table, column)
    if values is None:
        return []
    return [[values[r]] for r in rows]


def oracle_execute(plan: QueryPlan, table: ComprehendedTable) -> ExecResult:
    """Evaluate a plan by exhaustive scanning.  Tables must be small."""
    if len(table.body_rows) > 50:
        raise ValueError("oracle_execute is for tables of at most 50 rows")
    result = ExecResult()

    if plan.feed is None:
        result.rows = _oracle_stage_values(plan.outer, table)
        return result

    if plan.feed == "subtract":
        a = None
        for row in _oracle_stage_values(plan.inner, table):
            if _value_number(row[0]) is not None:
                a = _value_number(row[0])
                break
        b = None
        for row in _oracle_stage_values(plan.outer, table):
            if _value_number(row[0]) is not None:
                b = _value_number(row[0])
                break
        if a is None or b is None:
            return result
        diff = a - b if a >= b else b - a
        result.rows = [[Number(diff, surface=f"{diff:g}")]]
        return result

    if plan.feed == "match_value":
        anchor = None
        for row in _oracle_stage_values(plan.inner, table):
            if not isinstance(row[0], Empty):
                anchor = row[0]
                break
        if anchor is None:
            return result
        base = _oracle_stage_rows(Stage(filters=plan.outer.filters,
                                        date_range=plan.outer.date_range), table)
        if base is None:
            return result
        compare = _column_values(table, plan.feed_column)
        if compare is None:
            return result
        keep = []
        for r in base:
            value = compare[r]
            if isinstance(value, Empty):
                continue
            if _value_key(value) != _value_key(anchor):
                continue
            if any(_row_passes(table, r, ex) for ex in plan.exclude):
                continue
            keep.append(r)
        project = _column_values(table, plan.outer.project) if plan.outer.project else None
        if project is None:
            return result
        result.rows = [[project[r]] for r in keep]
        return result

    if plan.feed == "intersect":
        left = _oracle_stage_values(plan.inner, table)
        right = _oracle_stage_values(plan.outer, table)
        right_keys = []
        for row in right:
            if not isinstance(row[0], Empty):
                right_keys.append(_value_key(row[0]))
        out = []
        seen = []
        for row in left:
            if isinstance(row[0], Empty):
                continue
            key = _value_key(row[0])
            if key in right_keys and key not in seen:
                seen.append(key)
                out.append(row)
        result.rows = out
        return result

    if plan.feed == "alternatives":
        out = []
        for alt in plan.alternatives:
            stage = Stage(filters=(alt, *plan.outer.filters),
                          date_range=plan.outer.date_range)
            rows = _oracle_stage_rows(stage, table)
            if rows:
                value = _column_values(table, alt.column)[rows[0]]
                if not isinstance(value, Empty):
                    out.append([value])
        result.rows = out
        return result

    raise ValueError(f"unknown plan feed {plan.feed!r}")
