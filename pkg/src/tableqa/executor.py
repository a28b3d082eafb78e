"""Query planning and execution over comprehended tables.

A completed semantic parse becomes a QueryPlan of at most two stages
(one optional inner stage feeding the outer one), evaluated by an
in-memory typed-column engine.  Aggregation runs over body rows only, so
detected Total rows are never double-counted.  Comparisons are typed:
numbers numerically, dates chronologically, text through the shared
normalizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import (
    CompareFilter, DateRange, EqualsFilter, Filter, PositionFilter,
    SemanticParse,
)
from .qtypes import QuestionType
from .table import ComprehendedTable, ROWID_COLUMN
from .text import normalize
from .values import Date, Empty, Number, TypedValue, numeric_of, surface_of


class PlanError(Exception):
    """A parse is not complete enough to execute."""


@dataclass(frozen=True)
class Stage:
    filters: tuple[Filter, ...] = ()
    date_range: DateRange | None = None
    aggregate: tuple[str, str] | None = None  # (op, column)
    sort: tuple[str, str] | None = None  # (column, asc|desc)
    limit: int | None = None
    project: str | None = None


@dataclass(frozen=True)
class QueryPlan:
    table: str
    kind: QuestionType
    outer: Stage
    inner: Stage | None = None
    # how the inner stage feeds the outer one
    feed: str | None = None  # subtract | match_value | intersect | alternatives
    feed_column: str | None = None  # compared column for match_value
    exclude: tuple[Filter, ...] = ()  # anchor rows excluded by match_value
    alternatives: tuple[Filter, ...] = ()  # the two A-or-B filters


@dataclass
class ExecResult:
    rows: list[list[TypedValue]] = field(default_factory=list)
    cells: list[tuple[str, int]] = field(default_factory=list)
    diagnostic: str | None = None


@dataclass(frozen=True)
class Answer:
    kind: str  # scalar | list | boolean | none
    values: tuple[TypedValue, ...] = ()
    cells: tuple[tuple[str, int], ...] = ()
    plan: QueryPlan | None = None
    diagnostic: str | None = None

    @classmethod
    def none(cls, plan: QueryPlan | None = None, diagnostic: str | None = None) -> "Answer":
        return cls(kind="none", plan=plan, diagnostic=diagnostic)

    def as_strings(self) -> list[str]:
        return [surface_of(v) for v in self.values]


# ---------------------------------------------------------------------------
# Plan construction
# ---------------------------------------------------------------------------

def _require(parse: SemanticParse, slot: str, present: bool) -> None:
    if not present:
        raise PlanError(f"parse is missing its {slot} operand")


def _projection_dimension(parse: SemanticParse) -> str:
    _require(parse, "dimension", bool(parse.dimensions))
    if parse.projection and parse.projection in parse.dimensions:
        return parse.projection
    return parse.dimensions[0]


def _split_filters(parse: SemanticParse) -> tuple[list[EqualsFilter], list[Filter]]:
    equals = [f for f in parse.filters if isinstance(f, EqualsFilter)]
    rest = [f for f in parse.filters if not isinstance(f, EqualsFilter)]
    return equals, rest


def _first_last_sort_column(table: ComprehendedTable) -> str:
    temporal = [c for c in table.columns if c.role in ("date", "time")]
    if len(temporal) == 1:
        return temporal[0].id
    return ROWID_COLUMN


def build_plan(parse: SemanticParse, table: ComprehendedTable) -> QueryPlan:
    """Deterministic mapping from a typed, completed parse to a plan."""
    if parse.question_type is None:
        raise PlanError("parse has no question type")
    kind = QuestionType(parse.question_type)
    filters = tuple(parse.filters)
    date_range = parse.date_range

    if kind in (QuestionType.LOOKUP, QuestionType.OTHER_TYPE) and parse.aggregation:
        # aggregation questions (sum/average/...) execute generically
        _require(parse, "column", bool(parse.metrics or parse.dimensions))
        target = parse.metrics[0] if parse.metrics else parse.dimensions[0]
        op = parse.aggregation
        if op in ("sum", "average", "max", "min"):
            _require(parse, "metric",
                     table.column(target).role in ("metric", "time"))
        elif op == "difference":
            raise PlanError("difference needs two filters and a metric")
        if op == "count-distinct" and target == ROWID_COLUMN:
            op = "count"
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     aggregate=(op, target)))

    if kind == QuestionType.LOOKUP:
        if parse.dimensions:
            project = _projection_dimension(parse)
        else:
            _require(parse, "dimension", bool(parse.metrics))
            project = parse.metrics[0]  # metric-value lookup
        # projecting a column an equality filter already pins is vacuous:
        # the "answer" would just repeat the question's own value
        def source_of(column: str) -> str:
            col = table.column(column)
            return col.origin or col.id

        for f in filters:
            if isinstance(f, EqualsFilter) and source_of(f.column) == source_of(project):
                raise PlanError("projection restates its own filter")
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     project=project))

    if kind == QuestionType.SORT_DIM:
        _require(parse, "metric", bool(parse.metrics))
        project = _projection_dimension(parse)
        direction = parse.sort.direction if parse.sort else "desc"
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     sort=(parse.metrics[0], direction),
                                     limit=parse.limit or 1, project=project))

    if kind == QuestionType.SORT_MET:
        _require(parse, "metric", bool(parse.metrics))
        direction = parse.sort.direction if parse.sort else "desc"
        op = "max" if direction == "desc" else "min"
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     aggregate=(op, parse.metrics[0])))

    if kind == QuestionType.FIRST_LAST:
        project = _projection_dimension(parse)
        direction = parse.sort.direction if parse.sort else "asc"
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     sort=(_first_last_sort_column(table), direction),
                                     limit=parse.limit or 1, project=project))

    if kind == QuestionType.HOW_MANY:
        _require(parse, "column", bool(parse.metrics or parse.dimensions))
        target = parse.metrics[0] if parse.metrics else parse.dimensions[0]
        op = "count" if target == ROWID_COLUMN else "count-distinct"
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     aggregate=(op, target)))

    if kind == QuestionType.DIFFERENCE:
        _require(parse, "metric", bool(parse.metrics))
        equals, rest = _split_filters(parse)
        _require(parse, "filter", len(equals) >= 2)
        metric = parse.metrics[0]
        return QueryPlan(table=table.name, kind=kind,
                         inner=Stage(filters=(equals[0], *rest), date_range=date_range,
                                     project=metric),
                         outer=Stage(filters=(equals[1], *rest), date_range=date_range,
                                     project=metric),
                         feed="subtract")

    if kind == QuestionType.SAME_VALUE:
        equals, rest = _split_filters(parse)
        _require(parse, "filter", len(equals) >= 1)
        anchor = equals[0]
        if parse.metrics:
            compare = parse.metrics[0]
        else:
            _require(parse, "dimension", len(parse.dimensions) >= 2)
            projection = _projection_dimension(parse)
            others = [d for d in parse.dimensions if d != projection]
            compare = others[0]
        projection = _projection_dimension(parse)
        shared = tuple(equals[1:]) + tuple(rest)
        return QueryPlan(table=table.name, kind=kind,
                         inner=Stage(filters=(anchor, *shared), date_range=date_range,
                                     project=compare),
                         outer=Stage(filters=shared, date_range=date_range,
                                     project=projection),
                         feed="match_value", feed_column=compare,
                         exclude=(anchor,))

    if kind == QuestionType.POS_BOTH:
        equals, rest = _split_filters(parse)
        _require(parse, "filter", len(equals) >= 2)
        project = _projection_dimension(parse)
        return QueryPlan(table=table.name, kind=kind,
                         inner=Stage(filters=(equals[0], *rest), date_range=date_range,
                                     project=project),
                         outer=Stage(filters=(equals[1], *rest), date_range=date_range,
                                     project=project),
                         feed="intersect")

    if kind == QuestionType.A_OR_B:
        equals, rest = _split_filters(parse)
        _require(parse, "filter", len(equals) >= 2)
        pair = _alternative_pair(equals)
        shared = tuple(f for f in equals if f not in pair) + tuple(rest)
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=shared, date_range=date_range),
                         feed="alternatives", alternatives=pair)

    if kind == QuestionType.BEF_AFTER:
        _require(parse, "filter", bool(filters))
        project = parse.dimensions[0] if parse.dimensions else None
        if project is None and parse.metrics:
            project = parse.metrics[0]
        if project is None:
            position = next((f for f in filters if isinstance(f, PositionFilter)), None)
            if position is not None and isinstance(position.anchor, EqualsFilter):
                project = position.anchor.column
        _require(parse, "dimension", project is not None)
        return QueryPlan(table=table.name, kind=kind,
                         outer=Stage(filters=filters, date_range=date_range,
                                     project=project))

    # plain OTHER_TYPE: filters plus a projection
    _require(parse, "column", bool(parse.dimensions or parse.metrics))
    project = parse.dimensions[0] if parse.dimensions else parse.metrics[0]
    return QueryPlan(table=table.name, kind=kind,
                     outer=Stage(filters=filters, date_range=date_range,
                                 sort=((parse.metrics[0], parse.sort.direction)
                                       if parse.sort and parse.metrics else None),
                                 limit=parse.limit, project=project))


def _alternative_pair(equals: list[EqualsFilter]) -> tuple[EqualsFilter, EqualsFilter]:
    """The two filters being disjoined: prefer a pair on the same column."""
    by_column: dict[str, list[EqualsFilter]] = {}
    for f in equals:
        by_column.setdefault(f.column, []).append(f)
    for column in sorted(by_column):
        if len(by_column[column]) >= 2:
            return (by_column[column][0], by_column[column][1])
    return (equals[0], equals[1])


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _cell(table: ComprehendedTable, column: str, row: int) -> TypedValue:
    return table.column(column).values[row]


def _equals(table: ComprehendedTable, f: EqualsFilter, row: int) -> bool:
    value = _cell(table, f.column, row)
    if isinstance(value, Empty):
        return False
    return normalize(surface_of(value)) == normalize(f.value)


_OPS = {
    ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
}


def _compare(table: ComprehendedTable, f: CompareFilter, row: int) -> bool:
    value = numeric_of(_cell(table, f.column, row))
    if value is None:
        return False
    return _OPS[f.op](value, f.bound)


def _date_prefix_ok(cell: Date, bound: Date, end: bool, inclusive: bool) -> bool:
    """Compare a cell date against a range bound at the bound's granularity."""
    cell_parts = []
    bound_parts = []
    for cell_component, bound_component in ((cell.year, bound.year),
                                            (cell.month, bound.month),
                                            (cell.day, bound.day)):
        if bound_component is None:
            break
        if cell_component is None:
            return False
        cell_parts.append(cell_component)
        bound_parts.append(bound_component)
    if not bound_parts:
        return True
    a, b = tuple(cell_parts), tuple(bound_parts)
    if end:
        return a <= b if inclusive else a < b
    return a >= b if inclusive else a > b


def _date_in_range(table: ComprehendedTable, date_range: DateRange, row: int,
                   date_column: str | None) -> bool:
    if date_column is None:
        return False
    value = _cell(table, date_column, row)
    if not isinstance(value, Date):
        return False
    if date_range.start is not None and not _date_prefix_ok(
            value, date_range.start, end=False, inclusive=date_range.start_inclusive):
        return False
    if date_range.end is not None and not _date_prefix_ok(
            value, date_range.end, end=True, inclusive=date_range.end_inclusive):
        return False
    return True


def _sort_key(value: TypedValue):
    if isinstance(value, Number):
        return value.value
    if isinstance(value, Date):
        return value.key()
    if hasattr(value, "seconds"):
        return value.seconds
    return normalize(surface_of(value))


def _date_column_for_range(table: ComprehendedTable) -> str | None:
    dates = table.columns_with_role("date")
    return dates[0].id if dates else None


def _run_stage(stage: Stage, table: ComprehendedTable,
               result: ExecResult) -> list[int]:
    """Apply a stage's filters/sort/limit; returns surviving row indices."""
    rows = list(table.body_rows)
    date_column = _date_column_for_range(table)
    position_filters = []
    for f in stage.filters:
        if isinstance(f, PositionFilter):
            position_filters.append(f)
        elif isinstance(f, EqualsFilter):
            if not table.has_column(f.column):
                result.diagnostic = f"unknown column {f.column}"
                return []
            rows = [r for r in rows if _equals(table, f, r)]
        elif isinstance(f, CompareFilter):
            if not table.has_column(f.column):
                result.diagnostic = f"unknown column {f.column}"
                return []
            rows = [r for r in rows if _compare(table, f, r)]
    if stage.date_range is not None:
        if date_column is None:
            result.diagnostic = "no date column for the date range"
            return []
        rows = [r for r in rows if _date_in_range(table, stage.date_range, r, date_column)]
    for f in position_filters:
        rows = _apply_position(f, rows, table, result)
    if stage.sort is not None:
        column, direction = stage.sort
        if not table.has_column(column):
            result.diagnostic = f"unknown sort column {column}"
            return []
        values = table.column(column).values
        present = [r for r in rows if not isinstance(values[r], Empty)]
        absent = [r for r in rows if isinstance(values[r], Empty)]
        present.sort(key=lambda r: _sort_key(values[r]), reverse=(direction == "desc"))
        rows = present + absent
    if stage.limit is not None:
        rows = rows[: stage.limit]
    return rows


def _apply_position(f: PositionFilter, rows: list[int],
                    table: ComprehendedTable, result: ExecResult) -> list[int]:
    if f.relation == "first":
        return rows[:1]
    if f.relation == "last":
        return rows[-1:]
    if isinstance(f.anchor, EqualsFilter) and not table.has_column(f.anchor.column):
        result.diagnostic = f"unknown column {f.anchor.column}"
        return []
    anchors = [r for r in rows if _match_filter(table, f.anchor, r)]
    offset = -1 if f.relation in ("before", "previous") else 1
    targets = []
    for anchor in anchors:
        index = rows.index(anchor) + offset
        if 0 <= index < len(rows):
            target = rows[index]
            if target not in targets and target not in anchors:
                targets.append(target)
    return targets


def _match_filter(table: ComprehendedTable, f: Filter, row: int) -> bool:
    if isinstance(f, EqualsFilter):
        return _equals(table, f, row)
    if isinstance(f, CompareFilter):
        return _compare(table, f, row)
    raise PlanError("position filters cannot anchor on position filters")


def _aggregate(op: str, column: str, rows: list[int],
               table: ComprehendedTable, result: ExecResult) -> list[list[TypedValue]]:
    if not table.has_column(column):
        result.diagnostic = f"unknown column {column}"
        return []
    values = table.column(column).values
    if op == "count":
        result.cells.extend((column, r) for r in rows)
        return [[Number(float(len(rows)), surface=str(len(rows)))]]
    if op == "count-distinct":
        seen = []
        for r in rows:
            value = values[r]
            if isinstance(value, Empty):
                continue
            key = _sort_key(value)
            if key not in seen:
                seen.append(key)
                result.cells.append((column, r))
        return [[Number(float(len(seen)), surface=str(len(seen)))]]
    numeric = [(r, numeric_of(values[r])) for r in rows]
    numeric = [(r, v) for r, v in numeric if v is not None]
    if not numeric:
        result.diagnostic = result.diagnostic or f"no numeric values in {column}"
        return []
    if op == "sum":
        result.cells.extend((column, r) for r, _ in numeric)
        total = sum(v for _, v in numeric)
        return [[Number(total, surface=f"{total:g}")]]
    if op == "average":
        result.cells.extend((column, r) for r, _ in numeric)
        mean = sum(v for _, v in numeric) / len(numeric)
        return [[Number(mean, surface=f"{mean:g}")]]
    if op in ("max", "min"):
        pick = max(numeric, key=lambda rv: rv[1]) if op == "max" else min(numeric, key=lambda rv: rv[1])
        result.cells.append((column, pick[0]))
        return [[values[pick[0]]]]
    raise PlanError(f"unknown aggregate {op!r}")


def _project(rows: list[int], column: str | None, table: ComprehendedTable,
             result: ExecResult) -> list[list[TypedValue]]:
    if column is None:
        column = next((c.id for c in table.columns
                       if c.role == "dimension" and c.id != ROWID_COLUMN),
                      table.columns[0].id)
    if not table.has_column(column):
        result.diagnostic = f"unknown column {column}"
        return []
    values = table.column(column).values
    out = []
    for r in rows:
        out.append([values[r]])
        result.cells.append((column, r))
    return out


def _stage_values(stage: Stage, table: ComprehendedTable,
                  result: ExecResult) -> list[list[TypedValue]]:
    rows = _run_stage(stage, table, result)
    if stage.aggregate is not None:
        op, column = stage.aggregate
        return _aggregate(op, column, rows, table, result)
    return _project(rows, stage.project, table, result)


def execute(plan: QueryPlan, table: ComprehendedTable) -> ExecResult:
    """Evaluate a plan over the table's body rows."""
    result = ExecResult()

    if plan.feed is None:
        result.rows = _stage_values(plan.outer, table, result)
        if not result.rows and result.diagnostic is None:
            result.diagnostic = "no rows matched"
        return result

    if plan.feed == "subtract":
        inner_vals = _stage_values(plan.inner, table, result)
        outer_vals = _stage_values(plan.outer, table, result)
        a = next((numeric_of(row[0]) for row in inner_vals if numeric_of(row[0]) is not None), None)
        b = next((numeric_of(row[0]) for row in outer_vals if numeric_of(row[0]) is not None), None)
        if a is None or b is None:
            result.diagnostic = "difference needs two numeric values"
            return result
        diff = abs(a - b)
        result.rows = [[Number(diff, surface=f"{diff:g}")]]
        return result

    if plan.feed == "match_value":
        inner_vals = _stage_values(plan.inner, table, result)
        anchor_value = next((row[0] for row in inner_vals if not isinstance(row[0], Empty)), None)
        if anchor_value is None:
            result.diagnostic = "anchor value not found"
            return result
        rows = _run_stage(plan.outer, table, result)
        column = table.column(plan.feed_column)
        key = _sort_key(anchor_value)
        rows = [r for r in rows
                if not isinstance(column.values[r], Empty)
                and _sort_key(column.values[r]) == key]
        rows = [r for r in rows
                if not any(_match_filter(table, ex, r) for ex in plan.exclude)]
        result.rows = _project(rows, plan.outer.project, table, result)
        if not result.rows and result.diagnostic is None:
            result.diagnostic = "no other row shares the value"
        return result

    if plan.feed == "intersect":
        inner_vals = _stage_values(plan.inner, table, result)
        outer_vals = _stage_values(plan.outer, table, result)
        outer_keys = {_sort_key(row[0]) for row in outer_vals if not isinstance(row[0], Empty)}
        seen = set()
        rows = []
        for row in inner_vals:
            if isinstance(row[0], Empty):
                continue
            key = _sort_key(row[0])
            if key in outer_keys and key not in seen:
                seen.add(key)
                rows.append(row)
        result.rows = rows
        if not rows and result.diagnostic is None:
            result.diagnostic = "no shared value satisfies both filters"
        return result

    if plan.feed == "alternatives":
        rows_out = []
        for alt in plan.alternatives:
            stage = Stage(filters=(alt, *plan.outer.filters),
                          date_range=plan.outer.date_range)
            sub = ExecResult()
            matched = _run_stage(stage, table, sub)
            if matched:
                r = matched[0]
                value = table.column(alt.column).values[r]
                if not isinstance(value, Empty):
                    rows_out.append([value])
                    result.cells.append((alt.column, r))
        result.rows = rows_out
        if not rows_out:
            result.diagnostic = "neither alternative satisfies the condition"
        return result

    raise PlanError(f"unknown plan feed {plan.feed!r}")


def normalize_answer(result: ExecResult, question_type: QuestionType,
                     plural: bool, plan: QueryPlan | None = None) -> Answer:
    """Shape raw result rows into the final answer."""
    if not result.rows:
        return Answer.none(plan=plan, diagnostic=result.diagnostic)
    values = tuple(row[0] for row in result.rows)
    cells = tuple(result.cells)
    if question_type in (QuestionType.HOW_MANY, QuestionType.DIFFERENCE):
        return Answer(kind="scalar", values=values[:1], cells=cells, plan=plan)
    if question_type == QuestionType.A_OR_B and len(values) > 1:
        return Answer(kind="list", values=values, cells=cells, plan=plan)
    if plural:
        return Answer(kind="list", values=values, cells=cells, plan=plan)
    return Answer(kind="scalar", values=values[:1], cells=cells, plan=plan)


# ---------------------------------------------------------------------------
# SQL rendering (transparency payload only; execution never goes through SQL)
# ---------------------------------------------------------------------------

def _sql_name(table: ComprehendedTable, column: str | None) -> str:
    if column is None:
        return "*"
    try:
        return '"' + table.column(column).name.replace('"', '""') + '"'
    except KeyError:
        return '"' + column + '"'


def _sql_conditions(stage: Stage, table: ComprehendedTable) -> list[str]:
    conditions = []
    for f in stage.filters:
        if isinstance(f, EqualsFilter):
            conditions.append(f"{_sql_name(table, f.column)} = '{f.value}'")
        elif isinstance(f, CompareFilter):
            op = "=" if f.op == "==" else ("<>" if f.op == "!=" else f.op)
            conditions.append(f"{_sql_name(table, f.column)} {op} {f.bound:g}")
        elif isinstance(f, PositionFilter):
            conditions.append(f"/* row {f.relation} of ({f.anchor.describe()}) */")
    if stage.date_range is not None:
        conditions.append(f"{_sql_name(table, None)} /* date in {stage.date_range.describe()} */")
    return conditions


def _sql_stage(stage: Stage, table: ComprehendedTable, source: str) -> str:
    if stage.aggregate is not None:
        op, column = stage.aggregate
        fn = {"count": "COUNT", "count-distinct": "COUNT(DISTINCT",
              "sum": "SUM", "average": "AVG", "max": "MAX", "min": "MIN"}[op]
        target = _sql_name(table, column)
        select = f"{fn} {target})" if op == "count-distinct" else f"{fn}({target})"
    else:
        select = _sql_name(table, stage.project)
    sql = f"SELECT {select} FROM {source}"
    conditions = _sql_conditions(stage, table)
    if conditions:
        sql += " WHERE " + " AND ".join(conditions)
    if stage.sort is not None:
        sql += f" ORDER BY {_sql_name(table, stage.sort[0])} {stage.sort[1].upper()}"
    if stage.limit is not None:
        sql += f" LIMIT {stage.limit}"
    return sql


def plan_to_sql(plan: QueryPlan, table: ComprehendedTable) -> str:
    """Equivalent SQL text for the transparency payload."""
    source = '"' + table.name.replace('"', '""') + '"'
    if plan.feed is None:
        return _sql_stage(plan.outer, table, source)
    if plan.feed == "subtract":
        a = _sql_stage(plan.inner, table, source)
        b = _sql_stage(plan.outer, table, source)
        return f"SELECT ABS(({a}) - ({b}))"
    if plan.feed == "match_value":
        inner = _sql_stage(plan.inner, table, source)
        outer = _sql_stage(plan.outer, table, source)
        exclude = " AND ".join(f"NOT ({c})" for c in
                               _sql_conditions(Stage(filters=plan.exclude), table))
        glue = " AND " if "WHERE" in outer else " WHERE "
        sql = f"{outer}{glue}{_sql_name(table, plan.feed_column)} = ({inner})"
        return f"{sql} AND {exclude}" if exclude else sql
    if plan.feed == "intersect":
        a = _sql_stage(plan.inner, table, source)
        b = _sql_stage(plan.outer, table, source)
        return f"{a} INTERSECT {b}"
    if plan.feed == "alternatives":
        parts = []
        for alt in plan.alternatives:
            stage = Stage(filters=(alt, *plan.outer.filters),
                          date_range=plan.outer.date_range,
                          project=alt.column)
            parts.append(_sql_stage(stage, table, source))
        return " UNION ".join(parts)
    return "/* unrenderable plan */"
