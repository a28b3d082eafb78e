"""Parse annotated questions into candidate semantic parses.

The grammar is a data file of rules over annotation types.  Most rules are
"floating": they contribute a slot assignment no matter where their
constituent sits in the question.  A few (inequalities, before/after) are
ordered and require their constituents in sequence.  Conflicting slot
assignments fork into separate candidates; scoring disambiguates later.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

from .annotate import (
    AnnotatedQuery, EntityTarget, IntentTarget, LiteralTarget,
    PlaceholderTarget,
)
from .table import CellRef, ComprehendedTable, HeadingRef
from .values import Date, Number, surface_of

MAX_CANDIDATES = 64

COMPARATORS = {
    "CMP_GT": ">", "CMP_GE": ">=", "CMP_LT": "<",
    "CMP_LE": "<=", "CMP_EQ": "==", "CMP_NE": "!=",
}


# ---------------------------------------------------------------------------
# Semantic parse structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualsFilter:
    column: str
    value: str

    def describe(self) -> str:
        return f"{self.column} = {self.value!r}"


@dataclass(frozen=True)
class CompareFilter:
    column: str
    op: str  # < <= == >= > !=
    bound: float

    def describe(self) -> str:
        return f"{self.column} {self.op} {self.bound:g}"


@dataclass(frozen=True)
class PositionFilter:
    relation: str  # before | after | next | previous | first | last
    anchor: "Filter"

    def describe(self) -> str:
        return f"row {self.relation} ({self.anchor.describe()})"


Filter = EqualsFilter | CompareFilter | PositionFilter


@dataclass(frozen=True)
class DateRange:
    start: Date | None = None
    end: Date | None = None
    start_inclusive: bool = True
    end_inclusive: bool = True

    def describe(self) -> str:
        parts = []
        if self.start is not None:
            parts.append(("[" if self.start_inclusive else "(") + (self.start.surface or str(self.start.key())))
        else:
            parts.append("(")
        if self.end is not None:
            parts.append((self.end.surface or str(self.end.key())) + ("]" if self.end_inclusive else ")"))
        else:
            parts.append(")")
        return " .. ".join(parts)


@dataclass(frozen=True)
class SortSpec:
    direction: str  # asc | desc
    target: str | None = None  # column id; None binds at planning time
    row_order: bool = False  # first/last style ordering


@dataclass(frozen=True)
class SemanticParse:
    """Typed operand slots extracted from one reading of the question."""

    dimensions: tuple[str, ...] = ()
    metrics: tuple[str, ...] = ()
    filters: tuple[Filter, ...] = ()
    date_range: DateRange | None = None
    sort: SortSpec | None = None
    limit: int | None = None
    aggregation: str | None = None  # sum | count | count-distinct | average | min | max | difference
    answer_kind: str = "cell"  # cell | list | number | boolean
    question_type: str | None = None  # assigned by the question typer
    projection: str | None = None  # dimension named by the headword, if any
    consumed: tuple[int, ...] = ()  # annotation indices this parse used

    def structural_key(self) -> tuple:
        """Identity of the parse ignoring provenance."""
        return (
            tuple(sorted(self.dimensions)),
            tuple(sorted(self.metrics)),
            tuple(sorted(f.describe() for f in self.filters)),
            self.date_range.describe() if self.date_range else None,
            self.sort,
            self.limit,
            self.aggregation,
            self.projection,
        )

    def is_empty(self) -> bool:
        return not (self.dimensions or self.metrics or self.filters
                    or self.date_range or self.sort or self.aggregation)


# ---------------------------------------------------------------------------
# Grammar file
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrammarRule:
    id: str
    types: tuple[str, ...]
    action: str
    floating: bool


@dataclass(frozen=True)
class Grammar:
    rules: tuple[GrammarRule, ...]

    @classmethod
    def load(cls, path: str | Path) -> "Grammar":
        rules = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, rest = line.partition(":")
            body, _, mode = rest.partition("[")
            types_part, _, action = body.partition("=>")
            mode = mode.rstrip("]").strip()
            types = tuple(types_part.split())
            action = action.strip()
            if not head.strip() or not types or not action or mode not in ("floating", "ordered"):
                raise ValueError(f"bad grammar rule: {raw!r}")
            if mode == "ordered" and len(types) < 2:
                raise ValueError(f"ordered rule needs >=2 constituents: {raw!r}")
            if mode == "floating" and len(types) != 1:
                raise ValueError(f"floating rule must have one constituent: {raw!r}")
            rules.append(GrammarRule(id=head.strip(), types=types,
                                     action=action, floating=(mode == "floating")))
        return cls(rules=tuple(rules))

    def floating_actions(self) -> dict[str, list[GrammarRule]]:
        index: dict[str, list[GrammarRule]] = {}
        for rule in self.rules:
            if rule.floating:
                index.setdefault(rule.types[0], []).append(rule)
        return index

    def ordered_rules(self) -> list[GrammarRule]:
        return [rule for rule in self.rules if not rule.floating]


_DEFAULT_GRAMMAR: Grammar | None = None


def default_grammar() -> Grammar:
    global _DEFAULT_GRAMMAR
    if _DEFAULT_GRAMMAR is None:
        _DEFAULT_GRAMMAR = Grammar.load(Path(__file__).parent / "data" / "grammar.txt")
    return _DEFAULT_GRAMMAR


# ---------------------------------------------------------------------------
# Typed views of annotations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypedAnnotation:
    ann_index: int
    span: tuple[int, int]
    type: str
    column: str | None = None
    row: int | None = None
    value: object = None


def _type_annotations(aq: AnnotatedQuery, table: ComprehendedTable) -> list[TypedAnnotation]:
    typed = []
    for idx, ann in enumerate(aq.annotations):
        target = ann.target
        if isinstance(target, EntityTarget):
            for ref in target.refs:
                if isinstance(ref, HeadingRef):
                    col = table.column(ref.column)
                    if col.role in ("metric", "time"):
                        # time columns compare and aggregate like metrics
                        typed.append(TypedAnnotation(idx, ann.span, "HEAD_MET", column=col.id))
                    elif col.role == "dimension":
                        typed.append(TypedAnnotation(idx, ann.span, "HEAD_DIM", column=col.id))
                    # date twins ride along with their dimension twin
                elif isinstance(ref, CellRef):
                    cell_text = surface_of(table.column(ref.column).values[ref.row])
                    typed.append(TypedAnnotation(idx, ann.span, "CELL",
                                                 column=ref.column, row=ref.row,
                                                 value=cell_text))
        elif isinstance(target, IntentTarget):
            typed.append(TypedAnnotation(idx, ann.span, target.intent))
        elif isinstance(target, LiteralTarget):
            if isinstance(target.value, Number):
                typed.append(TypedAnnotation(idx, ann.span, "NUM", value=target.value.value))
            elif isinstance(target.value, Date):
                typed.append(TypedAnnotation(idx, ann.span, "DATE", value=target.value))
        elif isinstance(target, PlaceholderTarget):
            typed.append(TypedAnnotation(idx, ann.span, "PLACEHOLDER"))
    return typed


def _matches_type(rule_type: str, ann_type: str) -> bool:
    if rule_type == "CMP":
        return ann_type.startswith("CMP_")
    if rule_type == "CMP_POST":  # "10 or more wins" style postfix comparators
        return ann_type in ("CMP_GE", "CMP_LE")
    return rule_type == ann_type


# ---------------------------------------------------------------------------
# Items: slot assignments ready to apply
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Item:
    action: str
    consumed: frozenset[int]
    groups: frozenset[tuple[int, int]]
    column: str | None = None
    filter: Filter | None = None
    date_range: DateRange | None = None
    sort: SortSpec | None = None
    aggregation: str | None = None
    order: int = 0  # deterministic ordering among alternatives


def _floating_item(rule: GrammarRule, ta: TypedAnnotation, order: int) -> Item | None:
    base = dict(action=rule.action, consumed=frozenset([ta.ann_index]),
                groups=frozenset([ta.span]), order=order)
    action = rule.action
    if action == "dimension":
        return Item(column=ta.column, **base)
    if action == "metric":
        return Item(column=ta.column, **base)
    if action == "filter_equals":
        return Item(filter=EqualsFilter(ta.column, str(ta.value)), **base)
    if action == "date_at":
        return Item(date_range=DateRange(start=ta.value, end=ta.value), **base)
    if action == "mark":
        return Item(**base)
    if action == "sort_desc":
        return Item(sort=SortSpec("desc"), **base)
    if action == "sort_asc":
        return Item(sort=SortSpec("asc"), **base)
    if action == "order_first":
        return Item(sort=SortSpec("asc", row_order=True), **base)
    if action == "order_last":
        return Item(sort=SortSpec("desc", row_order=True), **base)
    if action == "aggregate_count":
        return Item(aggregation="count-distinct", **base)
    if action == "aggregate_sum":
        return Item(aggregation="sum", **base)
    if action == "aggregate_average":
        return Item(aggregation="average", **base)
    if action == "aggregate_difference":
        return Item(aggregation="difference", **base)
    raise ValueError(f"unknown floating action {action!r} in rule {rule.id}")


def _composite_item(rule: GrammarRule, parts: list[TypedAnnotation], order: int) -> Item | None:
    base = dict(action=rule.action,
                consumed=frozenset(p.ann_index for p in parts),
                groups=frozenset(p.span for p in parts), order=order)
    action = rule.action
    if action == "filter_compare":
        cmp = next(p for p in parts if p.type.startswith("CMP_"))
        num = next(p for p in parts if p.type == "NUM")
        met = next(p for p in parts if p.type == "HEAD_MET")
        return Item(filter=CompareFilter(met.column, COMPARATORS[cmp.type], num.value), **base)
    if action == "filter_compare_eq":
        num = next(p for p in parts if p.type == "NUM")
        met = next(p for p in parts if p.type == "HEAD_MET")
        return Item(filter=CompareFilter(met.column, "==", num.value), **base)
    if action.startswith("position_"):
        relation = action.split("_", 1)[1]
        cell = next(p for p in parts if p.type == "CELL")
        anchor = EqualsFilter(cell.column, str(cell.value))
        return Item(filter=PositionFilter(relation, anchor), **base)
    if action == "date_before":
        date = next(p for p in parts if p.type == "DATE")
        return Item(date_range=DateRange(end=date.value, end_inclusive=False), **base)
    if action == "date_after":
        date = next(p for p in parts if p.type == "DATE")
        return Item(date_range=DateRange(start=date.value, start_inclusive=False), **base)
    raise ValueError(f"unknown ordered action {action!r} in rule {rule.id}")


def _dedup_items(items: list[Item]) -> list[Item]:
    """Merge items with identical effect (same slot assignment), keeping
    the union of their provenance."""
    merged: dict[tuple, Item] = {}
    for item in items:
        key = (item.action, item.column, item.filter, item.date_range,
               item.sort, item.aggregation)
        if key in merged:
            prev = merged[key]
            merged[key] = Item(action=prev.action,
                               consumed=prev.consumed | item.consumed,
                               groups=prev.groups | item.groups,
                               column=prev.column, filter=prev.filter,
                               date_range=prev.date_range, sort=prev.sort,
                               aggregation=prev.aggregation, order=prev.order)
        else:
            merged[key] = item
    return sorted(merged.values(), key=lambda it: it.order)


def _match_ordered(rule: GrammarRule, typed: list[TypedAnnotation]) -> list[list[TypedAnnotation]]:
    """All selections of typed annotations matching the rule's sequence in
    token order, with pairwise disjoint spans."""
    matches: list[list[TypedAnnotation]] = []

    def extend(position: int, min_start: int, chosen: list[TypedAnnotation]) -> None:
        if position == len(rule.types):
            matches.append(list(chosen))
            return
        for ta in typed:
            if ta.span[0] < min_start:
                continue
            if _matches_type(rule.types[position], ta.type):
                chosen.append(ta)
                extend(position + 1, ta.span[0] + ta.span[1], chosen)
                chosen.pop()

    extend(0, 0, [])
    return matches


# ---------------------------------------------------------------------------
# Candidate assembly
# ---------------------------------------------------------------------------

@dataclass
class _Partial:
    dims: dict[str, frozenset[int]] = field(default_factory=dict)
    mets: dict[str, frozenset[int]] = field(default_factory=dict)
    filters: dict[Filter, frozenset[int]] = field(default_factory=dict)
    date_range: tuple[DateRange, frozenset[int]] | None = None
    ordering: tuple[SortSpec, int, frozenset[int]] | None = None
    aggregation: tuple[str, frozenset[int]] | None = None
    marks: frozenset[int] = frozenset()
    claimed: frozenset[tuple[int, int]] = frozenset()

    def clone(self) -> "_Partial":
        twin = _Partial()
        twin.dims = dict(self.dims)
        twin.mets = dict(self.mets)
        twin.filters = dict(self.filters)
        twin.date_range = self.date_range
        twin.ordering = self.ordering
        twin.aggregation = self.aggregation
        twin.marks = self.marks
        twin.claimed = self.claimed
        return twin

    def consumed(self) -> frozenset[int]:
        out = set(self.marks)
        for src in self.dims.values():
            out.update(src)
        for src in self.mets.values():
            out.update(src)
        for src in self.filters.values():
            out.update(src)
        if self.date_range:
            out.update(self.date_range[1])
        if self.ordering:
            out.update(self.ordering[2])
        if self.aggregation:
            out.update(self.aggregation[1])
        return frozenset(out)


def _merge_ranges(a: DateRange, b: DateRange) -> DateRange | None:
    if a.start is None and b.end is None and b.start is not None and a.end is not None:
        a, b = b, a
    if a.start is not None and a.end is None and b.start is None and b.end is not None:
        return DateRange(start=a.start, end=b.end,
                         start_inclusive=a.start_inclusive, end_inclusive=b.end_inclusive)
    return None


def _apply(partial: _Partial, item: Item) -> list[_Partial]:
    """Apply one item; single-occupancy conflicts fork into both readings."""
    out = partial.clone()
    out.claimed = out.claimed | item.groups
    action = item.action
    if action == "dimension":
        out.dims[item.column] = out.dims.get(item.column, frozenset()) | item.consumed
        return [out]
    if action == "metric":
        out.mets[item.column] = out.mets.get(item.column, frozenset()) | item.consumed
        return [out]
    if item.filter is not None:
        out.filters[item.filter] = out.filters.get(item.filter, frozenset()) | item.consumed
        return [out]
    if action == "mark":
        out.marks = out.marks | item.consumed
        return [out]
    if item.sort is not None:
        if partial.ordering is None:
            out.ordering = (item.sort, 1, item.consumed)
            return [out]
        keep = partial.clone()
        keep.claimed = keep.claimed | item.groups
        out.ordering = (item.sort, 1, item.consumed)
        return [keep, out]
    if item.aggregation is not None:
        if partial.aggregation is None:
            out.aggregation = (item.aggregation, item.consumed)
            return [out]
        keep = partial.clone()
        keep.claimed = keep.claimed | item.groups
        out.aggregation = (item.aggregation, item.consumed)
        return [keep, out]
    if item.date_range is not None:
        if partial.date_range is None:
            out.date_range = (item.date_range, item.consumed)
            return [out]
        merged = _merge_ranges(partial.date_range[0], item.date_range)
        if merged is not None:
            out.date_range = (merged, partial.date_range[1] | item.consumed)
            return [out]
        keep = partial.clone()
        keep.claimed = keep.claimed | item.groups
        out.date_range = (item.date_range, item.consumed)
        return [keep, out]
    raise ValueError(f"cannot apply item action {action!r}")


def _finalize(partial: _Partial, aq: AnnotatedQuery) -> SemanticParse:
    aggregation = partial.aggregation[0] if partial.aggregation else None
    if aggregation in ("count", "count-distinct", "sum", "average", "difference"):
        answer_kind = "number"
    elif aq.headword_plural:
        answer_kind = "list"
    else:
        answer_kind = "cell"
    sort = partial.ordering[0] if partial.ordering else None
    limit = partial.ordering[1] if partial.ordering else None
    projection = None
    if aq.headword is not None:
        for column, sources in partial.dims.items():
            if any(aq.annotations[i].span == aq.headword for i in sources):
                projection = column
                break
    return SemanticParse(
        dimensions=tuple(partial.dims),
        metrics=tuple(partial.mets),
        filters=tuple(partial.filters),
        date_range=partial.date_range[0] if partial.date_range else None,
        sort=sort,
        limit=limit,
        aggregation=aggregation,
        answer_kind=answer_kind,
        projection=projection,
        consumed=tuple(sorted(partial.consumed())),
    )


def _coverage(partial: _Partial, aq: AnnotatedQuery) -> tuple[int, int]:
    covered: set[int] = set()
    for idx in partial.consumed():
        covered.update(aq.annotations[idx].token_indices())
    return (len(covered), len(partial.consumed()))


def parse(aq: AnnotatedQuery, table: ComprehendedTable,
          grammar: Grammar | None = None,
          max_candidates: int = MAX_CANDIDATES) -> list[SemanticParse]:
    """All type-consistent candidate parses of an annotated question.

    Every applicable annotation is consumed; alternatives (one phrase
    matching several table entities, or two annotations competing for one
    slot) fork into separate candidates.  Candidates are structurally
    deduplicated; the list is empty only when there are no annotations.
    """
    grammar = grammar or default_grammar()
    typed = _type_annotations(aq, table)
    typed.sort(key=lambda ta: (ta.span[0], ta.span[1], ta.type, ta.column or "", ta.row or -1))

    floating_index = grammar.floating_actions()
    order = itertools.count()

    # composite items from ordered rules, anchored at their first group
    composites: dict[tuple[int, int], list[Item]] = {}
    for rule in grammar.ordered_rules():
        for parts in _match_ordered(rule, typed):
            item = _composite_item(rule, parts, next(order))
            if item is not None:
                anchor = min(p.span for p in parts)
                composites.setdefault(anchor, []).append(item)

    # floating items grouped by span
    group_items: dict[tuple[int, int], list[Item]] = {}
    for ta in typed:
        for rule in floating_index.get(ta.type, []):
            item = _floating_item(rule, ta, next(order))
            if item is not None:
                group_items.setdefault(ta.span, []).append(item)

    group_keys = sorted(set(group_items) | set(composites))
    partials = [_Partial()]
    for key in group_keys:
        alternatives = _dedup_items(list(group_items.get(key, []))
                                    + composites.get(key, []))
        next_partials: list[_Partial] = []
        for partial in partials:
            if key in partial.claimed:
                next_partials.append(partial)
                continue
            usable = [item for item in alternatives
                      if not (item.groups & partial.claimed)]
            if not usable:
                next_partials.append(partial)
                continue
            for item in sorted(usable, key=lambda it: it.order):
                next_partials.extend(_apply(partial, item))
        partials = next_partials
        if len(partials) > max_candidates:
            partials.sort(key=lambda p: (_coverage(p, aq), ), reverse=True)
            partials = partials[:max_candidates]

    # structural dedup, merging provenance of identical readings
    by_key: dict[tuple, _Partial] = {}
    for partial in partials:
        key = _finalize(partial, aq).structural_key()
        if key in by_key:
            kept = by_key[key]
            merged = kept.clone()
            merged.marks = kept.marks | partial.consumed()
            by_key[key] = merged
        else:
            by_key[key] = partial
    candidates = [_finalize(p, aq) for p in by_key.values()]

    if not aq.annotations:
        return []
    if not candidates:
        return [SemanticParse(consumed=())]
    # drop the completely empty parse if real candidates exist
    non_empty = [c for c in candidates if not c.is_empty()]
    return non_empty or candidates


def candidate_stats(parses: list) -> float:
    """Average candidate parses per question over a batch.

    Accepts either per-question candidate lists or plain counts.
    """
    if not parses:
        return 0.0
    counts = [len(p) if isinstance(p, (list, tuple)) else int(p) for p in parses]
    return sum(counts) / len(counts)
