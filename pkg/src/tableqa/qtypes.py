"""Question typing and missing-operand detection: the deductive half of
abduction.

Classification is entirely rule-based over intent words and matched
entities.  It assumes row filters and intent words were identified
correctly but tolerates missing columns, so a question keeps its type when
a column reference failed to match.  Each type carries a fixed operand
requirement; whatever the parse has not filled is reported as missing,
together with the unmatched/placeholder terms available to the predictor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .annotate import AnnotatedQuery, EntityTarget, IntentTarget
from .grammar import EqualsFilter, PositionFilter, SemanticParse
from .table import HeadingRef


class QuestionType(str, Enum):
    SORT_DIM = "SORT_DIM"
    SORT_MET = "SORT_MET"
    FIRST_LAST = "FIRST_LAST"
    BEF_AFTER = "BEF_AFTER"
    SAME_VALUE = "SAME_VALUE"
    POS_BOTH = "POS_BOTH"
    A_OR_B = "A_OR_B"
    DIFFERENCE = "DIFFERENCE"
    HOW_MANY = "HOW_MANY"
    LOOKUP = "LOOKUP"
    OTHER_TYPE = "OTHER_TYPE"


@dataclass(frozen=True)
class OperandRequirement:
    dimensions: int = 0
    metrics: int = 0
    filters: int = 0
    any_column: int = 0


_REQUIREMENTS = {
    QuestionType.SORT_DIM: OperandRequirement(dimensions=1, metrics=1),
    QuestionType.SORT_MET: OperandRequirement(metrics=1),
    QuestionType.FIRST_LAST: OperandRequirement(dimensions=1),
    QuestionType.BEF_AFTER: OperandRequirement(filters=1),
    QuestionType.SAME_VALUE: OperandRequirement(dimensions=2, filters=1),
    QuestionType.POS_BOTH: OperandRequirement(dimensions=1, filters=2),
    QuestionType.A_OR_B: OperandRequirement(filters=2),
    QuestionType.DIFFERENCE: OperandRequirement(metrics=1, filters=2),
    QuestionType.HOW_MANY: OperandRequirement(metrics=1),
    QuestionType.LOOKUP: OperandRequirement(dimensions=1, filters=1),
    QuestionType.OTHER_TYPE: OperandRequirement(any_column=1),
}

SORT_INTENTS = {"SORT_DESC", "SORT_ASC"}
POSITION_INTENTS = {"BEFORE", "AFTER", "NEXT", "PREVIOUS"}

# a leading auxiliary with no question word marks a polar (yes/no) question
POLAR_LEADS = {"is", "are", "was", "were", "do", "does", "did", "has",
               "have", "had", "can", "could", "will", "would"}


def required_operands(question_type: QuestionType) -> OperandRequirement:
    """The fixed operand requirement of each question type."""
    return _REQUIREMENTS[question_type]


def _headword_has_entity(aq: AnnotatedQuery) -> bool:
    if aq.headword is None:
        return False
    return any(ann.span == aq.headword and isinstance(ann.target, EntityTarget)
               and any(isinstance(ref, HeadingRef) for ref in ann.target.refs)
               for ann in aq.annotations)


def _position_intent_unconsumed_as_date(aq: AnnotatedQuery, parse: SemanticParse) -> bool:
    """A before/after intent counts toward BEF_AFTER only when the parse
    did not already spend it on a date range."""
    date_consumed = set(parse.consumed) if parse.date_range is not None else set()
    for idx, ann in enumerate(aq.annotations):
        if isinstance(ann.target, IntentTarget) and ann.target.intent in POSITION_INTENTS:
            if parse.date_range is not None and idx in date_consumed:
                continue
            return True
    return False


def classify(aq: AnnotatedQuery, parse: SemanticParse) -> QuestionType:
    """Assign one of the eleven question types.

    When several triggers fire the most structurally specific type wins:
    DIFFERENCE > A_OR_B > POS_BOTH > SAME_VALUE > BEF_AFTER > FIRST_LAST >
    SORT_* > HOW_MANY > LOOKUP > OTHER_TYPE.
    """
    intents = aq.intents_present()
    equals_filters = sum(1 for f in parse.filters if isinstance(f, EqualsFilter))
    has_position_filter = any(isinstance(f, PositionFilter) for f in parse.filters)

    if "DIFFERENCE" in intents:
        return QuestionType.DIFFERENCE
    if "OR" in intents and equals_filters >= 2:
        return QuestionType.A_OR_B
    if "BOTH" in intents and equals_filters >= 2:
        return QuestionType.POS_BOTH
    if "SAME" in intents:
        return QuestionType.SAME_VALUE
    if has_position_filter or _position_intent_unconsumed_as_date(aq, parse):
        return QuestionType.BEF_AFTER
    if "FIRST" in intents or "LAST" in intents:
        return QuestionType.FIRST_LAST
    if intents & SORT_INTENTS:
        # "which movie has the most budget" asks for an entity (SORT_DIM);
        # "what was the highest attendance" asks for the metric's own value.
        if aq.headword is not None:
            if parse.projection is not None:
                return QuestionType.SORT_DIM
            if _headword_has_entity(aq) and parse.metrics:
                return QuestionType.SORT_MET
            return QuestionType.SORT_DIM
        if parse.dimensions:
            return QuestionType.SORT_DIM
        return QuestionType.SORT_MET
    if "COUNT" in intents:
        return QuestionType.HOW_MANY
    if (aq.tokens and aq.tokens[0].surface in POLAR_LEADS
            and "QWORD" not in intents):
        return QuestionType.OTHER_TYPE  # yes/no questions have no semantics here
    if parse.filters or parse.date_range is not None:
        return QuestionType.LOOKUP
    return QuestionType.OTHER_TYPE


@dataclass
class MissingOperandReport:
    question_type: QuestionType
    missing: dict[str, int] = field(default_factory=dict)  # kind -> count
    terms: list[str] = field(default_factory=list)  # abduction inputs

    def is_complete(self) -> bool:
        return not self.missing

    def column_kinds(self) -> dict[str, int]:
        """The missing slots the predictor can fill (column-valued ones)."""
        return {kind: n for kind, n in self.missing.items()
                if kind in ("dimension", "metric", "column")}


def find_missing(parse: SemanticParse, question_type: QuestionType,
                 aq: AnnotatedQuery | None = None) -> MissingOperandReport:
    """Required minus filled operands, per kind.

    A date range counts as a filter.  Two special satisfaction rules
    reflect how the types execute: the HOW_MANY operand may be any column
    (distinct values of a string column are counted just like a metric),
    and a metric can stand in for the compared column of SAME_VALUE
    ("same number of bronze medals").
    """
    requirement = required_operands(question_type)
    n_dims = len(parse.dimensions)
    n_mets = len(parse.metrics)
    n_filters = len(parse.filters) + (1 if parse.date_range is not None else 0)

    missing: dict[str, int] = {}
    if question_type == QuestionType.OTHER_TYPE:
        if requirement.any_column > 0 and n_dims + n_mets == 0:
            missing["column"] = requirement.any_column
    elif question_type == QuestionType.HOW_MANY:
        if n_mets + n_dims < requirement.metrics:
            missing["column"] = requirement.metrics - n_mets - n_dims
    else:
        effective_dims = n_dims
        if question_type == QuestionType.SAME_VALUE and n_mets > 0:
            effective_dims += 1  # the metric serves as the compared column
        if question_type in (QuestionType.LOOKUP, QuestionType.BEF_AFTER) and n_mets > 0:
            effective_dims += 1  # "attendance at the giants game" projects the metric
        if effective_dims < requirement.dimensions:
            missing["dimension"] = requirement.dimensions - effective_dims
        if n_mets < requirement.metrics:
            missing["metric"] = requirement.metrics - n_mets
        if n_filters < requirement.filters:
            missing["filter"] = requirement.filters - n_filters

    terms = aq.abduction_terms() if aq is not None else []
    return MissingOperandReport(question_type=question_type,
                                missing=missing, terms=terms)
