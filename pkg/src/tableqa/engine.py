"""End-to-end engine: comprehend, annotate, parse, rank, type, abduct,
plan, execute, normalize.

Every response carries an Interpretation: the question as the engine
understood it, per-term provenance (exact, approximate, abductive, or
unmatched), the chosen parse, its SQL rendering, and a doubt flag that is
raised whenever anything non-exact contributed.  The caller can show this
to a person so they can decide whether to trust the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .annotate import (
    Annotator, AnnotatedQuery, EmptyQuestionError, EntityTarget, IntentLexicon,
    IntentTarget, LiteralTarget, PlaceholderTarget, EXACT, PLACEHOLDER, SPELL,
    STEM, load_stopwords,
)
from .evalharness import EvalExample
from .executor import (
    Answer, PlanError, build_plan, execute, normalize_answer, plan_to_sql,
)
from .grammar import Grammar, SemanticParse, default_grammar, parse as parse_query
from .predictor import (
    AbductionFill, PredictorModel, generate_training_data, load_model,
)
from .qtypes import QuestionType, classify, find_missing
from .scoring import Weights, rank
from .table import (
    ComprehendedTable, KnowledgeBase, build_knowledge_base, comprehend, load_csv,
)
from .values import RecognizerConfig

DATA_DIR = Path(__file__).parent / "data"

ABDUCTION_MODES = ("ml", "baseline", "off")


@dataclass
class EngineConfig:
    abduction: str = "baseline"
    weights_path: Path = DATA_DIR / "weights.tsv"
    grammar_path: Path = DATA_DIR / "grammar.txt"
    intents_path: Path = DATA_DIR / "intents.tsv"
    stopwords_path: Path = DATA_DIR / "stopwords.txt"
    recognizers_path: Path = DATA_DIR / "recognizers.txt"
    model_path: Path | None = None

    def __post_init__(self) -> None:
        if self.abduction not in ABDUCTION_MODES:
            raise ValueError(f"abduction mode must be one of {ABDUCTION_MODES}")
        if self.abduction == "ml" and self.model_path is None:
            raise ValueError("abduction mode 'ml' requires a model file")


@dataclass(frozen=True)
class TermProvenance:
    term: str
    index: int
    target: str | None
    kind: str  # exact | approximate | machine-learnt abductive |
    #            rule-based abductive | placeholder | unmatched | stopword
    confidence: float | None = None
    used: bool = False


@dataclass
class Interpretation:
    rewritten: str
    terms: list[TermProvenance]
    parse_summary: dict
    sql: str | None
    doubt: bool
    fills: list[AbductionFill] = field(default_factory=list)
    note: str | None = None


@dataclass
class EngineResponse:
    answer: Answer
    interpretation: Interpretation
    question_type: str | None
    candidate_count: int
    abduction_fills: list[AbductionFill]
    unmatched_terms: list[str]
    candidates: list[dict] = field(default_factory=list)


def _parse_summary(candidate: SemanticParse, table: ComprehendedTable) -> dict:
    def name(column: str) -> str:
        try:
            return table.column(column).name
        except KeyError:
            return column

    return {
        "dimensions": [name(c) for c in candidate.dimensions],
        "metrics": [name(c) for c in candidate.metrics],
        "filters": [f.describe() for f in candidate.filters],
        "date_range": candidate.date_range.describe() if candidate.date_range else None,
        "sort": (candidate.sort.direction if candidate.sort else None),
        "limit": candidate.limit,
        "aggregation": candidate.aggregation,
        "answer_kind": candidate.answer_kind,
        "question_type": candidate.question_type,
    }


class Engine:
    def __init__(self, config: EngineConfig | None = None,
                 tables_root: str | Path | None = None):
        self.config = config or EngineConfig()
        self.tables_root = Path(tables_root) if tables_root else None
        self.weights = Weights.load(self.config.weights_path)
        self.grammar = (Grammar.load(self.config.grammar_path)
                        if self.config.grammar_path else default_grammar())
        self.intents = IntentLexicon.load(self.config.intents_path)
        self.stopwords = load_stopwords(self.config.stopwords_path)
        self.recognizers = RecognizerConfig.load(self.config.recognizers_path)
        self.model: PredictorModel | None = None
        if self.config.model_path is not None:
            self.model = load_model(self.config.model_path)
        self._cache: dict[Path, tuple[ComprehendedTable, KnowledgeBase, Annotator]] = {}

    def describe(self) -> str:
        return f"abduction={self.config.abduction}"

    # -- tables --------------------------------------------------------------

    def resolve(self, table_ref: str | Path) -> Path:
        path = Path(table_ref)
        if not path.is_absolute() and self.tables_root is not None:
            path = self.tables_root / path
        return path

    def table(self, table_ref: str | Path) -> tuple[ComprehendedTable, KnowledgeBase, Annotator]:
        path = self.resolve(table_ref)
        if path not in self._cache:
            raw = load_csv(path)
            comprehended = comprehend(raw, self.recognizers)
            kb = build_knowledge_base(comprehended)
            annotator = Annotator(kb, self.intents, self.stopwords)
            self._cache[path] = (comprehended, kb, annotator)
        return self._cache[path]

    # -- the pipeline ----------------------------------------------------------

    def answer(self, question: str, table_ref: str | Path) -> EngineResponse:
        table, _, annotator = self.table(table_ref)
        try:
            aq = annotator.annotate(question)
        except EmptyQuestionError:
            empty = Interpretation(rewritten="", terms=[], parse_summary={},
                                   sql=None, doubt=True, note="empty question")
            return EngineResponse(answer=Answer.none(diagnostic="empty question"),
                                  interpretation=empty, question_type=None,
                                  candidate_count=0, abduction_fills=[],
                                  unmatched_terms=[])

        candidates = parse_query(aq, table, self.grammar)
        ranked = rank(candidates, aq, self.weights)

        chosen: SemanticParse | None = None
        chosen_fills: list[AbductionFill] = []
        chosen_type: QuestionType | None = None
        chosen_answer: Answer | None = None
        chosen_source_key = None
        first_diagnostic: str | None = None
        # Deduction first: a candidate that is already complete beats any
        # that needs abductive guessing.  Abduction is the fallback pass.
        for allow_abduction in (False, True):
            for candidate, _ in ranked:
                outcome = self._complete_and_run(aq, candidate, table,
                                                 allow_abduction=allow_abduction)
                if outcome is None:
                    continue
                chosen, chosen_fills, chosen_type, chosen_answer = outcome
                chosen_source_key = candidate.structural_key()
                break
            if chosen is not None:
                break
        if chosen is None:
            if ranked:
                top = ranked[0][0]
                question_type = classify(aq, top)
                chosen = replace(top, question_type=question_type.value)
                chosen_type = question_type
                report = find_missing(chosen, question_type, aq)
                first_diagnostic = ("missing operands: "
                                    + ", ".join(sorted(report.missing)) if report.missing
                                    else "no executable plan")
            chosen_answer = Answer.none(diagnostic=first_diagnostic or "no candidate parses")

        interpretation = self._interpret(aq, chosen, chosen_fills, table,
                                         chosen_answer, first_diagnostic)
        payload = [{
            "parse": _parse_summary(candidate, table),
            "score": breakdown.total,
            "features": breakdown.features(),
            "chosen": candidate.structural_key() == chosen_source_key,
        } for candidate, breakdown in ranked]
        return EngineResponse(
            answer=chosen_answer,
            interpretation=interpretation,
            question_type=chosen_type.value if chosen_type else None,
            candidate_count=len(candidates),
            abduction_fills=chosen_fills,
            unmatched_terms=aq.unmatched_terms(),
            candidates=payload)

    def _complete_and_run(self, aq: AnnotatedQuery, candidate: SemanticParse,
                          table: ComprehendedTable, allow_abduction: bool = True):
        question_type = classify(aq, candidate)
        typed = replace(candidate, question_type=question_type.value)
        report = find_missing(typed, question_type, aq)
        fills: list[AbductionFill] = []
        if report.missing:
            column_kinds = report.column_kinds()
            if (not allow_abduction or self.config.abduction == "off"
                    or not column_kinds
                    or set(report.missing) != set(column_kinds)):
                return None
            from .predictor import abduct
            typed, fills = abduct(typed, report, self.model, table,
                                  use_model=(self.config.abduction == "ml"))
            if find_missing(typed, question_type, aq).missing:
                return None
        try:
            plan = build_plan(typed, table)
            result = execute(plan, table)
            answer = normalize_answer(result, question_type, aq.headword_plural, plan)
        except PlanError:
            return None
        return typed, fills, question_type, answer

    # -- transparency ----------------------------------------------------------

    def _interpret(self, aq: AnnotatedQuery, chosen: SemanticParse | None,
                   fills: list[AbductionFill], table: ComprehendedTable,
                   answer: Answer | None, note: str | None) -> Interpretation:
        consumed = set(chosen.consumed) if chosen is not None else set()
        fill_by_placeholder: dict[tuple[int, int], AbductionFill] = {}
        if aq.headword is not None and fills:
            dimension_fills = [f for f in fills if f.kind != "metric"]
            if dimension_fills:
                fill_by_placeholder[aq.headword] = dimension_fills[0]

        terms: list[TermProvenance] = []
        doubt = False
        for token in aq.tokens:
            covering = [(i, ann) for i, ann in enumerate(aq.annotations)
                        if token.index in ann.token_indices()]
            covering.sort(key=lambda pair: (pair[0] not in consumed,
                                            _kind_rank(pair[1].kind)))
            entry: TermProvenance | None = None
            for i, ann in covering:
                used = i in consumed
                if isinstance(ann.target, PlaceholderTarget):
                    fill = fill_by_placeholder.get(ann.span)
                    if fill is not None:
                        entry = TermProvenance(
                            term=token.surface, index=token.index,
                            target=fill.heading, kind=fill.method,
                            confidence=fill.confidence, used=True)
                        doubt = True
                        break
                    entry = TermProvenance(term=token.surface, index=token.index,
                                           target=None, kind=PLACEHOLDER, used=used)
                    if used:
                        doubt = True
                    break
                kind = ("exact" if ann.kind == EXACT
                        else "approximate")
                target = _describe_target(ann.target, table)
                entry = TermProvenance(term=token.surface, index=token.index,
                                       target=target, kind=kind, used=used)
                if used and kind != "exact":
                    doubt = True
                break
            if entry is None:
                kind = "stopword" if token.surface in self.stopwords else "unmatched"
                entry = TermProvenance(term=token.surface, index=token.index,
                                       target=None, kind=kind)
            terms.append(entry)

        doubt = doubt or bool(fills)
        rewritten = _rewrite(aq, fill_by_placeholder)
        sql = None
        if chosen is not None and answer is not None and answer.plan is not None:
            sql = plan_to_sql(answer.plan, table)
        summary = _parse_summary(chosen, table) if chosen is not None else {}
        return Interpretation(rewritten=rewritten, terms=terms,
                              parse_summary=summary, sql=sql, doubt=doubt,
                              fills=list(fills),
                              note=("We think you meant: " + rewritten) if doubt else note)


def _kind_rank(kind: str) -> int:
    order = {EXACT: 0, STEM: 1, SPELL: 2, PLACEHOLDER: 3}
    return order.get(kind, 4)


def _describe_target(target, table: ComprehendedTable) -> str:
    from .table import CellRef, HeadingRef

    if isinstance(target, EntityTarget):
        parts = []
        for ref in target.refs[:3]:
            if isinstance(ref, HeadingRef):
                parts.append(f"column '{table.column(ref.column).name}'")
            elif isinstance(ref, CellRef):
                parts.append(f"cell '{target.key}' in '{table.column(ref.column).name}'")
        seen: list[str] = []
        for part in parts:
            if part not in seen:
                seen.append(part)
        return "; ".join(seen)
    if isinstance(target, IntentTarget):
        return f"intent {target.intent}"
    if isinstance(target, LiteralTarget):
        return "literal"
    return ""


def _rewrite(aq: AnnotatedQuery,
             fills: dict[tuple[int, int], "AbductionFill"]) -> str:
    words: list[str] = []
    skip_until = -1
    for token in aq.tokens:
        if token.index < skip_until:
            continue
        replaced = False
        for span, fill in fills.items():
            if span[0] == token.index:
                words.append(f"[{fill.heading.lower()}]")
                skip_until = span[0] + span[1]
                replaced = True
                break
        if not replaced:
            words.append(token.surface)
    return " ".join(words)


def answer_question(question: str, table_ref: str | Path,
                    config: EngineConfig | None = None) -> tuple[Answer, Interpretation]:
    """One-shot convenience: run the full pipeline over a single table."""
    engine = Engine(config)
    response = engine.answer(question, table_ref)
    return response.answer, response.interpretation


# ---------------------------------------------------------------------------
# Training-corpus construction (ties the pipeline to the predictor)
# ---------------------------------------------------------------------------

def build_incomplete_corpus(engine: Engine, examples: list[EvalExample],
                            limit: int | None = None) -> list:
    """Collect (aq, incomplete parse, table, gold) items whose best usable
    candidate misses exactly one column operand: the counter-factual
    generator's input.

    Mirrors the engine's selection: a candidate only counts as complete if
    it actually plans, so vacuous readings fall through here exactly as
    they do when answering.
    """
    corpus = []
    for example in examples[:limit]:
        try:
            table, _, annotator = engine.table(example.table_ref)
            aq = annotator.annotate(example.question)
        except Exception:
            continue
        candidates = parse_query(aq, table, engine.grammar)
        ranked = rank(candidates, aq, engine.weights)
        for candidate, _ in ranked:
            question_type = classify(aq, candidate)
            typed = replace(candidate, question_type=question_type.value)
            report = find_missing(typed, question_type, aq)
            if not report.missing:
                try:
                    build_plan(typed, table)
                    break  # genuinely complete; nothing to learn from
                except PlanError:
                    continue
            kinds = report.column_kinds()
            if (sum(kinds.values()) == 1
                    and set(report.missing) == set(kinds) and report.terms):
                corpus.append((aq, typed, table, example.gold))
                break
    return corpus


def train_from_dataset(engine: Engine, examples: list[EvalExample],
                       limit: int | None = None, hyperparams=None):
    """End-to-end training: incomplete parses -> counter-factuals -> model."""
    from .predictor import train

    corpus = build_incomplete_corpus(engine, examples, limit)
    training = generate_training_data(corpus)
    if not training:
        raise ValueError("no counter-factual training examples were generated")
    model = train(training, hyperparams)
    return model, training
