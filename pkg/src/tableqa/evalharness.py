"""Dataset loading, answer matching, and the benchmark evaluation loop.

The dataset ships as TSV files of (id, utterance, context, targetValue)
rows; context points at a CSV table, and multiple gold answers are joined
by '|'.  Published split sizes are enforced on load so silent truncation
cannot skew results.  Answer matching canonicalizes both sides (numbers,
dates, folded strings) and compares lists as multisets.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .executor import Answer
from .text import normalize
from .values import Date, Empty, Number, TypedValue, parse_cell, surface_of

PUBLISHED_SPLITS = {
    "train": ("data/training.tsv", 14152),
    "test": ("data/pristine-unseen-tables.tsv", 4344),
    "extra": ("data/pristine-seen-tables.tsv", 3537),
}


class DatasetError(Exception):
    pass


@dataclass(frozen=True)
class EvalExample:
    id: str
    question: str
    table_ref: str  # path relative to the dataset root
    gold: tuple[str, ...]


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
            if nxt == "p":
                out.append("|")
                i += 2
                continue
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def load_dataset(root: str | Path, split: str,
                 expected_count: int | None = -1) -> list[EvalExample]:
    """Read one split of the dataset.

    ``expected_count`` defaults to the published size of the split; pass
    None to skip the check (reduced fixture copies).
    """
    root = Path(root)
    if split not in PUBLISHED_SPLITS:
        raise DatasetError(f"unknown split {split!r}; expected one of "
                           f"{sorted(PUBLISHED_SPLITS)}")
    relative, published = PUBLISHED_SPLITS[split]
    if expected_count == -1:
        expected_count = published
    path = root / relative
    if not path.exists():
        raise DatasetError(f"missing dataset file: {path}")
    examples = []
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
        if header[:4] != ["id", "utterance", "context", "targetValue"]:
            raise DatasetError(f"unexpected dataset header in {path}: {header}")
        for line_no, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 4:
                raise DatasetError(f"{path}:{line_no}: expected 4 fields, got {len(fields)}")
            example_id, utterance, context, target = fields[:4]
            gold = tuple(_unescape(part) for part in target.split("|"))
            if not any(g.strip() for g in gold):
                raise DatasetError(f"{path}:{line_no}: empty gold answer")
            examples.append(EvalExample(id=example_id,
                                        question=_unescape(utterance),
                                        table_ref=context, gold=gold))
    if expected_count is not None and len(examples) != expected_count:
        raise DatasetError(
            f"split {split!r} has {len(examples)} examples, expected {expected_count}")
    return examples


# ---------------------------------------------------------------------------
# Answer matching
# ---------------------------------------------------------------------------

_NUMBER_CLEAN_RE = re.compile(r"^[\s$]*([+-]?[\d,]*\.?\d+)\s*%?\s*$")


def _fold_text(text: str) -> str:
    text = unicodedata.normalize("NFKD", text)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    return normalize(text)


def canonical_of_text(text: str):
    """Comparable form of a gold answer string: number, date, or folded text."""
    stripped = text.strip()
    m = _NUMBER_CLEAN_RE.match(stripped)
    if m:
        try:
            return ("N", round(float(m.group(1).replace(",", "")), 6))
        except ValueError:
            pass
    value = parse_cell(stripped)
    if isinstance(value, Date):
        return _canonical_of_date(value)
    return ("S", _fold_text(stripped))


def _canonical_of_date(value: Date):
    if value.month is None and value.day is None:
        return ("N", round(float(value.year), 6))
    return ("D", value.year or -1, value.month or -1, value.day or -1)


def canonical_of_value(value: TypedValue):
    if isinstance(value, Number):
        return ("N", round(value.value, 6))
    if isinstance(value, Date):
        return _canonical_of_date(value)
    if isinstance(value, Empty):
        return ("S", "")
    return canonical_of_text(surface_of(value))


def answer_match(predicted: Answer, gold: list[str] | tuple[str, ...]) -> bool:
    """Multiset equality of canonicalized answers; a none answer never matches."""
    if predicted is None or predicted.kind == "none" or not predicted.values:
        return False
    mine = sorted(map(repr, (canonical_of_value(v) for v in predicted.values)))
    theirs = sorted(map(repr, (canonical_of_text(g) for g in gold)))
    return mine == theirs


# ---------------------------------------------------------------------------
# Evaluation loop
# ---------------------------------------------------------------------------

@dataclass
class EvalReport:
    total: int = 0
    correct: int = 0
    by_type: dict[str, list[int]] = field(default_factory=dict)  # type -> [n, correct]
    candidate_counts: list[int] = field(default_factory=list)
    abduction_used: int = 0
    unmatched_terms: Counter = field(default_factory=Counter)
    errors: int = 0
    config: str = ""

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def average_candidates(self) -> float:
        if not self.candidate_counts:
            return 0.0
        return sum(self.candidate_counts) / len(self.candidate_counts)

    def add(self, question_type: str, matched: bool, candidates: int,
            abduction_fired: bool, unmatched: list[str]) -> None:
        self.total += 1
        self.correct += int(matched)
        slot = self.by_type.setdefault(question_type, [0, 0])
        slot[0] += 1
        slot[1] += int(matched)
        self.candidate_counts.append(candidates)
        self.abduction_used += int(abduction_fired)
        self.unmatched_terms.update(unmatched)

    def merge(self, other: "EvalReport") -> "EvalReport":
        """Combine partial reports (associative, for parallel evaluation)."""
        merged = EvalReport(config=self.config or other.config)
        merged.total = self.total + other.total
        merged.correct = self.correct + other.correct
        merged.errors = self.errors + other.errors
        merged.abduction_used = self.abduction_used + other.abduction_used
        merged.candidate_counts = self.candidate_counts + other.candidate_counts
        merged.unmatched_terms = self.unmatched_terms + other.unmatched_terms
        for source in (self.by_type, other.by_type):
            for qtype, (n, ok) in source.items():
                slot = merged.by_type.setdefault(qtype, [0, 0])
                slot[0] += n
                slot[1] += ok
        return merged

    def format(self) -> str:
        lines = [f"config: {self.config}",
                 f"examples: {self.total}  correct: {self.correct}  "
                 f"accuracy: {self.accuracy:.2%}",
                 f"average candidate parses: {self.average_candidates:.2f}",
                 f"abduction fired on {self.abduction_used} questions",
                 "per-type breakdown:"]
        for qtype in sorted(self.by_type):
            n, ok = self.by_type[qtype]
            lines.append(f"  {qtype:11} {ok:5}/{n:<5} ({ok / n:.1%})")
        top = self.unmatched_terms.most_common(15)
        if top:
            lines.append("frequent unmatched terms: "
                         + ", ".join(f"{t} ({n})" for t, n in top))
        return "\n".join(lines)

    def to_tsv(self) -> str:
        rows = [("total", str(self.total)), ("correct", str(self.correct)),
                ("accuracy", f"{self.accuracy:.6f}"),
                ("average_candidates", f"{self.average_candidates:.4f}"),
                ("abduction_used", str(self.abduction_used))]
        rows += [(f"type_{qtype}", f"{ok}/{n}")
                 for qtype, (n, ok) in sorted(self.by_type.items())]
        return "\n".join(f"{k}\t{v}" for k, v in rows) + "\n"


def evaluate(engine, examples: list[EvalExample],
             limit: int | None = None) -> EvalReport:
    """Run the full pipeline over examples; failures count as incorrect."""
    report = EvalReport(config=engine.describe())
    for example in examples[:limit]:
        try:
            response = engine.answer(example.question, example.table_ref)
            matched = answer_match(response.answer, example.gold)
            report.add(question_type=response.question_type or "OTHER_TYPE",
                       matched=matched,
                       candidates=response.candidate_count,
                       abduction_fired=bool(response.abduction_fills),
                       unmatched=response.unmatched_terms)
        except Exception:
            report.errors += 1
            report.add(question_type="ERROR", matched=False, candidates=0,
                       abduction_fired=False, unmatched=[])
    return report


# ---------------------------------------------------------------------------
# Dataset statistics
# ---------------------------------------------------------------------------

def _question_terms(question: str) -> set[str]:
    return set(normalize(question).split())


def _table_headings(root: Path, table_ref: str) -> set[str]:
    import csv as _csv

    path = root / table_ref
    try:
        with open(path, newline="", encoding="utf-8-sig") as handle:
            reader = _csv.reader(handle)
            header = next(reader, [])
    except OSError:
        return set()
    return {normalize(cell) for cell in header if normalize(cell)}


@dataclass
class AssociationCensus:
    """Co-occurrence of question terms and column headings, counted over
    distinct tables."""

    term_tables: dict[str, set[str]] = field(default_factory=dict)
    table_headings: dict[str, set[str]] = field(default_factory=dict)

    def pair(self, term: str, heading: str) -> tuple[int, int]:
        tables = self.term_tables.get(normalize(term), set())
        heading = normalize(heading)
        with_heading = sum(1 for t in tables
                           if heading in self.table_headings.get(t, set()))
        return (len(tables), with_heading)

    def top_pairs(self, n: int = 20, min_tables: int = 2) -> list[tuple[str, str, int]]:
        counts: Counter = Counter()
        for term, tables in self.term_tables.items():
            for table in tables:
                for heading in self.table_headings.get(table, set()):
                    counts[(term, heading)] += 1
        out = [(term, heading, count)
               for (term, heading), count in counts.most_common()
               if count >= min_tables]
        return out[:n]


def association_census(examples: list[EvalExample],
                       root: str | Path) -> AssociationCensus:
    """Count, per (term, heading), the tables whose questions contain the
    term and among them the tables carrying that heading."""
    root = Path(root)
    census = AssociationCensus()
    for example in examples:
        if example.table_ref not in census.table_headings:
            census.table_headings[example.table_ref] = _table_headings(root, example.table_ref)
        for term in _question_terms(example.question):
            census.term_tables.setdefault(term, set()).add(example.table_ref)
    return census


def yes_no_census(examples: list[EvalExample]) -> tuple[int, int]:
    """(count of yes/no questions, count answered 'yes'), judged by the
    gold answer being exactly yes or no."""
    total = yes = 0
    for example in examples:
        if len(example.gold) != 1:
            continue
        answer = example.gold[0].strip().lower()
        if answer in ("yes", "no"):
            total += 1
            yes += int(answer == "yes")
    return total, yes
