"""Rank candidate parses with a linear model over hand-assigned weights.

The lead feature is annotation coverage: a parse that accounts for more
question words outranks one that accounts for fewer.  Ties break on match
quality (exact over approximate) and match source (header over cell).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .annotate import AnnotatedQuery, EntityTarget, EXACT, SPELL, STEM
from .grammar import SemanticParse
from .table import CellRef, HeadingRef

FEATURES = ("annotated_words", "exact_matches", "approximate_matches",
            "header_matches", "cell_matches")


@dataclass(frozen=True)
class Weights:
    annotated_words: float = 10.0
    exact_matches: float = 1.0
    approximate_matches: float = 0.25
    header_matches: float = 0.5
    cell_matches: float = 0.4

    @classmethod
    def load(cls, path: str | Path) -> "Weights":
        values = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            name, _, weight = line.partition("\t")
            name = name.strip()
            if name not in FEATURES:
                raise ValueError(f"unknown scoring feature {name!r}")
            values[name] = float(weight)
        return cls(**values)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURES}


DEFAULT_WEIGHTS = Weights()


@dataclass(frozen=True)
class ScoreBreakdown:
    annotated_words: int
    exact_matches: int
    approximate_matches: int
    header_matches: int
    cell_matches: int
    total: float
    contributions: dict[str, float] = field(default_factory=dict)

    def features(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in FEATURES}


def score(candidate: SemanticParse, aq: AnnotatedQuery,
          weights: Weights = DEFAULT_WEIGHTS) -> ScoreBreakdown:
    """Feature values and weighted total for one candidate parse."""
    covered: set[int] = set()
    exact = approximate = header = cell = 0
    for idx in candidate.consumed:
        ann = aq.annotations[idx]
        covered.update(ann.token_indices())
        if ann.kind == EXACT:
            exact += 1
        elif ann.kind in (STEM, SPELL):
            approximate += 1
        if isinstance(ann.target, EntityTarget):
            kinds = {type(ref) for ref in ann.target.refs}
            if HeadingRef in kinds:
                header += 1
            if CellRef in kinds:
                cell += 1
    values = {
        "annotated_words": len(covered),
        "exact_matches": exact,
        "approximate_matches": approximate,
        "header_matches": header,
        "cell_matches": cell,
    }
    contributions = {name: values[name] * getattr(weights, name) for name in FEATURES}
    return ScoreBreakdown(total=sum(contributions.values()),
                          contributions=contributions, **values)


def rank(candidates: list[SemanticParse], aq: AnnotatedQuery,
         weights: Weights = DEFAULT_WEIGHTS) -> list[tuple[SemanticParse, ScoreBreakdown]]:
    """Candidates in descending score order.

    The sort is stable: equal scores keep their input order (which the
    parser produces deterministically), with the structural key as a last
    formal tie-break.
    """
    indexed = [(candidate, score(candidate, aq, weights), i)
               for i, candidate in enumerate(candidates)]
    indexed.sort(key=lambda triple: (-triple[1].total, triple[2],
                                     repr(triple[0].structural_key())))
    return [(candidate, breakdown) for candidate, breakdown, _ in indexed]
