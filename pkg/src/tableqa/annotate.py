"""Question annotation: map phrases to table entities and intent words.

Matching is simple string matching over the knowledge base, augmented by
stemming and spell correction.  Phrases can carry multiple annotations;
disambiguation is left to parsing and scoring.  The annotator also finds
the headword (the noun phrase after the question word) and annotates it as
a placeholder, marking it as input for abductive matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .table import KnowledgeBase, Reference
from .text import levenshtein, normalize, stem
from .values import Date, Number, TypedValue, parse_cell

EXACT = "exact"
STEM = "stem"
SPELL = "spell-corrected"
PLACEHOLDER = "placeholder"

QUESTION_WORDS = {"who", "what", "which", "where", "when", "how", "whom", "whose"}
# Question words that themselves stand in for the thing asked about
# ("who" -> some person column), so they become their own headword.
SELF_HEADWORD_WORDS = {"who", "whom", "whose", "where", "when"}

PLURAL_EXCEPTIONS = {
    "series", "species", "news", "is", "was", "has", "its", "this",
    "less", "plus", "versus", "status", "ss",
}

MAX_PARTIAL_KEYS = 8


class EmptyQuestionError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    surface: str  # lowercased
    stem: str
    start: int  # character offsets into the original question
    end: int
    index: int


@dataclass(frozen=True)
class EntityTarget:
    key: str
    refs: tuple[Reference, ...]


@dataclass(frozen=True)
class IntentTarget:
    intent: str
    phrase: str


@dataclass(frozen=True)
class PlaceholderTarget:
    pass


@dataclass(frozen=True)
class LiteralTarget:
    value: TypedValue


Target = EntityTarget | IntentTarget | PlaceholderTarget | LiteralTarget


@dataclass(frozen=True)
class Annotation:
    span: tuple[int, int]  # (first token index, token count)
    target: Target
    kind: str  # exact | stem | spell-corrected | placeholder
    provenance: str

    def token_indices(self) -> range:
        return range(self.span[0], self.span[0] + self.span[1])


@dataclass
class AnnotatedQuery:
    question: str
    tokens: list[Token]
    annotations: list[Annotation]
    headword: tuple[int, int] | None = None
    headword_plural: bool = False
    unmatched: list[int] = field(default_factory=list)

    def covered_indices(self) -> set[int]:
        covered: set[int] = set()
        for ann in self.annotations:
            covered.update(ann.token_indices())
        return covered

    def unmatched_terms(self) -> list[str]:
        return [self.tokens[i].surface for i in self.unmatched]

    def abduction_terms(self) -> list[str]:
        """Terms usable by the operand predictor: unmatched tokens plus
        tokens assigned only to a placeholder."""
        entity_covered: set[int] = set()
        placeholder_covered: set[int] = set()
        for ann in self.annotations:
            if isinstance(ann.target, EntityTarget):
                entity_covered.update(ann.token_indices())
            elif isinstance(ann.target, PlaceholderTarget):
                placeholder_covered.update(ann.token_indices())
        terms = {self.tokens[i].surface for i in self.unmatched}
        terms.update(self.tokens[i].surface
                     for i in placeholder_covered - entity_covered)
        return sorted(terms)

    def intents_present(self) -> set[str]:
        return {ann.target.intent for ann in self.annotations
                if isinstance(ann.target, IntentTarget)}


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_JOINERS = set(".,:/-'’–")


def tokenize(question: str) -> list[Token]:
    """Lowercased word tokens with stable character spans.

    Punctuation is dropped except when it joins alphanumerics, so numbers,
    dates and scores ("1,234.5", "2005/06/27", "21-14") stay single tokens.
    """
    if not question or not question.strip():
        raise EmptyQuestionError("question is empty")
    tokens: list[Token] = []
    i, n = 0, len(question)
    while i < n:
        ch = question[i]
        if not ch.isalnum():
            i += 1
            continue
        j = i + 1
        while j < n:
            ch = question[j]
            if ch.isalnum():
                j += 1
            elif ch in _JOINERS and j + 1 < n and question[j + 1].isalnum():
                j += 2
            else:
                break
        surface = question[i:j].lower()
        tokens.append(Token(surface=surface, stem=stem(surface),
                            start=i, end=j, index=len(tokens)))
        i = j
    if not tokens:
        raise EmptyQuestionError("question has no word tokens")
    return tokens


# ---------------------------------------------------------------------------
# Lexicons
# ---------------------------------------------------------------------------

@dataclass
class IntentLexicon:
    phrases: dict[str, str]  # normalized phrase -> intent id
    max_tokens: int = 1

    @classmethod
    def load(cls, path: str | Path) -> "IntentLexicon":
        phrases: dict[str, str] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.rstrip()
            if not line or line.startswith("#"):
                continue
            phrase, _, intent = line.partition("\t")
            phrase = normalize(phrase)
            if not phrase or not intent:
                raise ValueError(f"bad intent line: {raw!r}")
            phrases[phrase] = intent.strip()
        lex = cls(phrases=phrases)
        lex.max_tokens = max((len(p.split()) for p in phrases), default=1)
        return lex


def load_stopwords(path: str | Path) -> set[str]:
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return words


# ---------------------------------------------------------------------------
# Annotator
# ---------------------------------------------------------------------------

def _token_matches(token: Token, key_word: str) -> tuple[bool, bool]:
    """(matches, surface_equal) of a question token against a key word."""
    if token.surface == key_word:
        return True, True
    if token.stem == stem(key_word):
        return True, False
    return False, False


class Annotator:
    def __init__(self, kb: KnowledgeBase, intents: IntentLexicon,
                 stopwords: set[str]):
        self.kb = kb
        self.intents = intents
        self.stopwords = stopwords

    # -- entity matching ----------------------------------------------------

    def _full_key_matches(self, tokens: list[Token], i: int) -> list[tuple[int, str, str]]:
        """Matches of complete KB keys anchored at token i.

        Returns (span length, key, kind) for the keys achieving the longest
        span.  Key words must appear in order; question stopwords may be
        skipped between them (such elided matches count as approximate).
        """
        first = tokens[i]
        candidates = set(self.kb.keys_containing(first.surface))
        candidates.update(self.kb.keys_with_stem(first.stem))
        results: list[tuple[int, str, str]] = []
        for key in candidates:
            words = key.split()
            ok, surface_eq = _token_matches(first, words[0])
            if not ok:
                continue
            j = i + 1
            exact = surface_eq
            failed = False
            for word in words[1:]:
                # a stopword may be elided, but only when it is not itself
                # the key word expected next ("of mice AND men")
                while (j < len(tokens)
                       and tokens[j].surface in self.stopwords
                       and not _token_matches(tokens[j], word)[0]):
                    j += 1
                    exact = False
                if j >= len(tokens):
                    failed = True
                    break
                ok, surface_eq = _token_matches(tokens[j], word)
                if not ok:
                    failed = True
                    break
                exact = exact and surface_eq
                j += 1
            if failed:
                continue
            length = j - i
            results.append((length, key, EXACT if exact else STEM))
        if not results:
            return []
        best = max(length for length, _, _ in results)
        return sorted([r for r in results if r[0] == best], key=lambda r: r[1])

    def _partial_key_matches(self, tokens: list[Token], i: int) -> list[tuple[int, str]]:
        """Matches of a contiguous run of key words starting anywhere inside
        a multi-word key ("barton" against the cell "Mischa Barton")."""
        first = tokens[i]
        candidates = set(self.kb.keys_containing(first.surface))
        candidates.update(self.kb.keys_with_stem(first.stem))
        results: list[tuple[int, str]] = []
        for key in candidates:
            words = key.split()
            if len(words) <= 1:
                continue
            best_len = 0
            for p, word in enumerate(words):
                ok, _ = _token_matches(first, word)
                if not ok:
                    continue
                j, q = i + 1, p + 1
                while q < len(words) and j < len(tokens):
                    while (j < len(tokens)
                           and tokens[j].surface in self.stopwords
                           and not _token_matches(tokens[j], words[q])[0]):
                        j += 1
                    if j >= len(tokens):
                        break
                    ok, _ = _token_matches(tokens[j], words[q])
                    if not ok:
                        break
                    j += 1
                    q += 1
                best_len = max(best_len, j - i)
            if best_len:
                results.append((best_len, key))
        results.sort(key=lambda r: (-r[0], r[1]))
        return results[:MAX_PARTIAL_KEYS]

    def _match_entities(self, tokens: list[Token]) -> list[Annotation]:
        annotations = []
        full_by_position: dict[int, list[tuple[int, str, str]]] = {}
        full_covered: set[int] = set()
        for i in range(len(tokens)):
            full = self._full_key_matches(tokens, i)
            full_by_position[i] = full
            for length, key, kind in full:
                refs = tuple(self.kb.entries[key])
                label = "exact syntactic match" if kind == EXACT else "approximate syntactic match"
                annotations.append(Annotation(
                    span=(i, length), target=EntityTarget(key, refs), kind=kind,
                    provenance=f"{label} of '{' '.join(t.surface for t in tokens[i:i+length])}' to '{key}'"))
                full_covered.update(range(i, i + length))
        for i, token in enumerate(tokens):
            if full_by_position[i] or token.surface in self.stopwords:
                continue
            for length, key in self._partial_key_matches(tokens, i):
                # a partial echo inside a complete match ("west" within an
                # already-matched "lakewood west") is noise, not a mention
                if set(range(i, i + length)) <= full_covered:
                    continue
                refs = tuple(self.kb.entries[key])
                annotations.append(Annotation(
                    span=(i, length), target=EntityTarget(key, refs), kind=STEM,
                    provenance=f"approximate syntactic match of "
                               f"'{' '.join(t.surface for t in tokens[i:i+length])}' inside '{key}'"))
        return annotations

    def _match_intents(self, tokens: list[Token]) -> list[Annotation]:
        annotations = []
        for i in range(len(tokens)):
            best: tuple[int, str] | None = None
            for length in range(min(self.intents.max_tokens, len(tokens) - i), 0, -1):
                phrase = " ".join(t.surface for t in tokens[i:i + length])
                intent = self.intents.phrases.get(phrase)
                if intent is not None:
                    best = (length, intent)
                    break
            if best is not None:
                length, intent = best
                phrase = " ".join(t.surface for t in tokens[i:i + length])
                annotations.append(Annotation(
                    span=(i, length), target=IntentTarget(intent, phrase), kind=EXACT,
                    provenance=f"intent word '{phrase}' ({intent})"))
        return annotations

    def _match_literals(self, tokens: list[Token]) -> list[Annotation]:
        annotations = []
        for token in tokens:
            value = parse_cell(token.surface)
            if isinstance(value, Number):
                annotations.append(Annotation(
                    span=(token.index, 1), target=LiteralTarget(value), kind=EXACT,
                    provenance=f"number literal {value.value:g}"))
            elif isinstance(value, Date):
                annotations.append(Annotation(
                    span=(token.index, 1), target=LiteralTarget(value), kind=EXACT,
                    provenance=f"date literal '{token.surface}'"))
                if value.year is not None and value.month is None:
                    # a bare year doubles as a plain number for comparisons
                    annotations.append(Annotation(
                        span=(token.index, 1),
                        target=LiteralTarget(Number(float(value.year), surface=token.surface)),
                        kind=EXACT, provenance=f"number literal {value.year}"))
        return annotations

    def _spell_corrections(self, tokens: list[Token],
                           covered: set[int]) -> list[Annotation]:
        annotations = []
        vocabulary = sorted(self.kb.vocabulary())
        for token in tokens:
            if token.index in covered or token.surface in self.stopwords:
                continue
            if not token.surface.isalpha() or len(token.surface) < 2:
                continue
            cap = 2 if len(token.surface) >= 8 else 1
            best: tuple[int, int, str] | None = None  # (distance, -frequency, word)
            for word in vocabulary:
                distance = levenshtein(token.surface, word, cap=cap)
                if distance == 0 or distance > cap:
                    continue
                entry = (distance, -self.kb.token_frequency.get(word, 0), word)
                if best is None or entry < best:
                    best = entry
            if best is None:
                continue
            _, _, corrected = best
            for key in sorted(self.kb.keys_containing(corrected)):
                refs = tuple(self.kb.entries[key])
                annotations.append(Annotation(
                    span=(token.index, 1), target=EntityTarget(key, refs), kind=SPELL,
                    provenance=f"spell-corrected '{token.surface}' to '{corrected}' in '{key}'"))
        return annotations

    # -- headword -----------------------------------------------------------

    def detect_headword(self, tokens: list[Token],
                        annotations: list[Annotation]) -> tuple[tuple[int, int] | None, bool]:
        """First noun phrase after the question word, with a plural flag."""
        intent_covered: set[int] = set()
        for ann in annotations:
            if isinstance(ann.target, IntentTarget):
                intent_covered.update(ann.token_indices())
        qword_index = None
        for token in tokens:
            if token.surface in QUESTION_WORDS:
                qword_index = token.index
                break
        if qword_index is None:
            return None, False
        qword = tokens[qword_index].surface
        if qword in SELF_HEADWORD_WORDS:
            return (qword_index, 1), False
        start = None
        for token in tokens[qword_index + 1:]:
            if token.surface in self.stopwords or token.index in intent_covered:
                if start is not None:
                    break
                continue
            if not token.surface.isalpha():
                if start is not None:
                    break
                continue
            if start is None:
                start = token.index
                end = token.index
            else:
                end = token.index
        if start is None:
            return None, False
        last = tokens[end].surface
        plural = (last.endswith("s") and not last.endswith("ss")
                  and len(last) > 3 and last not in PLURAL_EXCEPTIONS)
        return (start, end - start + 1), plural

    # -- entry point --------------------------------------------------------

    def annotate(self, question: str) -> AnnotatedQuery:
        tokens = tokenize(question)
        annotations = self._match_entities(tokens)
        annotations.extend(self._match_intents(tokens))
        annotations.extend(self._match_literals(tokens))
        covered = set()
        for ann in annotations:
            covered.update(ann.token_indices())
        annotations.extend(self._spell_corrections(tokens, covered))

        headword, plural = self.detect_headword(tokens, annotations)
        if headword is not None:
            start, length = headword
            phrase = " ".join(t.surface for t in tokens[start:start + length])
            annotations.append(Annotation(
                span=headword, target=PlaceholderTarget(), kind=PLACEHOLDER,
                provenance=f"headword '{phrase}' held as placeholder"))

        covered = set()
        for ann in annotations:
            covered.update(ann.token_indices())
        unmatched = [t.index for t in tokens
                     if t.index not in covered and t.surface not in self.stopwords]
        return AnnotatedQuery(question=question, tokens=tokens,
                              annotations=annotations, headword=headword,
                              headword_plural=plural, unmatched=unmatched)


def annotate(question: str, kb: KnowledgeBase, intents: IntentLexicon,
             stopwords: set[str]) -> AnnotatedQuery:
    return Annotator(kb, intents, stopwords).annotate(question)
