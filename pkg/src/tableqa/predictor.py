"""The operand predictor: learned abductive matching of query terms to
column headings.

Terms and headings share one embedding table.  A query embedding is the
sum of its term embeddings, a column embedding the sum of its heading-term
embeddings; dot products through a softmax give a distribution over the
candidate columns.  Training data comes from counter-factual parses: for a
parse missing one column operand, every candidate column is tried, and the
case is kept only when exactly one column produces the gold answer.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .table import ComprehendedColumn, ComprehendedTable, ROWID_COLUMN
from .text import words_of

EMBEDDING_DIM = 50
MAGIC = b"TQOP"
FORMAT_VERSION = 1

ML_ABDUCTIVE = "machine-learnt abductive match"
RULE_ABDUCTIVE = "rule-based abductive match"


@dataclass(frozen=True)
class TrainingExample:
    terms: tuple[str, ...]  # W: unmatched/placeholder query terms
    columns: tuple[str, ...]  # C: candidate column headings, in table order
    correct: int  # index into columns

    def one_hot(self) -> np.ndarray:
        y = np.zeros(len(self.columns))
        y[self.correct] = 1.0
        return y


@dataclass
class Hyperparams:
    dim: int = EMBEDDING_DIM
    learning_rate: float = 0.05
    epochs: int = 200
    init_scale: float = 0.1
    holdout_fraction: float = 0.3
    patience: int = 20
    seed: int = 0


@dataclass
class TrainingInfo:
    epochs_run: int = 0
    train_loss: list[float] = field(default_factory=list)
    holdout_loss: list[float] = field(default_factory=list)
    holdout_accuracy: float | None = None
    seed: int = 0
    n_train: int = 0
    n_holdout: int = 0


@dataclass
class PredictorModel:
    vocabulary: dict[str, int]  # term -> row in the embedding matrix
    embeddings: np.ndarray  # float32, shape (len(vocabulary), dim)
    info: TrainingInfo | None = None

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]

    def embed_terms(self, terms: list[str]) -> tuple[np.ndarray, int]:
        """Sum of known-term embeddings and the count of known terms.
        Out-of-vocabulary terms contribute the zero vector."""
        vector = np.zeros(self.dim, dtype=np.float64)
        known = 0
        for term in terms:
            row = self.vocabulary.get(term)
            if row is not None:
                vector += self.embeddings[row]
                known += 1
        return vector, known

    def embed_heading(self, heading: str) -> tuple[np.ndarray, int]:
        return self.embed_terms(words_of(heading))


@dataclass(frozen=True)
class Prediction:
    probabilities: tuple[float, ...]  # aligned with the input column list
    argmax: int
    confidence: float
    all_terms_oov: bool = False


class PredictorError(Exception):
    pass


# ---------------------------------------------------------------------------
# Loss and gradients (shared by training and the gradient-check test)
# ---------------------------------------------------------------------------

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def _term_rows(vocabulary: dict[str, int], terms: tuple[str, ...]) -> list[int]:
    return [vocabulary[t] for t in terms if t in vocabulary]


def example_loss_and_grad(embeddings: np.ndarray, vocabulary: dict[str, int],
                          example: TrainingExample) -> tuple[float, dict[int, np.ndarray]]:
    """Cross-entropy loss of one example and its gradient w.r.t. every
    embedding row it touches."""
    query_rows = _term_rows(vocabulary, example.terms)
    column_rows = [_term_rows(vocabulary, tuple(words_of(c))) for c in example.columns]

    query = embeddings[query_rows].sum(axis=0) if query_rows else np.zeros(embeddings.shape[1])
    columns = np.stack([
        embeddings[rows].sum(axis=0) if rows else np.zeros(embeddings.shape[1])
        for rows in column_rows])
    logits = columns @ query
    probs = _softmax(logits)
    loss = -float(np.log(max(probs[example.correct], 1e-300)))

    # d loss / d logits = probs - one_hot
    dlogits = probs.copy()
    dlogits[example.correct] -= 1.0
    dquery = dlogits @ columns
    grads: dict[int, np.ndarray] = {}
    for row in query_rows:
        grads[row] = grads.get(row, 0) + dquery
    for i, rows in enumerate(column_rows):
        if not rows:
            continue
        dcolumn = dlogits[i] * query
        for row in rows:
            grads[row] = grads.get(row, 0) + dcolumn
    return loss, grads


def corpus_loss(embeddings: np.ndarray, vocabulary: dict[str, int],
                examples: list[TrainingExample]) -> float:
    if not examples:
        return 0.0
    return sum(example_loss_and_grad(embeddings, vocabulary, ex)[0]
               for ex in examples) / len(examples)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def build_vocabulary(examples: list[TrainingExample]) -> dict[str, int]:
    """Vocabulary from training-split terms and heading words only."""
    words = set()
    for ex in examples:
        words.update(ex.terms)
        for column in ex.columns:
            words.update(words_of(column))
    return {word: i for i, word in enumerate(sorted(words))}


def train(examples: list[TrainingExample],
          hyperparams: Hyperparams | None = None) -> PredictorModel:
    """Fit the embedding table by full-batch gradient descent.

    The example list is split 70/30 into train/holdout (seeded, recorded);
    training stops early when holdout loss stops improving and the best
    holdout-loss embeddings are kept.
    """
    if not examples:
        raise PredictorError("no training examples")
    hp = hyperparams or Hyperparams()
    rng = np.random.RandomState(hp.seed)

    order = rng.permutation(len(examples))
    n_holdout = int(len(examples) * hp.holdout_fraction)
    holdout = [examples[i] for i in order[:n_holdout]]
    train_split = [examples[i] for i in order[n_holdout:]]
    if not train_split:
        train_split, holdout = holdout, []

    vocabulary = build_vocabulary(train_split)
    embeddings = rng.uniform(-hp.init_scale, hp.init_scale,
                             size=(len(vocabulary), hp.dim))

    info = TrainingInfo(seed=hp.seed, n_train=len(train_split), n_holdout=len(holdout))
    best = embeddings.copy()
    best_loss = float("inf")
    stale = 0
    for _ in range(hp.epochs):
        grad = np.zeros_like(embeddings)
        total = 0.0
        for ex in train_split:
            loss, grads = example_loss_and_grad(embeddings, vocabulary, ex)
            total += loss
            for row, g in grads.items():
                grad[row] += g
        embeddings -= hp.learning_rate * grad / len(train_split)
        info.epochs_run += 1
        info.train_loss.append(total / len(train_split))
        watch = corpus_loss(embeddings, vocabulary, holdout) if holdout else info.train_loss[-1]
        info.holdout_loss.append(watch)
        if watch < best_loss - 1e-12:
            best_loss = watch
            best = embeddings.copy()
            stale = 0
        else:
            stale += 1
            if stale >= hp.patience:
                break

    model = PredictorModel(vocabulary=vocabulary,
                           embeddings=best.astype(np.float32), info=info)
    if holdout:
        correct = sum(
            1 for ex in holdout
            if predict(model, list(ex.terms), list(ex.columns)).argmax == ex.correct)
        info.holdout_accuracy = correct / len(holdout)
    return model


def predict(model: PredictorModel, terms: list[str],
            columns: list[str]) -> Prediction:
    """Softmax over query/column embedding dot products."""
    if not columns:
        raise PredictorError("no candidate columns")
    query, known = model.embed_terms([t.lower() for t in terms])
    logits = np.array([model.embed_heading(c)[0] @ query for c in columns])
    probs = _softmax(logits)
    argmax = int(np.argmax(probs))
    return Prediction(probabilities=tuple(float(p) for p in probs),
                      argmax=argmax, confidence=float(probs[argmax]),
                      all_terms_oov=(known == 0))


# ---------------------------------------------------------------------------
# Serialization: magic, version, dim, vocabulary, float32 vectors, metadata
# ---------------------------------------------------------------------------

def save_model(model: PredictorModel, path: str | Path) -> None:
    path = Path(path)
    terms = sorted(model.vocabulary, key=model.vocabulary.get)
    with open(path, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<III", FORMAT_VERSION, model.dim, len(terms)))
        for term in terms:
            raw = term.encode("utf-8")
            out.write(struct.pack("<I", len(raw)))
            out.write(raw)
        vectors = np.ascontiguousarray(model.embeddings, dtype="<f4")
        out.write(vectors.tobytes())
        meta = b""
        if model.info is not None:
            meta = json.dumps({
                "epochs_run": model.info.epochs_run,
                "train_loss": model.info.train_loss,
                "holdout_loss": model.info.holdout_loss,
                "holdout_accuracy": model.info.holdout_accuracy,
                "seed": model.info.seed,
                "n_train": model.info.n_train,
                "n_holdout": model.info.n_holdout,
            }, sort_keys=True).encode("utf-8")
        out.write(struct.pack("<I", len(meta)))
        out.write(meta)


def load_model(path: str | Path) -> PredictorModel:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise PredictorError(f"not a predictor model file: {path}")
    version, dim, count = struct.unpack_from("<III", blob, 4)
    if version != FORMAT_VERSION:
        raise PredictorError(f"unsupported model version {version}")
    offset = 16
    vocabulary: dict[str, int] = {}
    for i in range(count):
        (length,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        vocabulary[blob[offset:offset + length].decode("utf-8")] = i
        offset += length
    vectors = np.frombuffer(blob, dtype="<f4", count=count * dim,
                            offset=offset).reshape(count, dim).copy()
    offset += count * dim * 4
    (meta_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    info = None
    if meta_len:
        meta = json.loads(blob[offset:offset + meta_len].decode("utf-8"))
        info = TrainingInfo(epochs_run=meta["epochs_run"],
                            train_loss=meta["train_loss"],
                            holdout_loss=meta["holdout_loss"],
                            holdout_accuracy=meta["holdout_accuracy"],
                            seed=meta["seed"], n_train=meta["n_train"],
                            n_holdout=meta["n_holdout"])
    return PredictorModel(vocabulary=vocabulary, embeddings=vectors, info=info)


def export_examples_tsv(examples: list[TrainingExample], path: str | Path) -> None:
    """Inspection dump: terms<TAB>columns<TAB>correct-index, '|'-joined lists."""
    lines = ["\t".join([" ".join(ex.terms), "|".join(ex.columns), str(ex.correct)])
             for ex in examples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


# ---------------------------------------------------------------------------
# Counter-factual training data
# ---------------------------------------------------------------------------

def generate_training_data(corpus) -> list[TrainingExample]:
    """Build training triples from parses with one missing column operand.

    Each corpus item is (annotated query, incomplete parse, table, gold
    answer strings).  Every eligible column is substituted into the missing
    slot and the resulting query executed; an example is emitted only when
    exactly one column reproduces the gold answer.  Zero correct columns
    means the intent was not understood; several mean the match is
    accidental.  Execution failures count as incorrect substitutions.
    """
    from dataclasses import replace

    from .evalharness import answer_match
    from .executor import PlanError, build_plan, execute, normalize_answer
    from .qtypes import QuestionType, find_missing

    examples: list[TrainingExample] = []
    for aq, parse, table, gold in corpus:
        if parse.question_type is None:
            continue
        question_type = QuestionType(parse.question_type)
        report = find_missing(parse, question_type, aq)
        column_kinds = report.column_kinds()
        if sum(column_kinds.values()) != 1 or len(report.missing) != len(column_kinds):
            continue
        (kind,) = column_kinds
        terms = tuple(report.terms)
        if not terms:
            continue
        pool = [c for c in eligible_columns(table, kind)
                if c.id not in parse.dimensions and c.id not in parse.metrics]
        if len(pool) < 2:
            continue  # a forced choice teaches nothing
        correct: list[int] = []
        for i, column in enumerate(pool):
            how_many = question_type == QuestionType.HOW_MANY
            if kind == "metric" or (kind == "column" and (how_many or column.role == "metric")):
                candidate = replace(parse, metrics=parse.metrics + (column.id,))
            else:
                candidate = replace(parse, dimensions=parse.dimensions + (column.id,),
                                    projection=parse.projection or column.id)
            try:
                plan = build_plan(candidate, table)
                result = execute(plan, table)
                answer = normalize_answer(result, question_type,
                                          aq.headword_plural, plan)
            except PlanError:
                continue
            if answer_match(answer, gold):
                correct.append(i)
        if len(correct) == 1:
            examples.append(TrainingExample(
                terms=terms, columns=tuple(c.name for c in pool),
                correct=correct[0]))
    return examples


# ---------------------------------------------------------------------------
# Eligibility, baseline, abduction
# ---------------------------------------------------------------------------

def eligible_columns(table: ComprehendedTable, kind: str) -> list[ComprehendedColumn]:
    """Columns a missing slot of the given kind may be filled with."""
    if kind == "dimension":
        return [c for c in table.columns if c.role == "dimension"]
    if kind == "metric":
        return [c for c in table.columns
                if c.role in ("metric", "time") and c.id != ROWID_COLUMN]
    if kind == "column":
        return [c for c in table.columns
                if c.role in ("dimension", "metric")]
    raise PredictorError(f"not a column-valued operand kind: {kind}")


def baseline_leftmost_string(table: ComprehendedTable) -> str:
    """The left-most string-valued column: the first source column that
    earned no numeric/date/time/score twin."""
    derived_origins = {c.origin for c in table.columns if c.origin}
    for col in table.columns:
        if col.role != "dimension" or col.origin is not None:
            continue
        if col.id == ROWID_COLUMN or col.id in derived_origins:
            continue
        return col.id
    raise PredictorError("table has no string-valued column")


def _baseline_for_kind(table: ComprehendedTable, kind: str) -> str:
    if kind in ("dimension", "column"):
        try:
            return baseline_leftmost_string(table)
        except PredictorError:
            if kind == "column":
                return ROWID_COLUMN
            raise
    metrics = eligible_columns(table, "metric")
    if metrics:
        return metrics[0].id
    return ROWID_COLUMN


@dataclass(frozen=True)
class AbductionFill:
    kind: str  # dimension | metric | column
    column: str
    heading: str
    confidence: float | None
    method: str  # ML_ABDUCTIVE or RULE_ABDUCTIVE


def abduct(parse, report, model: PredictorModel | None,
           table: ComprehendedTable, use_model: bool = True):
    """Fill the missing column operands of a parse.

    Returns (completed parse, fills).  Dimension slots consider dimension
    columns, metric slots metric columns; HOW_MANY/OTHER_TYPE "column"
    slots consider every column.  With the model disabled (or every term
    out of vocabulary) the left-most string-valued column is used instead.
    Slots with no eligible column are left unfilled.
    """
    from dataclasses import replace

    fills: list[AbductionFill] = []
    dimensions = list(parse.dimensions)
    metrics = list(parse.metrics)
    for kind, count in sorted(report.column_kinds().items()):
        pool = eligible_columns(table, kind)
        pool = [c for c in pool if c.id not in dimensions and c.id not in metrics]
        if not pool:
            continue
        chosen: list[tuple[ComprehendedColumn, float | None, str]] = []
        prediction = None
        if use_model and model is not None and report.terms:
            prediction = predict(model, report.terms, [c.name for c in pool])
            if prediction.all_terms_oov:
                prediction = None
        if prediction is not None:
            ranked = sorted(range(len(pool)),
                            key=lambda i: (-prediction.probabilities[i], i))
            for i in ranked[:count]:
                chosen.append((pool[i], prediction.probabilities[i], ML_ABDUCTIVE))
        else:
            fallback = _baseline_for_kind(table, kind)
            pool_ids = [c.id for c in pool]
            picks: list[str] = []
            if fallback in pool_ids:
                picks.append(fallback)
            for column in pool_ids:
                if len(picks) >= count:
                    break
                if column not in picks:
                    picks.append(column)
            for column in picks[:count]:
                chosen.append((table.column(column), None, RULE_ABDUCTIVE))
        how_many = getattr(report.question_type, "value", report.question_type) == "HOW_MANY"
        for column, confidence, method in chosen:
            if kind == "metric" or (kind == "column" and (how_many or column.role == "metric")):
                metrics.append(column.id)  # HOW_MANY counts over this column
            else:
                dimensions.append(column.id)
            fills.append(AbductionFill(kind=kind, column=column.id,
                                       heading=column.name,
                                       confidence=confidence, method=method))
    projection = parse.projection
    if projection is None:
        projection = next((f.column for f in fills if f.kind == "dimension"), None)
    completed = replace(parse, dimensions=tuple(dimensions), metrics=tuple(metrics),
                        projection=projection)
    return completed, fills
