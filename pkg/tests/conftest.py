import os
from pathlib import Path

import pytest

from tableqa.annotate import Annotator, IntentLexicon, load_stopwords
from tableqa.engine import DATA_DIR, Engine, EngineConfig, train_from_dataset
from tableqa.evalharness import load_dataset
from tableqa.predictor import save_model
from tableqa.table import build_knowledge_base, comprehend, load_csv

FIXTURES = Path(__file__).parent / "fixtures"
TABLES = FIXTURES / "tables"
MINI_DATASET = FIXTURES / "mini_dataset"

# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_runtest_logreport(report):
    if (report.skipped and "test_acceptance" in report.nodeid
            and report.when in ("setup", "call")):
        reason = (report.longrepr[2] if isinstance(report.longrepr, tuple)
                  else str(report.longrepr))
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE_LINES.append(f"[SKIP] {name} :: {reason}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def wtq_root() -> Path | None:
    """The real benchmark dataset, when mounted."""
    candidates = [os.environ.get("TABLEQA_WTQ_DIR")]
    candidates += [Path(__file__).parent.parent / "data" / name
                   for name in ("WikiTableQuestions", "WikiTableQuestions-1.0.2")]
    for candidate in candidates:
        if candidate and (Path(candidate) / "data" / "training.tsv").exists():
            return Path(candidate)
    return None


requires_wtq = pytest.mark.skipif(
    wtq_root() is None,
    reason="WikiTableQuestions v1.0.2 not present (no network in this environment); "
           "set TABLEQA_WTQ_DIR or place it under data/WikiTableQuestions to run")


@pytest.fixture(scope="session")
def intents():
    return IntentLexicon.load(DATA_DIR / "intents.tsv")


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords(DATA_DIR / "stopwords.txt")


@pytest.fixture(scope="session")
def fixture_table():
    cache = {}

    def load(name: str):
        if name not in cache:
            raw = load_csv(TABLES / name)
            table = comprehend(raw)
            cache[name] = (table, build_knowledge_base(table))
        return cache[name]

    return load


@pytest.fixture(scope="session")
def annotator_for(fixture_table, intents, stopwords):
    def make(name: str) -> Annotator:
        _, kb = fixture_table(name)
        return Annotator(kb, intents, stopwords)

    return make


@pytest.fixture(scope="session")
def regression_rows():
    rows = []
    for line in (FIXTURES / "regression.tsv").read_text().splitlines()[1:]:
        question, table, gold, qtype = line.split("\t")
        rows.append((question, table, tuple(gold.split("|")), qtype))
    assert len(rows) == 50
    return rows


@pytest.fixture(scope="session")
def mini_examples():
    return load_dataset(MINI_DATASET, "train", expected_count=None)


@pytest.fixture(scope="session")
def mini_model(mini_examples, tmp_path_factory):
    """Predictor trained end-to-end on the fixture dataset."""
    engine = Engine(EngineConfig(abduction="off"), tables_root=MINI_DATASET)
    model, training = train_from_dataset(engine, mini_examples)
    path = tmp_path_factory.mktemp("model") / "mini_model.bin"
    save_model(model, path)
    return {"model": model, "training": training, "path": path}


@pytest.fixture(scope="session")
def baseline_engine():
    return Engine(EngineConfig(abduction="baseline"), tables_root=TABLES)


@pytest.fixture(scope="session")
def ml_engine(mini_model):
    return Engine(EngineConfig(abduction="ml", model_path=mini_model["path"]),
                  tables_root=TABLES)


@pytest.fixture(scope="session")
def off_engine():
    return Engine(EngineConfig(abduction="off"), tables_root=TABLES)
