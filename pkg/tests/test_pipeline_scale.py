"""Medium-scale pipeline exercise on a generated dataset.

Covers interactions the single-table tests cannot: counter-factual
training across many tables, learned associations steering abduction, and
the accuracy ordering of the three abduction modes.
"""

import random
from collections import Counter

import pytest

from tableqa.engine import Engine, EngineConfig, train_from_dataset
from tableqa.evalharness import EvalExample, evaluate
from tableqa.predictor import save_model

FIRST = ["Alan", "Maria", "Chen", "Priya", "Diego", "Aisha", "Ivan", "Keiko"]
LAST = ["Shearer", "Lopez", "Wei", "Patel", "Ruiz", "Khan", "Petrov", "Tanaka"]
CLUBS = ["Arsenal", "Chelsea", "Liverpool", "Everton"]
GENRES = ["Drama", "Comedy", "Thriller", "Documentary"]


def build_dataset(root):
    rng = random.Random(7)
    (root / "data").mkdir()
    (root / "csv" / "1-csv").mkdir(parents=True)
    questions = []

    def add(question, table, answer):
        questions.append((f"g-{len(questions)}", question,
                          f"csv/1-csv/{table}", answer))

    for t in range(3):
        rows, used = [], set()
        for season in range(2000 + t, 2008 + t):
            name = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
            while name in used:
                name = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
            used.add(name)
            rows.append((str(season), name, rng.choice(CLUBS),
                         str(rng.randint(5, 40))))
        table = f"players{t}.csv"
        with open(root / "csv" / "1-csv" / table, "w") as out:
            out.write("Season,Name,Club,Goals\n")
            out.writelines(",".join(r) + "\n" for r in rows)
        goal_counts = Counter(r[3] for r in rows)
        unique = [r for r in rows if goal_counts[r[3]] == 1]
        for r in unique[:3]:
            add(f"who scored {r[3]} goals?", table, r[1])
        for r in unique[3:5]:
            add(f"which year had {r[3]} goals?", table, r[0])
        add("who scored the most goals?", table,
            max(rows, key=lambda r: int(r[3]))[1])

    for t in range(2):
        rows = []
        for y in range(1990 + t, 1998 + t):
            title = (f"The {rng.choice(['Silent', 'Lost', 'Golden'])} "
                     f"{rng.choice(['River', 'Garden', 'Empire'])} {y}")
            rows.append((str(y), title, rng.choice(GENRES),
                         str(rng.randint(2, 300))))
        table = f"films{t}.csv"
        with open(root / "csv" / "1-csv" / table, "w") as out:
            out.write("Year,Title,Genre,Gross\n")
            out.writelines(",".join(r) + "\n" for r in rows)
        for r in rows[:3]:
            add(f"what movie grossed {r[3]}?", table, r[1])
        add("what movie had the highest gross?", table,
            max(rows, key=lambda r: int(r[3]))[1])

    with open(root / "data" / "training.tsv", "w") as out:
        out.write("id\tutterance\tcontext\ttargetValue\n")
        out.writelines("\t".join(q) + "\n" for q in questions)
    return [EvalExample(id=i, question=q, table_ref=t, gold=(a,))
            for i, q, t, a in questions]


@pytest.fixture(scope="module")
def scale_world(tmp_path_factory):
    root = tmp_path_factory.mktemp("scale")
    examples = build_dataset(root)
    engine = Engine(EngineConfig(abduction="off"), tables_root=root)
    model, training = train_from_dataset(engine, examples)
    model_path = root / "model.bin"
    save_model(model, model_path)
    return {"root": root, "examples": examples, "training": training,
            "model_path": model_path}


def test_counterfactuals_learn_cross_table_associations(scale_world):
    pairs = Counter()
    for example in scale_world["training"]:
        for term in example.terms:
            pairs[(term, example.columns[example.correct])] += 1
    assert pairs[("who", "Name")] >= 3
    assert pairs[("movie", "Title")] >= 3
    assert pairs[("year", "Season")] >= 2


def test_mode_accuracy_ordering(scale_world):
    accuracy = {}
    for mode in ("ml", "baseline", "off"):
        config = (EngineConfig(abduction="ml", model_path=scale_world["model_path"])
                  if mode == "ml" else EngineConfig(abduction=mode))
        engine = Engine(config, tables_root=scale_world["root"])
        accuracy[mode] = evaluate(engine, scale_world["examples"]).accuracy
    assert accuracy["ml"] > accuracy["baseline"] > accuracy["off"]


def test_learned_association_beats_baseline_on_year_questions(scale_world):
    ml = Engine(EngineConfig(abduction="ml", model_path=scale_world["model_path"]),
                tables_root=scale_world["root"])
    year_questions = [e for e in scale_world["examples"]
                      if e.question.startswith("which year")]
    assert year_questions
    for example in year_questions:
        response = ml.answer(example.question, example.table_ref)
        assert response.answer.as_strings() == [example.gold[0]], example.question
        assert response.abduction_fills
        assert response.abduction_fills[0].heading == "Season"
