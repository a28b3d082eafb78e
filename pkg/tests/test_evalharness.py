import pytest

from tableqa.engine import Engine, EngineConfig
from tableqa.evalharness import (
    DatasetError, answer_match, association_census, canonical_of_text,
    evaluate, load_dataset, yes_no_census, _unescape,
)
from tableqa.executor import Answer
from tableqa.values import Date, Number, Text

from conftest import MINI_DATASET


def scalar(value) -> Answer:
    return Answer(kind="scalar", values=(value,))


def listed(*values) -> Answer:
    return Answer(kind="list", values=tuple(values))


# -- loading ------------------------------------------------------------------

def test_load_mini_dataset():
    examples = load_dataset(MINI_DATASET, "train", expected_count=None)
    assert len(examples) == 27
    first = examples[0]
    assert first.id == "nt-0"
    assert first.table_ref.startswith("csv/0-csv/")
    assert first.gold == ("The Basketball Diaries",)


def test_load_unknown_split():
    with pytest.raises(DatasetError):
        load_dataset(MINI_DATASET, "validation", expected_count=None)


def test_load_count_mismatch_names_numbers():
    with pytest.raises(DatasetError) as err:
        load_dataset(MINI_DATASET, "train", expected_count=99)
    message = str(err.value)
    assert "27" in message and "99" in message


def test_load_missing_split_file():
    with pytest.raises(DatasetError):
        load_dataset(MINI_DATASET, "test", expected_count=None)


def test_published_counts_are_default():
    # the shipped fixture is tiny, so the published-size check must fire
    with pytest.raises(DatasetError):
        load_dataset(MINI_DATASET, "train")


def test_multi_answer_split_and_unescape():
    assert _unescape(r"a\nb") == "a\nb"
    assert _unescape(r"pipe\p") == "pipe|"
    assert _unescape(r"back\\slash") == "back\\slash"
    examples = load_dataset(MINI_DATASET, "train", expected_count=None)
    multi = next(e for e in examples if e.id == "nt-5")
    assert multi.gold == ("Lawn Dogs", "Octane", "Closing the Ring")


# -- answer matching ------------------------------------------------------------

def test_numeric_normalization():
    assert answer_match(scalar(Number(2005.0, surface="2,005")), ["2005"])
    assert answer_match(scalar(Text("2,005")), ["2005"])
    assert answer_match(scalar(Number(45.0, "%", "45%")), ["45"])


def test_list_as_multiset():
    assert answer_match(listed(Text("a"), Text("b")), ["b", "a"])
    assert not answer_match(listed(Text("a"), Text("a")), ["a", "b"])
    assert not answer_match(listed(Text("a")), ["a", "a"])


def test_none_never_matches():
    assert not answer_match(Answer.none(), ["anything"])
    assert not answer_match(Answer.none(), [""])


def test_date_canonicalization():
    assert answer_match(scalar(Date(2005, 6, 27, "2005/06/27")), ["June 27, 2005"])
    assert answer_match(scalar(Date(year=1995, surface="1995")), ["1995"])
    assert not answer_match(scalar(Date(2005, 6, 27, "x")), ["June 28, 2005"])


def test_text_folding():
    assert canonical_of_text("  The  Fall ") == canonical_of_text("the fall")
    assert answer_match(scalar(Text("Amélie")), ["Amelie"])


def test_match_symmetric_under_reorder_and_reflexive():
    values = ["x", "7", "June 27, 2005"]
    canon = sorted(map(repr, map(canonical_of_text, values)))
    assert canon == sorted(map(repr, map(canonical_of_text, reversed(values))))
    for value in values:
        assert canonical_of_text(value) == canonical_of_text(value)


# -- evaluation loop -------------------------------------------------------------

@pytest.fixture(scope="module")
def mini_engine():
    return Engine(EngineConfig(abduction="baseline"), tables_root=MINI_DATASET)


def test_evaluate_mini(mini_engine, mini_examples):
    report = evaluate(mini_engine, mini_examples)
    assert report.total == 27
    assert 0 < report.correct <= 27
    assert report.accuracy == report.correct / report.total
    assert sum(n for n, _ in report.by_type.values()) == report.total
    assert report.average_candidates > 0


def test_evaluate_deterministic(mini_engine, mini_examples):
    first = evaluate(mini_engine, mini_examples)
    second = evaluate(mini_engine, mini_examples)
    assert first.total == second.total
    assert first.correct == second.correct
    assert first.by_type == second.by_type
    assert first.candidate_counts == second.candidate_counts


def test_evaluate_empty():
    engine = Engine(EngineConfig(abduction="off"), tables_root=MINI_DATASET)
    report = evaluate(engine, [])
    assert report.total == 0
    assert report.accuracy == 0.0


def test_evaluate_failures_counted_not_raised():
    from tableqa.evalharness import EvalExample

    engine = Engine(EngineConfig(abduction="off"), tables_root=MINI_DATASET)
    broken = [EvalExample(id="x", question="what movie?",
                          table_ref="csv/0-csv/missing.csv", gold=("?",))]
    report = evaluate(engine, broken)
    assert report.total == 1
    assert report.correct == 0
    assert report.errors == 1


def test_abduction_off_unchanged_when_nothing_missing(mini_examples):
    """Enabling abduction never changes answers for questions with no
    missing operand."""
    on = Engine(EngineConfig(abduction="baseline"), tables_root=MINI_DATASET)
    off = Engine(EngineConfig(abduction="off"), tables_root=MINI_DATASET)
    for example in mini_examples:
        with_abduction = on.answer(example.question, example.table_ref)
        if with_abduction.abduction_fills:
            continue
        without = off.answer(example.question, example.table_ref)
        assert without.answer.as_strings() == with_abduction.answer.as_strings()


def test_report_merge_is_associative(mini_engine, mini_examples):
    whole = evaluate(mini_engine, mini_examples)
    thirds = [evaluate(mini_engine, mini_examples[i::3]) for i in range(3)]
    left = thirds[0].merge(thirds[1]).merge(thirds[2])
    right = thirds[0].merge(thirds[1].merge(thirds[2]))
    for merged in (left, right):
        assert merged.total == whole.total
        assert merged.correct == whole.correct
        assert merged.by_type == whole.by_type
        assert merged.abduction_used == whole.abduction_used
        assert sorted(merged.candidate_counts) == sorted(whole.candidate_counts)
        assert merged.unmatched_terms == whole.unmatched_terms


def test_report_format_and_tsv(mini_engine, mini_examples):
    report = evaluate(mini_engine, mini_examples, limit=5)
    text = report.format()
    assert "accuracy" in text
    tsv = report.to_tsv()
    assert tsv.startswith("total\t5")


# -- census -----------------------------------------------------------------------

def test_association_census_mechanics(mini_examples):
    census = association_census(mini_examples, MINI_DATASET)
    n_tables, with_heading = census.pair("movie", "title")
    # "movie" questions run against credits.csv and films2.csv, both of
    # which carry a Title column
    assert (n_tables, with_heading) == (2, 2)
    assert census.pair("nonexistentterm", "title") == (0, 0)
    assert census.pair("movie", "nonexistentheading") == (2, 0)


def test_association_census_top_pairs(mini_examples):
    census = association_census(mini_examples, MINI_DATASET)
    pairs = census.top_pairs(50, min_tables=2)
    assert (("movie", "title", 2) in pairs) or (("movies", "title", 2) in pairs)


def test_yes_no_census(mini_examples):
    total, yes = yes_no_census(mini_examples)
    assert (total, yes) == (2, 1)
