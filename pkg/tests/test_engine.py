import pytest

from tableqa.engine import EngineConfig
from tableqa.predictor import ML_ABDUCTIVE, RULE_ABDUCTIVE

RUNNING_EXAMPLE = "in what movie was barton also the producer?"


def test_running_example_with_ml(ml_engine):
    response = ml_engine.answer(RUNNING_EXAMPLE, "credits.csv")
    assert response.answer.as_strings() == ["Octane"]
    assert response.question_type == "LOOKUP"
    interp = response.interpretation
    assert interp.rewritten == "in what [title] was barton also the producer"
    assert interp.doubt is True
    assert interp.note.startswith("We think you meant:")
    movie_term = next(t for t in interp.terms if t.term == "movie")
    assert movie_term.kind == ML_ABDUCTIVE
    assert movie_term.target == "Title"
    assert movie_term.confidence is not None and movie_term.confidence > 0.3


def test_running_example_with_baseline(baseline_engine):
    response = baseline_engine.answer(RUNNING_EXAMPLE, "credits.csv")
    assert response.answer.as_strings() == ["Octane"]
    fills = response.abduction_fills
    assert fills and fills[0].method == RULE_ABDUCTIVE
    assert fills[0].heading == "Title"  # left-most string-valued column


def test_running_example_abduction_off(off_engine):
    response = off_engine.answer(RUNNING_EXAMPLE, "credits.csv")
    assert response.answer.kind == "none"
    assert response.interpretation.doubt is True  # an operand stayed missing


def test_exact_lookup_no_doubt(baseline_engine):
    response = baseline_engine.answer("what is the population of boston?",
                                      "cities.csv")
    assert response.answer.as_strings() == ["694583"]
    assert response.interpretation.doubt is False
    assert response.interpretation.note is None


def test_interpretation_covers_every_token_once(baseline_engine, regression_rows):
    for question, table, _, _ in regression_rows:
        response = baseline_engine.answer(question, table)
        interp = response.interpretation
        from tableqa.annotate import tokenize
        tokens = tokenize(question)
        assert [t.index for t in interp.terms] == [t.index for t in tokens]
        assert [t.term for t in interp.terms] == [t.surface for t in tokens]


def test_doubt_iff_non_exact_used(baseline_engine, regression_rows):
    non_exact = {"approximate", ML_ABDUCTIVE, RULE_ABDUCTIVE, "placeholder"}
    for question, table, _, _ in regression_rows:
        response = baseline_engine.answer(question, table)
        interp = response.interpretation
        used_non_exact = any(t.kind in non_exact and t.used for t in interp.terms)
        assert interp.doubt == (used_non_exact or bool(interp.fills)), question


def test_pipeline_purity(ml_engine):
    first = ml_engine.answer(RUNNING_EXAMPLE, "credits.csv")
    second = ml_engine.answer(RUNNING_EXAMPLE, "credits.csv")
    assert first.answer == second.answer
    assert first.interpretation.rewritten == second.interpretation.rewritten
    assert [t.kind for t in first.interpretation.terms] == \
        [t.kind for t in second.interpretation.terms]
    assert first.candidates == second.candidates


def test_candidates_carry_breakdowns(baseline_engine):
    response = baseline_engine.answer("which team has the most points?",
                                      "teams.csv")
    assert response.candidates
    chosen = [c for c in response.candidates if c["chosen"]]
    assert len(chosen) == 1
    for candidate in response.candidates:
        assert set(candidate["features"]) == {
            "annotated_words", "exact_matches", "approximate_matches",
            "header_matches", "cell_matches"}
        assert isinstance(candidate["score"], float)


def test_falls_through_to_completable_candidate(baseline_engine):
    # "6" matches cells as well as being a number; the engine must survive
    # candidates that cannot be planned and still produce an answer
    response = baseline_engine.answer("which nation has 6 gold medals?",
                                      "medals.csv")
    assert response.answer.as_strings() == ["Russia"]


def test_interpretation_for_unanswerable(baseline_engine):
    response = baseline_engine.answer("colorless green ideas sleep furiously",
                                      "teams.csv")
    assert response.answer.kind == "none"
    assert response.interpretation.terms
    assert response.unmatched_terms


def test_sql_present_for_answered(baseline_engine, regression_rows):
    question, table, _, _ = regression_rows[0]
    response = baseline_engine.answer(question, table)
    assert response.interpretation.sql
    assert response.interpretation.sql.startswith("SELECT")


def test_engine_config_validation(tmp_path):
    with pytest.raises(ValueError):
        EngineConfig(abduction="ml")  # needs a model path
    with pytest.raises(ValueError):
        EngineConfig(abduction="sometimes")


def test_table_load_failure_raises(baseline_engine):
    from tableqa.table import TableLoadError

    with pytest.raises(TableLoadError):
        baseline_engine.answer("what?", "missing.csv")
