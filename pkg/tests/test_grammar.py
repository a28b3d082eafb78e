from tableqa.annotate import Annotator, IntentLexicon, load_stopwords
from tableqa.engine import DATA_DIR
from tableqa.grammar import (
    CompareFilter, EqualsFilter, Grammar, candidate_stats, parse,
)
from tableqa.table import RawTable, build_knowledge_base, comprehend


def make_annotator(table):
    kb = build_knowledge_base(table)
    return Annotator(kb, IntentLexicon.load(DATA_DIR / "intents.tsv"),
                     load_stopwords(DATA_DIR / "stopwords.txt"))


def candidates_for(table, question):
    annotator = make_annotator(table)
    aq = annotator.annotate(question)
    return aq, parse(aq, table)


def test_running_example_lookup_candidate(fixture_table):
    table, _ = fixture_table("credits.csv")
    aq, candidates = candidates_for(
        table, "in what movie was barton also the producer?")
    # one reading: two filters, the projection dimension still unfilled
    assert len(candidates) == 1
    candidate = candidates[0]
    assert candidate.dimensions == ()
    described = {f.describe() for f in candidate.filters}
    assert "c4 = 'also producer'" in described
    assert candidate.consumed  # provenance recorded


def test_comparison_ordered_rule(fixture_table):
    table, _ = fixture_table("teams.csv")
    _, candidates = candidates_for(table, "more than 10 wins")
    filters = {f.describe() for c in candidates for f in c.filters}
    assert "c1_num > 10" in filters


def test_scrambled_comparison_does_not_fire(fixture_table):
    table, _ = fixture_table("teams.csv")
    _, candidates = candidates_for(table, "10 more than wins")
    filters = {f.describe() for c in candidates for f in c.filters}
    assert "c1_num > 10" not in filters


def test_zero_annotations_zero_candidates():
    raw = RawTable("t", ["A"], [["x"]])
    table = comprehend(raw)
    annotator = make_annotator(table)
    aq = annotator.annotate("zz qq ww")
    aq.annotations.clear()
    aq.unmatched.extend(i for i in range(len(aq.tokens)))
    assert parse(aq, table) == []


def test_some_annotations_never_empty(fixture_table):
    table, _ = fixture_table("teams.csv")
    _, candidates = candidates_for(table, "eagles")
    assert candidates


def test_candidates_structurally_deduplicated(fixture_table):
    table, _ = fixture_table("teams.csv")
    _, candidates = candidates_for(table, "which team has more than 10 wins?")
    keys = [c.structural_key() for c in candidates]
    assert len(keys) == len(set(keys))


def test_no_foreign_columns(fixture_table):
    table, _ = fixture_table("medals.csv")
    _, candidates = candidates_for(
        table, "which nation won the most gold medals?")
    ids = {c.id for c in table.columns}
    for candidate in candidates:
        for column in candidate.dimensions + candidate.metrics:
            assert column in ids
        for f in candidate.filters:
            if isinstance(f, (EqualsFilter, CompareFilter)):
                assert f.column in ids


def test_consumption_soundness(fixture_table):
    table, _ = fixture_table("teams.csv")
    aq, candidates = candidates_for(table, "which team has more than 10 wins?")
    for candidate in candidates:
        for idx in candidate.consumed:
            assert 0 <= idx < len(aq.annotations)


def test_floating_invariance(fixture_table):
    """Permuting floating phrases leaves the candidate structures unchanged."""
    table, _ = fixture_table("teams.csv")
    variants = [
        "eagles points most",
        "most eagles points",
        "points most eagles",
    ]
    keyset = None
    for question in variants:
        _, candidates = candidates_for(table, question)
        keys = {c.structural_key() for c in candidates}
        if keyset is None:
            keyset = keys
        else:
            assert keys == keyset, question


def test_ordered_rules_respect_order_but_allow_gaps(fixture_table):
    table, _ = fixture_table("worldcup.csv")
    _, candidates = candidates_for(table, "4 world cup titles")
    filters = {f.describe() for c in candidates for f in c.filters}
    assert "c1_num == 4" in filters


def test_candidate_cap(fixture_table):
    table, _ = fixture_table("teams.csv")
    annotator = make_annotator(table)
    aq = annotator.annotate("eagles bears lions jets giants wins losses points team")
    candidates = parse(aq, table, max_candidates=4)
    assert len(candidates) <= 4


def test_date_range_merge(fixture_table):
    table, _ = fixture_table("albums.csv")
    _, candidates = candidates_for(table, "albums after 1975 and before 1995")
    ranges = [c.date_range for c in candidates if c.date_range]
    assert any(r.start and r.end for r in ranges)


def test_candidate_stats():
    assert candidate_stats([3, 5]) == 4.0
    assert candidate_stats([]) == 0.0
    assert candidate_stats([[1, 2, 3], [1]]) == 2.0


def test_grammar_file_rejects_bad_lines(tmp_path):
    bad = tmp_path / "g.txt"
    bad.write_text("oops: CELL => filter_equals\n")  # missing mode
    import pytest
    with pytest.raises(ValueError):
        Grammar.load(bad)
