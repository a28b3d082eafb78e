from tableqa.cli import main

from conftest import MINI_DATASET, TABLES


def test_ask(capsys):
    code = main(["ask", "--table", str(TABLES / "credits.csv"),
                 "--question", "in what movie was barton also the producer?"])
    out = capsys.readouterr().out
    assert code == 0
    assert "Octane" in out
    assert "We think you meant" in out
    assert "[title]" in out


def test_ask_no_answer_exit_code(capsys):
    code = main(["ask", "--table", str(TABLES / "credits.csv"),
                 "--question", "quantum flux capacitors?", "--abduction", "off"])
    assert code == 1


def test_eval(capsys):
    code = main(["eval", "--dataset", str(MINI_DATASET), "--split", "train",
                 "--limit", "6", "--no-size-check"])
    out = capsys.readouterr().out
    assert code == 0
    assert "accuracy" in out


def test_train_census_and_ml_ask(tmp_path, capsys):
    model_path = tmp_path / "model.bin"
    examples_path = tmp_path / "examples.tsv"
    code = main(["train", "--dataset", str(MINI_DATASET), "--no-size-check",
                 "--out", str(model_path),
                 "--export-examples", str(examples_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert model_path.exists()
    assert "counter-factual training examples:" in out
    assert examples_path.read_text().count("\n") >= 10

    code = main(["census", "--dataset", str(MINI_DATASET), "--no-size-check",
                 "--pair", "movie", "title"])
    out = capsys.readouterr().out
    assert code == 0
    assert "2 of them have a column 'title'" in out
    assert "yes/no questions: 2" in out

    code = main(["ask", "--table", str(TABLES / "credits.csv"),
                 "--question", "in what movie was barton also the producer?",
                 "--abduction", "ml", "--model", str(model_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "machine-learnt abductive match" in out
    assert "confidence" in out
