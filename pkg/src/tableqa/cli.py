"""Command line interface: ask, eval, train, census, serve."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import Engine, EngineConfig, train_from_dataset
from .evalharness import association_census, evaluate, load_dataset, yes_no_census
from .predictor import export_examples_tsv, save_model


def _engine_config(args) -> EngineConfig:
    kwargs = {"abduction": args.abduction}
    if getattr(args, "model", None):
        kwargs["model_path"] = Path(args.model)
    for name in ("weights", "grammar", "intents", "stopwords", "recognizers"):
        value = getattr(args, name, None)
        if value:
            kwargs[f"{name}_path"] = Path(value)
    return EngineConfig(**kwargs)


def _add_config_flags(parser: argparse.ArgumentParser, default_abduction: str) -> None:
    parser.add_argument("--abduction", choices=("ml", "baseline", "off"),
                        default=default_abduction)
    parser.add_argument("--model", help="operand predictor model file")
    parser.add_argument("--weights", help="scoring weight file")
    parser.add_argument("--grammar", help="grammar rule file")
    parser.add_argument("--intents", help="intent lexicon file")
    parser.add_argument("--stopwords", help="stopword list file")
    parser.add_argument("--recognizers", help="cell recognizer inventory file")


def cmd_ask(args) -> int:
    engine = Engine(_engine_config(args))
    response = engine.answer(args.question, args.table)
    interpretation = response.interpretation
    if interpretation.note:
        print(interpretation.note)
    answer = response.answer
    if answer.kind == "none":
        print(f"no answer ({answer.diagnostic})")
    else:
        print("answer:", "; ".join(answer.as_strings()))
    print("question type:", response.question_type)
    if interpretation.sql:
        print("query:", interpretation.sql)
    print("terms:")
    for term in interpretation.terms:
        detail = f" -> {term.target}" if term.target else ""
        confidence = (f" (confidence {term.confidence:.2f})"
                      if term.confidence is not None else "")
        print(f"  {term.term:15} {term.kind}{detail}{confidence}")
    return 0 if answer.kind != "none" else 1


def cmd_eval(args) -> int:
    engine = Engine(_engine_config(args), tables_root=args.dataset)
    examples = load_dataset(args.dataset, args.split,
                            expected_count=None if args.no_size_check else -1)
    report = evaluate(engine, examples, limit=args.limit)
    print(report.format())
    if args.out:
        Path(args.out).write_text(report.to_tsv(), encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_train(args) -> int:
    engine = Engine(EngineConfig(abduction="off"), tables_root=args.dataset)
    examples = load_dataset(args.dataset, args.split,
                            expected_count=None if args.no_size_check else -1)
    model, training = train_from_dataset(engine, examples, limit=args.limit)
    save_model(model, args.out)
    print(f"counter-factual training examples: {len(training)}")
    if model.info is not None and model.info.holdout_accuracy is not None:
        print(f"held-out accuracy: {model.info.holdout_accuracy:.2%}")
    print(f"wrote {args.out}")
    if args.export_examples:
        export_examples_tsv(training, args.export_examples)
        print(f"wrote {args.export_examples}")
    return 0


def cmd_census(args) -> int:
    examples = load_dataset(args.dataset, args.split,
                            expected_count=None if args.no_size_check else -1)
    census = association_census(examples, args.dataset)
    if args.pair:
        term, heading = args.pair
        n_tables, n_with = census.pair(term, heading)
        print(f"'{term}' appears in questions against {n_tables} tables; "
              f"{n_with} of them have a column '{heading}'")
    else:
        for term, heading, count in census.top_pairs(args.top):
            print(f"{term}\t{heading}\t{count}")
    total, yes = yes_no_census(examples)
    print(f"yes/no questions: {total} ({yes} answered 'yes')")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    tables_root = args.tables or args.dataset
    if tables_root is None:
        print("serve needs --tables and/or --dataset", file=sys.stderr)
        return 2
    engine = Engine(_engine_config(args), tables_root=tables_root)
    app = build_app(engine, tables_root=tables_root, dataset_root=args.dataset)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tableqa",
                                     description="transparent question answering over CSV tables")
    sub = parser.add_subparsers(dest="command", required=True)

    ask = sub.add_parser("ask", help="answer one question against one table")
    ask.add_argument("--table", required=True)
    ask.add_argument("--question", required=True)
    _add_config_flags(ask, "baseline")
    ask.set_defaults(fn=cmd_ask)

    ev = sub.add_parser("eval", help="evaluate a dataset split")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--split", default="train")
    ev.add_argument("--limit", type=int)
    ev.add_argument("--out", help="write a TSV report here")
    ev.add_argument("--no-size-check", action="store_true",
                    help="skip the published split-size check")
    _add_config_flags(ev, "baseline")
    ev.set_defaults(fn=cmd_eval)

    tr = sub.add_parser("train", help="train the operand predictor")
    tr.add_argument("--dataset", required=True)
    tr.add_argument("--split", default="train")
    tr.add_argument("--limit", type=int)
    tr.add_argument("--out", required=True, help="model file to write")
    tr.add_argument("--export-examples", help="also dump the training TSV here")
    tr.add_argument("--no-size-check", action="store_true")
    tr.set_defaults(fn=cmd_train)

    ce = sub.add_parser("census", help="dataset statistics")
    ce.add_argument("--dataset", required=True)
    ce.add_argument("--split", default="train")
    ce.add_argument("--pair", nargs=2, metavar=("TERM", "HEADING"))
    ce.add_argument("--top", type=int, default=20)
    ce.add_argument("--no-size-check", action="store_true")
    ce.set_defaults(fn=cmd_census)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--tables", help="directory of CSV tables (defaults to --dataset)")
    sv.add_argument("--dataset", help="dataset root; enables /eval and serves its tables")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8080)
    _add_config_flags(sv, "baseline")
    sv.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
