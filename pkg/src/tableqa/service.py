"""HTTP API exposing the engine and its transparency payload.

Endpoints:
  GET  /health            liveness probe
  GET  /tables            table catalog
  GET  /tables/{id}       comprehended schema plus rows
  POST /answer            {"question", "tableId"} -> answer + interpretation
                          + every surviving candidate with its score breakdown
  POST /eval              async batch evaluation -> {"reportId"}
  GET  /reports/{id}      evaluation status/result
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import Engine
from .evalharness import load_dataset, evaluate
from .table import ComprehendedTable
from .values import surface_of


class AnswerRequest(BaseModel):
    question: str
    tableId: str


class EvalRequest(BaseModel):
    split: str = "train"
    limit: int | None = 100


def discover_tables(root: str | Path) -> dict[str, Path]:
    """Catalog of table id (relative path) -> absolute file path."""
    root = Path(root).resolve()
    catalog = {}
    for path in sorted(root.rglob("*.csv")):
        catalog[str(path.relative_to(root))] = path
    return catalog


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def _table_payload(table_id: str, table: ComprehendedTable) -> dict:
    return {
        "id": table_id,
        "name": table.name,
        "columns": [{
            "id": col.id,
            "name": col.name,
            "role": col.role,
            "origin": col.origin,
        } for col in table.columns],
        "bodyRows": table.body_rows,
        "totalRows": table.total_rows,
        "rows": [[surface_of(col.values[r]) for col in table.columns]
                 for r in range(len(table.columns[0].values))],
    }


def _answer_payload(response) -> dict:
    answer = response.answer
    return {
        "answer": {
            "kind": answer.kind,
            "values": answer.as_strings(),
            "cells": [{"column": c, "row": r} for c, r in answer.cells],
            "diagnostic": answer.diagnostic,
        },
        "interpretation": {
            "rewritten": response.interpretation.rewritten,
            "note": response.interpretation.note,
            "doubt": response.interpretation.doubt,
            "sql": response.interpretation.sql,
            "parse": response.interpretation.parse_summary,
            "terms": [asdict(t) for t in response.interpretation.terms],
            "fills": [asdict(f) for f in response.interpretation.fills],
        },
        "questionType": response.question_type,
        "candidateCount": response.candidate_count,
        "candidates": response.candidates,
        "unmatchedTerms": response.unmatched_terms,
    }


def build_app(engine: Engine, tables_root: str | Path,
              dataset_root: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="table question answering", version="0.1.0")
    catalog = discover_tables(tables_root)
    reports: dict[str, dict] = {}
    report_ids = itertools.count(1)
    lock = threading.Lock()

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/tables")
    def tables():
        return {"tables": [{"id": table_id} for table_id in catalog]}

    @app.get("/tables/{table_id:path}")
    def table_detail(table_id: str):
        if table_id not in catalog:
            return _error(404, "unknown_table", f"no table {table_id!r}")
        comprehended, _, _ = engine.table(catalog[table_id])
        return _table_payload(table_id, comprehended)

    @app.post("/answer")
    def answer(request: AnswerRequest):
        if not request.question.strip():
            return _error(400, "empty_question", "question must be non-empty")
        if request.tableId not in catalog:
            return _error(404, "unknown_table", f"no table {request.tableId!r}")
        response = engine.answer(request.question, catalog[request.tableId])
        return _answer_payload(response)

    @app.post("/eval")
    def eval_batch(request: EvalRequest):
        if dataset_root is None:
            return _error(400, "no_dataset", "service started without a dataset")
        try:
            examples = load_dataset(dataset_root, request.split, expected_count=None)
        except Exception as exc:
            return _error(400, "bad_split", str(exc))
        report_id = str(next(report_ids))
        with lock:
            reports[report_id] = {"status": "running"}

        def run():
            scoped = Engine(engine.config, tables_root=dataset_root)
            report = evaluate(scoped, examples, limit=request.limit)
            with lock:
                reports[report_id] = {
                    "status": "done",
                    "report": {
                        "total": report.total,
                        "correct": report.correct,
                        "accuracy": report.accuracy,
                        "averageCandidates": report.average_candidates,
                        "abductionUsed": report.abduction_used,
                        "byType": report.by_type,
                    },
                }

        threading.Thread(target=run, daemon=True).start()
        return {"reportId": report_id}

    @app.get("/reports/{report_id}")
    def report_detail(report_id: str):
        with lock:
            if report_id not in reports:
                return _error(404, "unknown_report", f"no report {report_id!r}")
            return reports[report_id]

    return app
