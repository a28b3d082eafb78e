"""Transparent question answering over semi-structured CSV tables.

Hand-written rules do the parsing; a small learned model steps in only to
fill operands the rules could not match, and every answer carries the
provenance needed to audit it.
"""

from .engine import Engine, EngineConfig, EngineResponse, Interpretation, answer_question
from .executor import Answer
from .table import ComprehendedTable, KnowledgeBase, build_knowledge_base, comprehend, load_csv
from .values import parse_cell

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "ComprehendedTable",
    "Engine",
    "EngineConfig",
    "EngineResponse",
    "Interpretation",
    "KnowledgeBase",
    "answer_question",
    "build_knowledge_base",
    "comprehend",
    "load_csv",
    "parse_cell",
    "__version__",
]
