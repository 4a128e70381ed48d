"""Temporal-epistemic logic: syntax, parser, bounded evaluator and axiom harness."""

from .ast import Formula, alive, alive_set, dead, dead_set, is_mixed, is_positive, to_text
from .evaluator import Checker, EvalError, Verdict, evaluate
from .parser import ParseError, parse

__all__ = [
    "Checker",
    "EvalError",
    "Formula",
    "ParseError",
    "Verdict",
    "alive",
    "alive_set",
    "dead",
    "dead_set",
    "evaluate",
    "is_mixed",
    "is_positive",
    "parse",
    "to_text",
]
