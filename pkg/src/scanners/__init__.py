"""
Text I/O
========

Concrete syntax for rules, facts and queries, plus JSON and DOT export.
"""

from .emitters import (
    emit_dot,
    emit_json,
    emit_report_json,
    format_facts,
    format_query,
    format_rule,
    format_rules,
    format_ucq,
    trace_document,
)
from .parser import (
    load_facts,
    load_query,
    load_rules,
    load_ucq,
    parse_facts,
    parse_query,
    parse_rules,
    parse_ucq,
)

__all__ = [
    "emit_dot",
    "emit_json",
    "emit_report_json",
    "format_facts",
    "format_query",
    "format_rule",
    "format_rules",
    "format_ucq",
    "trace_document",
    "load_facts",
    "load_query",
    "load_rules",
    "load_ucq",
    "parse_facts",
    "parse_query",
    "parse_rules",
    "parse_ucq",
]
