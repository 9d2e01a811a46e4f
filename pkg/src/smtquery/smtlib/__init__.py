"""SMT-LIB reading, printing and 2.5 to 2.6 translation."""

import hashlib

from smtquery.smtlib.ast import (
    Expr, Kind, Script, Sort, app, bool_lit, int_lit, str_lit, structurally_equal, var,
)
from smtquery.smtlib.parser import RECOGNIZED, parse_script, parse_term
from smtquery.smtlib.printer import print_expr, print_script
from smtquery.smtlib.translate import KEYWORDS_25_TO_26, translate_25_to_26


def content_hash(text) -> str:
    """Lowercase hex SHA-256 of the exact file bytes."""
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


__all__ = [
    "Expr", "Kind", "Script", "Sort", "app", "bool_lit", "int_lit", "str_lit", "var",
    "structurally_equal", "RECOGNIZED", "parse_script", "parse_term", "print_expr",
    "print_script", "KEYWORDS_25_TO_26", "translate_25_to_26", "content_hash",
]
