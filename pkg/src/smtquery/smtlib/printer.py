"""Render scripts and expressions back to SMT-LIB 2.6 text."""

from __future__ import annotations

from smtquery.smtlib.ast import (
    BOOL_LIT, GENERIC, INT_LIT, SMTLIB_SORT, STR_LIT, Expr, Script, Sort,
)
from smtquery.smtlib.reader import SYMBOL_CHARS, encode_string


def symbol(name: str) -> str:
    if name and all(c in SYMBOL_CHARS for c in name) and not name[0].isdigit():
        return name
    return f"|{name}|"


def _head(node: Expr) -> str:
    if node.decl == GENERIC:
        return node.value
    if node.decl == "re.loop" and node.params:
        return "(_ re.loop " + " ".join(str(p) for p in node.params) + ")"
    return node.decl


def _leaf(node: Expr) -> str | None:
    if node.is_variable:
        return symbol(node.decl)
    if node.decl == STR_LIT:
        return encode_string(node.value)
    if node.decl == INT_LIT:
        return str(node.value)
    if node.decl == BOOL_LIT:
        return "true" if node.value else "false"
    if node.decl == GENERIC and not node.children:
        # constants outside the supported theories, kept as written
        return node.value
    if not node.children and node.decl != "re.loop":
        return node.decl
    return None


def print_expr(e: Expr) -> str:
    out = {}
    for node in e.postorder():
        leaf = _leaf(node)
        if leaf is None:
            parts = [_head(node)] + [out.pop(id(c)) for c in node.children]
            leaf = "(" + " ".join(parts) + ")"
        out[id(node)] = leaf
    return out[id(e)]


def print_script(s: Script) -> str:
    lines = [t for t in s.trailing if _command_name(t) == "set-option"]
    if s.logic:
        lines.append(f"(set-logic {s.logic})")
    for name, sort in s.declarations:
        lines.append(f"(declare-fun {symbol(name)} () {SMTLIB_SORT.get(sort, 'String')})")
    for a in s.assertions:
        lines.append(f"(assert {print_expr(a)})")
    lines.extend(t for t in s.trailing if _command_name(t) != "set-option")
    return "\n".join(lines) + "\n"


def _command_name(raw: str) -> str:
    return raw.lstrip("( \t\n").split(None, 1)[0].rstrip(")") if raw.strip("() \t\n") else ""
