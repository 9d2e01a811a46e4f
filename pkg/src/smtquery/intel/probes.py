"""Built-in analysis passes and the script-level views over them."""

from __future__ import annotations

from dataclasses import dataclass

from smtquery.intel.core import IntelSpec, annotate, compute_intel, script_value
from smtquery.smtlib.ast import BOOL_LIT, GENERIC, INT_LIT, STR_LIT, Expr, Script, Sort

HIGHER_ORDER = frozenset({
    "str.substr", "str.indexof", "str.replace", "str.at", "str.contains",
    "str.prefixof", "str.suffixof", "str.to_int", "str.from_int",
})
COMPARISONS = frozenset({"<", "<=", ">", ">=", "=", "distinct"})
ARITHMETIC = frozenset({"+", "-", "*"})
BOOLEAN_CONNECTIVES = frozenset({"and", "or", "not", "=>"})
REGEX_MAX_NODES = 10_000


def is_word_equation(n: Expr) -> bool:
    return n.decl == "=" and bool(n.children) and all(c.sort is Sort.STRING for c in n.children)


# --- variable occurrences -------------------------------------------------

def _count_apply(node, merged):
    if node.is_variable:
        counts = dict(merged)
        counts[node.decl] = counts.get(node.decl, 0) + 1
        return counts
    return merged


def _count_merge(a, b):
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


VAR_COUNTS = IntelSpec("variable_counts", 1, {}, _count_apply, _count_merge)


# --- constraint kinds -----------------------------------------------------

@dataclass(frozen=True)
class KindFlags:
    hasWEQ: bool = False
    hasRegex: bool = False
    hasLinears: bool = False
    hasHigherOrder: bool = False


_FLAGS = ("hasWEQ", "hasRegex", "hasLinears", "hasHigherOrder")
# lin: node is a linear integer term over lengths; cat: node is a
# concatenation of string variables and literals; len: a str.len occurs below
_KINDS_NEUTRAL = {
    "hasWEQ": False, "hasRegex": False, "hasLinears": False, "hasHigherOrder": False,
    "lin": True, "cat": True, "len": False,
}


def _kinds_merge(a, b):
    return {
        "hasWEQ": a["hasWEQ"] or b["hasWEQ"],
        "hasRegex": a["hasRegex"] or b["hasRegex"],
        "hasLinears": a["hasLinears"] or b["hasLinears"],
        "hasHigherOrder": a["hasHigherOrder"] or b["hasHigherOrder"],
        "lin": a["lin"] and b["lin"],
        "cat": a["cat"] and b["cat"],
        "len": a["len"] or b["len"],
    }


def _kinds_apply(n, m):
    d = n.decl
    if n.is_variable:
        lin, cat = n.sort is Sort.INTEGER, n.sort is Sort.STRING
    elif d == INT_LIT:
        lin, cat = True, False
    elif d == STR_LIT:
        lin, cat = False, True
    elif d in ARITHMETIC:
        lin, cat = m["lin"], False
    elif d == "str.len":
        lin, cat = m["cat"], False
    elif d == "str.++":
        lin, cat = False, m["cat"]
    else:
        lin = cat = False
    linear = (
        d in COMPARISONS and all(c.sort is Sort.INTEGER for c in n.children)
        and m["lin"] and m["len"]
    )
    return {
        "hasWEQ": m["hasWEQ"] or is_word_equation(n),
        "hasRegex": m["hasRegex"] or d == "str.in_re",
        "hasLinears": m["hasLinears"] or linear,
        "hasHigherOrder": m["hasHigherOrder"] or d in HIGHER_ORDER,
        "lin": lin,
        "cat": cat,
        "len": m["len"] or d == "str.len",
    }


KINDS = IntelSpec("constraint_kinds", 1, _KINDS_NEUTRAL, _kinds_apply, _kinds_merge)


def is_linear_length_constraint(n: Expr) -> bool:
    """True for a comparison over linear integer terms that mentions str.len."""
    if n.decl not in COMPARISONS or not all(c.sort is Sort.INTEGER for c in n.children):
        return False
    annotate_expr(n, KINDS)
    vals = [c.intel[KINDS.key] for c in n.children]
    return all(v["lin"] for v in vals) and any(v["len"] for v in vals)


# --- regular-expression shape ---------------------------------------------

@dataclass(frozen=True)
class RegexShapeValue:
    onlyMembership: bool = False
    simpleLHS: bool = True
    concatLHS: bool = True
    usesComplementOrInter: bool = False


_REGEX_KEY = ("regex_shape", 1)
_REGEX_NEUTRAL = {
    "memb": True, "has_memb": False, "simple": True, "concat": True, "ci": False,
    "varfree": True, "cat": True,
}


def _regex_merge(a, b):
    return {
        "memb": a["memb"] and b["memb"],
        "has_memb": a["has_memb"] or b["has_memb"],
        "simple": a["simple"] and b["simple"],
        "concat": a["concat"] and b["concat"],
        "ci": a["ci"] or b["ci"],
        "varfree": a["varfree"] and b["varfree"],
        "cat": a["cat"] and b["cat"],
    }


def _regex_apply(n, m):
    d = n.decl
    out = dict(m)
    out["varfree"] = m["varfree"] and not n.is_variable
    if n.is_variable:
        out["cat"] = n.sort is Sort.STRING
    elif d == STR_LIT:
        out["cat"] = True
    elif d != "str.++":
        out["cat"] = False
    if d == "str.in_re":
        lhs = n.children[0]
        lv = lhs.intel[_REGEX_KEY]
        out["memb"] = True
        out["has_memb"] = True
        out["simple"] = m["simple"] and (lhs.is_variable or (lv["varfree"] and lv["cat"]))
        out["concat"] = m["concat"] and lv["cat"]
    elif d in BOOLEAN_CONNECTIVES or d == BOOL_LIT or (d == "ite" and n.sort is Sort.BOOL):
        pass
    else:
        out["memb"] = False
    if d in ("re.comp", "re.inter") or (d == GENERIC and n.value == "re.diff"):
        out["ci"] = True
    return out


REGEX_SHAPE = IntelSpec("regex_shape", 1, _REGEX_NEUTRAL, _regex_apply, _regex_merge)


# --- length upper bounds --------------------------------------------------

EMPTY = -1  # marker: the regular language is empty


def regex_max_length(e: Expr, budget: int = REGEX_MAX_NODES):
    """Longest word of the language of ``e``; ``None`` if unbounded, EMPTY if empty."""
    nodes = 0
    for nodes, _ in enumerate(e.walk(), 1):
        if nodes > budget:
            return None
    try:
        return _max_len(e)
    except RecursionError:
        return None


def _max_len(e):
    d = e.decl
    ch = e.children
    if d == "str.to_re":
        return _literal_length(ch[0])
    if d == "re.none":
        return EMPTY
    if d == "re.allchar" or d == "re.range":
        return 1
    if d == "re.++":
        vals = [_max_len(c) for c in ch]
        if EMPTY in vals:
            return EMPTY
        return None if None in vals else sum(vals)
    if d == "re.union":
        vals = [v for v in (_max_len(c) for c in ch) if v != EMPTY]
        if not vals:
            return EMPTY
        return None if None in vals else max(vals)
    if d == "re.inter":
        vals = [_max_len(c) for c in ch]
        if EMPTY in vals:
            return EMPTY
        known = [v for v in vals if v is not None]
        return min(known) if known else None
    if d in ("re.*", "re.+", "re.opt", "re.loop"):
        inner = _max_len(ch[0])
        if d == "re.opt":
            return 0 if inner == EMPTY else inner
        if d == "re.loop":
            lo = e.params[0]
            hi = e.params[1] if len(e.params) > 1 else None
            if hi is not None and lo > hi:
                return EMPTY
            if inner == EMPTY:
                return 0 if lo == 0 else EMPTY
            if hi == 0 or inner == 0:
                return 0
            return None if hi is None or inner is None else hi * inner
        if inner == EMPTY:
            return 0 if d == "re.*" else EMPTY
        return 0 if inner == 0 else None
    return None


def _literal_length(e):
    if e.decl == STR_LIT:
        return len(e.value)
    if e.decl == "str.++":
        vals = [_literal_length(c) for c in e.children]
        return None if None in vals else sum(vals)
    return None


def _bound_merge(a, b):
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for k, v in b.items():
        if k not in out or out[k] is None:
            out[k] = v
        elif v is not None:
            out[k] = min(out[k], v)
    return out


def _string_var(e):
    return e.is_variable and e.sort is Sort.STRING


def _len_of_var(e):
    if e.decl == "str.len" and _string_var(e.children[0]):
        return e.children[0].decl
    return None


def _bound_apply(n, m):
    d = n.decl
    if d == "and":
        return m
    ch = n.children
    if d in ("<=", "<", ">=", ">") and len(ch) == 2:
        if d in ("<=", "<"):
            term, k = ch
        else:
            k, term = ch
        x = _len_of_var(term)
        if x is not None and k.decl == INT_LIT:
            bound = k.value - (1 if d in ("<", ">") else 0)
            return {x: max(bound, 0)}
    elif d == "=" and len(ch) == 2:
        for a, b in (ch, ch[::-1]):
            if _string_var(a) and b.decl == STR_LIT:
                return {a.decl: len(b.value)}
    elif d == "str.in_re" and _string_var(ch[0]):
        size = regex_max_length(ch[1])
        return {ch[0].decl: 0 if size == EMPTY else size}
    return {}


UPPER_BOUNDS = IntelSpec("upper_bounds", 1, {}, _bound_apply, _bound_merge)


# --- word-equation shapes -------------------------------------------------

def _weq_apply(n, m):
    if is_word_equation(n) and len(n.children) == 2:
        sides = [c.decl if c.is_variable else None for c in n.children]
        return m + [sides]
    return m


WEQ_FORMS = IntelSpec("weq_forms", 1, [], _weq_apply, lambda a, b: a + b if a and b else (a or b))


BUILTIN_SPECS = (VAR_COUNTS, KINDS, REGEX_SHAPE, UPPER_BOUNDS, WEQ_FORMS)


def annotate_expr(e: Expr, spec: IntelSpec):
    if spec.key not in e.intel:
        compute_intel(e, spec)
    return e.intel[spec.key]


# --- script-level views ---------------------------------------------------

def variable_counts(script: Script) -> dict:
    return dict(script_value(script, VAR_COUNTS))


def constraint_kinds(script: Script) -> KindFlags:
    v = script_value(script, KINDS)
    return KindFlags(**{f: v[f] for f in _FLAGS})


def regex_classification(script: Script) -> RegexShapeValue:
    annotate(script, REGEX_SHAPE)
    roots = [a.intel[REGEX_SHAPE.key] for a in script.assertions]
    if not roots:
        return RegexShapeValue()
    return RegexShapeValue(
        onlyMembership=all(r["memb"] for r in roots) and any(r["has_memb"] for r in roots),
        simpleLHS=all(r["simple"] for r in roots),
        concatLHS=all(r["concat"] for r in roots),
        usesComplementOrInter=any(r["ci"] for r in roots),
    )


def upper_bounds(script: Script) -> dict:
    return dict(script_value(script, UPPER_BOUNDS))


def word_equation_forms(script: Script) -> list:
    return list(script_value(script, WEQ_FORMS))
