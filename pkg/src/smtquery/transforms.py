"""Script rewrites usable in the ``Apply`` clause of a query.

Every transform returns a new Script and leaves its input untouched.
"""

from __future__ import annotations

from smtquery.errors import TransformError, UnknownFunction
from smtquery.intel import is_linear_length_constraint, is_word_equation
from smtquery.smtlib.ast import (
    BOOL_LIT, STR_LIT, Expr, Script, Sort, app, bool_lit, expr_equal, is_false, is_true,
)

SORT_PREFIX = {Sort.STRING: "str", Sort.INTEGER: "int", Sort.BOOL: "bool", Sort.RE: "re"}


def _clear_intel(script):
    for n in script.nodes():
        n.intel.clear()
    return script


def _finish(script: Script, name: str) -> Script:
    script.renumber()
    _clear_intel(script)
    problems = script.check()
    if problems:
        raise TransformError(f"{name} produced a malformed script: {'; '.join(problems[:3])}")
    return script


def _rebuild(root: Expr, fn) -> Expr:
    """Bottom-up rewrite: ``fn`` sees each node with already rewritten children."""
    done = {}
    for node in root.postorder():
        clone = Expr(node.id, node.kind, node.decl, node.sort, list(node.params),
                     [done[id(c)] for c in node.children], {}, node.value)
        done[id(node)] = fn(clone)
    return done[id(root)]


# --- restriction --------------------------------------------------------------

def is_concatenation(e: Expr) -> bool:
    """String variable, string literal, or str.++ over those."""
    stack = [e]
    while stack:
        n = stack.pop()
        if n.decl == "str.++":
            stack.extend(n.children)
        elif not (n.decl == STR_LIT or (n.is_variable and n.sort is Sort.STRING)):
            return False
    return True


def is_pure_word_equation(e: Expr) -> bool:
    return is_word_equation(e) and all(is_concatenation(c) for c in e.children)


def is_membership(e: Expr) -> bool:
    return e.decl == "str.in_re"


def _is_bool_eq(e):
    return e.decl in ("=", "distinct") and all(c.sort is Sort.BOOL for c in e.children)


def _connective(e):
    return (e.decl in ("and", "or", "not", "=>") or e.decl == BOOL_LIT
            or (e.decl == "ite" and e.sort is Sort.BOOL) or _is_bool_eq(e))


def _and(children):
    if any(is_false(c) for c in children):
        return bool_lit(False)
    children = [c for c in children if not is_true(c)]
    if not children:
        return bool_lit(True)
    return children[0] if len(children) == 1 else app("and", Sort.BOOL, *children)


def _or(children):
    if any(is_true(c) for c in children):
        return bool_lit(True)
    children = [c for c in children if not is_false(c)]
    if not children:
        return bool_lit(False)
    return children[0] if len(children) == 1 else app("or", Sort.BOOL, *children)


def _not(c):
    if c.decl == BOOL_LIT:
        return bool_lit(not c.value)
    return app("not", Sort.BOOL, c)


def _implies(ants, cons):
    if any(is_false(a) for a in ants) or is_true(cons):
        return bool_lit(True)
    ants = [a for a in ants if not is_true(a)]
    if not ants:
        return cons
    if is_false(cons):
        return _not(_and(ants))
    return app("=>", Sort.BOOL, *ants, cons)


def _ite(c, t, e):
    if is_true(c):
        return t
    if is_false(c):
        return e
    if expr_equal(t, e):
        return t
    if is_true(t) and is_false(e):
        return c
    return app("ite", Sort.BOOL, c, t, e)


def _bool_eq(decl, children):
    if len(children) == 2:
        a, b = children
        if a.decl == BOOL_LIT and b.decl == BOOL_LIT:
            return bool_lit((a.value == b.value) == (decl == "="))
        for x, y in ((a, b), (b, a)):
            if x.decl == BOOL_LIT:
                keep = x.value == (decl == "=")
                return y if keep else _not(y)
    return app(decl, Sort.BOOL, *children)


def _child_polarities(e, polarity):
    d, n = e.decl, len(e.children)
    if d in ("and", "or"):
        return [polarity] * n
    if d == "not":
        return [-polarity]
    if d == "=>":
        return [-polarity] * (n - 1) + [polarity]
    if d == "ite":
        return [0, polarity, polarity]
    return [0] * n


def _combine(e, ch, polarity):
    # None marks a dropped atom in a mixed position (truth value unknown)
    d = e.decl
    if d == "ite" and ch[0] is None and None not in ch[1:]:
        # either branch may apply: relax towards the weaker (or stronger) one
        if polarity > 0:
            return _or(ch[1:])
        if polarity < 0:
            return _and(ch[1:])
        return None
    if None in ch:
        return None
    if d == "and":
        return _and(ch)
    if d == "or":
        return _or(ch)
    if d == "not":
        return _not(ch[0])
    if d == "=>":
        return _implies(ch[:-1], ch[-1])
    if d == "ite":
        return _ite(*ch)
    return _bool_eq(d, ch)


def _relax(polarity):
    return None if polarity == 0 else bool_lit(polarity > 0)


def restrict(e: Expr, keep, polarity=1) -> Expr:
    """Drop the atoms of ``e`` not accepted by ``keep``.

    A dropped atom becomes ``true`` in positive positions and ``false`` in
    negative ones.  Under an ``ite`` condition or a Boolean equality it has
    no fixed polarity, so the enclosing construct is relaxed as a whole.
    The result is always implied by ``e``.
    """
    done = []
    stack = [(e, polarity, False)]
    while stack:
        n, pol, expanded = stack.pop()
        if expanded:
            k = len(n.children)
            ch = done[len(done) - k:]
            del done[len(done) - k:]
            r = _combine(n, ch, pol)
            done.append(_relax(pol) if r is None else r)
        elif not _connective(n):
            done.append(n.copy() if keep(n) else _relax(pol))
        elif n.decl == BOOL_LIT:
            done.append(bool_lit(n.value))
        else:
            stack.append((n, pol, True))
            pols = _child_polarities(n, pol)
            for c, p in zip(reversed(n.children), reversed(pols)):
                stack.append((c, p, False))
    return bool_lit(True) if done[0] is None else done[0]


def drop_unused_declarations(script: Script) -> Script:
    used = {n.decl for n in script.nodes() if n.is_variable}
    script.declarations = [(n, s) for n, s in script.declarations if n in used]
    return script


def _restriction(keep, name):
    def transform(script: Script) -> Script:
        out = Script(script.logic, list(script.declarations), [], list(script.trailing))
        for a in script.assertions:
            r = restrict(a, keep)
            if not is_true(r):
                out.assertions.append(r)
        return _finish(drop_unused_declarations(out), name)
    transform.__name__ = name
    return transform


restrict_to_weq = _restriction(is_pure_word_equation, "Restrict2WEQ")
restrict_to_length = _restriction(is_linear_length_constraint, "Restrict2Length")
restrict_to_regex = _restriction(is_membership, "Restrict2RegEx")


# --- renaming -----------------------------------------------------------------

def canonical_names(script: Script) -> dict:
    """Old name -> new name, numbering each sort separately in declaration order."""
    counters = {}
    mapping = {}
    for name, sort in script.declarations:
        prefix = SORT_PREFIX.get(sort, "var")
        counters[prefix] = counters.get(prefix, 0) + 1
        mapping[name] = f"{prefix}{counters[prefix]:02d}"
    return mapping


def rename_variables(script: Script) -> Script:
    mapping = canonical_names(script)
    out = script.copy()
    out.declarations = [(mapping[n], s) for n, s in out.declarations]
    for n in out.nodes():
        if n.is_variable:
            n.decl = mapping[n.decl]
    return _finish(out, "RenameVariables")


# --- structural rewrites ------------------------------------------------------

def disjoin_constraints(script: Script) -> Script:
    out = script.copy()
    split = []
    for a in out.assertions:
        stack = [a]
        while stack:
            n = stack.pop()
            if n.decl == "and":
                stack.extend(reversed(n.children))
            else:
                split.append(n)
    out.assertions = split
    return _finish(out, "DisjoinConstraints")


def _reduce_not(n):
    if n.decl == "not" and n.children[0].decl == "not":
        return n.children[0].children[0]
    return n


def reduce_negations(script: Script) -> Script:
    out = script.copy()
    out.assertions = [_rebuild(a, _reduce_not) for a in out.assertions]
    return _finish(out, "ReduceNegations")


def _equals_true(n):
    if n.decl == "=" and len(n.children) == 2:
        a, b = n.children
        if is_true(b) and a.sort is Sort.BOOL:
            return a
        if is_true(a) and b.sort is Sort.BOOL:
            return b
    return n


def equals_true(script: Script) -> Script:
    out = script.copy()
    out.assertions = [_rebuild(a, _equals_true) for a in out.assertions]
    return _finish(out, "EqualsTrue")


def identity(script: Script) -> Script:
    return _finish(script.copy(), "Identity")


TRANSFORMS = {
    "Restrict2WEQ": restrict_to_weq,
    "Restrict2Length": restrict_to_length,
    "Restrict2RegEx": restrict_to_regex,
    "RenameVariables": rename_variables,
    "DisjoinConstraints": disjoin_constraints,
    "ReduceNegations": reduce_negations,
    "EqualsTrue": equals_true,
    "Identity": identity,
}

DESCRIPTIONS = {
    "Restrict2WEQ": "keep only word equations",
    "Restrict2Length": "keep only linear length constraints",
    "Restrict2RegEx": "keep only regular membership queries",
    "RenameVariables": "rename variables to str01, int01, ...",
    "DisjoinConstraints": "split top-level conjunctions into separate assertions",
    "ReduceNegations": "remove double negations",
    "EqualsTrue": "simplify (= e true) to e",
    "Identity": "leave the instance unchanged",
}


def apply_transform(name: str, script: Script) -> Script:
    try:
        fn = TRANSFORMS[name]
    except KeyError:
        raise UnknownFunction(f"unknown function {name!r}") from None
    return fn(script)
