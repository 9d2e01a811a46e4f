"""Build :class:`Script` objects from SMT-LIB text."""

from __future__ import annotations

from smtquery.errors import ParseError
from smtquery.smtlib.ast import (
    GENERIC, SORT_NAMES, Expr, Kind, Script, Sort, app, bool_lit, int_lit, str_lit, var,
)
from smtquery.smtlib.reader import Atom, SList, is_symbol, read
from smtquery.smtlib.translate import translate_25_to_26

S, I, B, R = Sort.STRING, Sort.INTEGER, Sort.BOOL, Sort.RE

# decl -> (min arity, max arity, argument sorts, result sort)
# argument sorts is either one sort (all arguments) or a positional list
SIGNATURES = {
    "and": (1, None, B, B),
    "or": (1, None, B, B),
    "not": (1, 1, B, B),
    "=>": (2, None, B, B),
    "<": (2, None, I, B),
    "<=": (2, None, I, B),
    ">": (2, None, I, B),
    ">=": (2, None, I, B),
    "+": (1, None, I, I),
    "-": (1, None, I, I),
    "*": (1, None, I, I),
    "str.++": (1, None, S, S),
    "str.len": (1, 1, [S], I),
    "str.at": (2, 2, [S, I], S),
    "str.substr": (3, 3, [S, I, I], S),
    "str.indexof": (2, 3, [S, S, I], I),
    "str.contains": (2, 2, [S, S], B),
    "str.prefixof": (2, 2, [S, S], B),
    "str.suffixof": (2, 2, [S, S], B),
    "str.replace": (3, 3, [S, S, S], S),
    "str.to_int": (1, 1, [S], I),
    "str.from_int": (1, 1, [I], S),
    "str.in_re": (2, 2, [S, R], B),
    "str.to_re": (1, 1, [S], R),
    "re.++": (1, None, R, R),
    "re.union": (1, None, R, R),
    "re.inter": (1, None, R, R),
    "re.comp": (1, 1, [R], R),
    "re.*": (1, 1, [R], R),
    "re.+": (1, 1, [R], R),
    "re.opt": (1, 1, [R], R),
    "re.range": (2, 2, [S, S], R),
    "re.loop": (1, 1, [R], R),
}
POLYMORPHIC = frozenset({"=", "distinct", "ite"})
NULLARY = frozenset({"re.none", "re.all", "re.allchar"})
RECOGNIZED = frozenset(SIGNATURES) | POLYMORPHIC | NULLARY

# commands kept verbatim in Script.trailing
KEPT_COMMANDS = frozenset({
    "check-sat", "get-model", "set-option", "get-value", "get-info", "exit",
    "get-unsat-core", "get-assertions", "echo", "get-option",
})
DROPPED_COMMANDS = frozenset({"set-info"})


def parse_script(text: str | bytes, translate25: bool = False) -> Script:
    """Parse SMT-LIB source into a :class:`Script`.

    With ``translate25`` the 2.5 keywords are rewritten first.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if translate25:
        text = translate_25_to_26(text)
    return _ScriptBuilder(text).build()


def parse_term(text: str, declarations=()) -> Expr:
    """Parse a single term against the given ``(name, sort)`` declarations."""
    b = _ScriptBuilder(text)
    b.declared = dict(declarations)
    exprs = read(text)
    if len(exprs) != 1:
        raise ParseError("expected exactly one term")
    return b.term(exprs[0], {})


def parse_sort(sx) -> Sort:
    if isinstance(sx, Atom) and sx.kind == "symbol" and sx.value in SORT_NAMES:
        return SORT_NAMES[sx.value]
    if isinstance(sx, SList) and len(sx) == 2 and is_symbol(sx[0], "RegEx"):
        return Sort.RE
    line, col = _where(sx)
    raise ParseError(f"unsupported sort {sx!r}", line, col)


def _where(sx):
    return sx.line, sx.column


class _ScriptBuilder:
    def __init__(self, text):
        self.text = text
        self.declared: dict[str, Sort] = {}

    def build(self) -> Script:
        script = Script()
        for cmd in read(self.text):
            if not isinstance(cmd, SList) or not cmd or not is_symbol(cmd[0]):
                raise ParseError("expected a command", *_where(cmd))
            name = cmd[0].value
            if name == "set-logic":
                if len(cmd) != 2 or not is_symbol(cmd[1]):
                    raise ParseError("malformed set-logic", *_where(cmd))
                script.logic = cmd[1].value
            elif name in ("declare-fun", "declare-const"):
                decl_name, sort = self.declaration(cmd)
                if decl_name in self.declared:
                    raise ParseError(f"symbol {decl_name} declared twice", *_where(cmd))
                self.declared[decl_name] = sort
                script.declarations.append((decl_name, sort))
            elif name == "assert":
                if len(cmd) != 2:
                    raise ParseError("assert takes exactly one term", *_where(cmd))
                e = self.term(cmd[1], {})
                if e.sort not in (Sort.BOOL, Sort.UNKNOWN):
                    raise ParseError(f"assertion has sort {e.sort.value}", *_where(cmd[1]))
                script.assertions.append(e)
            elif name in KEPT_COMMANDS:
                script.trailing.append(self.text[cmd.start:cmd.end])
            elif name in DROPPED_COMMANDS:
                pass
            else:
                raise ParseError(f"unsupported command {name}", *_where(cmd))
        return script.renumber()

    def declaration(self, cmd):
        if cmd[0].value == "declare-const":
            if len(cmd) != 3 or not is_symbol(cmd[1]):
                raise ParseError("malformed declare-const", *_where(cmd))
            return cmd[1].value, parse_sort(cmd[2])
        if len(cmd) != 4 or not is_symbol(cmd[1]) or not isinstance(cmd[2], SList):
            raise ParseError("malformed declare-fun", *_where(cmd))
        if len(cmd[2]):
            raise ParseError("function declarations with arguments are unsupported", *_where(cmd))
        return cmd[1].value, parse_sort(cmd[3])

    def term(self, sx, env) -> Expr:
        """Build the expression for ``sx`` (iteratively; nesting depth is unbounded)."""
        values = []
        # work items: ("enter", sx, env) or ("exit", builder, arity)
        work = [("enter", sx, env)]
        while work:
            item = work.pop()
            if item[0] == "exit":
                _, build, n = item
                children = values[len(values) - n:] if n else []
                del values[len(values) - n:]
                result = build(children)
                if isinstance(result, tuple):
                    # a let binding list: continue with the body in the new scope
                    body, inner = result
                    work.append(("enter", body, inner))
                else:
                    values.append(result)
                continue
            _, sx, env = item
            if isinstance(sx, Atom):
                values.append(self.atom(sx, env))
                continue
            step = self.expand(sx, env)
            if isinstance(step, Expr):
                values.append(step)
                continue
            build, args, arg_env = step
            work.append(("exit", build, len(args)))
            work.extend(("enter", a, arg_env) for a in reversed(args))
        return values[0]

    def expand(self, sx, env):
        """Either a finished Expr or (builder, argument s-exprs, their scope)."""
        if not sx:
            raise ParseError("empty application", *_where(sx))
        head = sx[0]
        if isinstance(head, SList):
            if len(head) >= 2 and is_symbol(head[0], "_") and is_symbol(head[1], "re.loop"):
                params = []
                for p in head[2:]:
                    if not (isinstance(p, Atom) and p.kind == "numeral"):
                        raise ParseError("re.loop index must be a numeral", *_where(p))
                    params.append(p.value)
                if not 1 <= len(params) <= 2:
                    raise ParseError("re.loop takes one or two indices", *_where(head))
                return (lambda ch: self.checked("re.loop", ch, sx, params)), sx[1:], env
            if len(sx) == 1:
                raise ParseError("application without arguments", *_where(sx))
            return self.generic(self.text[head.start:head.end]), sx[1:], env
        if not is_symbol(head):
            raise ParseError(f"cannot apply {head.text}", *_where(head))
        name = head.value
        if name == "let":
            return self.let(sx, env)
        if name in ("forall", "exists"):
            raise ParseError("quantifiers are unsupported", *_where(sx))
        if name == "!":
            if len(sx) < 2:
                raise ParseError("malformed annotation", *_where(sx))
            return (lambda ch: ch[0]), [sx[1]], env
        if name == "re.loop" and len(sx) > 2:
            # 2.5 form: (re.loop r lo [hi])
            params = []
            for p in sx[2:]:
                if not (isinstance(p, Atom) and p.kind == "numeral"):
                    raise ParseError("re.loop bound must be a numeral", *_where(p))
                params.append(p.value)
            if len(params) > 2:
                raise ParseError("re.loop takes at most two bounds", *_where(sx))
            return (lambda ch: self.checked("re.loop", ch, sx, params)), [sx[1]], env
        if len(sx) == 1:
            if name in NULLARY:
                return app(name, Sort.RE)
            raise ParseError(f"application of {name} without arguments", *_where(sx))
        if name in SIGNATURES or name in POLYMORPHIC:
            return (lambda ch: self.checked(name, ch, sx, [])), sx[1:], env
        return self.generic(name), sx[1:], env

    def atom(self, a: Atom, env) -> Expr:
        if a.kind == "string":
            return str_lit(a.value)
        if a.kind == "numeral":
            return int_lit(a.value)
        if a.kind == "symbol":
            name = a.value
            if name in env:
                return env[name].copy()
            if name in self.declared:
                return var(name, self.declared[name])
            if name in ("true", "false"):
                return bool_lit(name == "true")
            if name in NULLARY:
                return app(name, Sort.RE)
            raise ParseError(f"undeclared symbol {name}", a.line, a.column)
        # decimals, bit-vector constants, keywords
        return Expr(-1, Kind.OTHER, GENERIC, Sort.UNKNOWN, value=a.text)

    def let(self, sx, env):
        if len(sx) != 3 or not isinstance(sx[1], SList):
            raise ParseError("malformed let", *_where(sx))
        names = []
        for binding in sx[1]:
            if not (isinstance(binding, SList) and len(binding) == 2 and is_symbol(binding[0])):
                raise ParseError("malformed let binding", *_where(binding))
            names.append(binding[0].value)

        def bind(values):
            inner = dict(env)
            inner.update(zip(names, values))
            return sx[2], inner

        return bind, [b[1] for b in sx[1]], env

    @staticmethod
    def generic(head_text):
        return lambda ch: Expr(-1, Kind.OTHER, GENERIC, Sort.UNKNOWN, [], list(ch), value=head_text)

    def checked(self, decl, children, sx, params) -> Expr:
        line, col = _where(sx)
        n = len(children)
        if decl in ("=", "distinct"):
            if n < 2:
                raise ParseError(f"{decl} expects at least 2 arguments, got {n}", line, col)
            known = {c.sort for c in children} - {Sort.UNKNOWN}
            if len(known) > 1:
                raise ParseError(f"sort mismatch in {decl}", line, col)
            return app(decl, B, *children)
        if decl == "ite":
            if n != 3:
                raise ParseError(f"ite expects 3 arguments, got {n}", line, col)
            if children[0].sort not in (B, Sort.UNKNOWN):
                raise ParseError("ite condition must be Bool", line, col)
            known = {children[1].sort, children[2].sort} - {Sort.UNKNOWN}
            if len(known) > 1:
                raise ParseError("sort mismatch in ite branches", line, col)
            return app("ite", known.pop() if known else Sort.UNKNOWN, *children)
        lo, hi, arg_sorts, result = SIGNATURES[decl]
        if n < lo or (hi is not None and n > hi):
            raise ParseError(f"arity violation: {decl} applied to {n} arguments", line, col)
        for i, c in enumerate(children):
            expected = arg_sorts if isinstance(arg_sorts, Sort) else arg_sorts[i]
            if c.sort is not expected and c.sort is not Sort.UNKNOWN:
                raise ParseError(
                    f"sort mismatch: argument {i + 1} of {decl} has sort "
                    f"{c.sort.value}, expected {expected.value}", line, col)
        return app(decl, result, *children, params=params)
