"""The qlang query language: parsing, evaluation and the interactive loop.

::

    q ::= Select (Name | Hash | Content) From d [Where c]
        | Extract Extractor From d [Where c] [Apply Function]
    d ::= * | Set | Set:Track | d, d
    c ::= Predicate | (c And c) | (c Or c) | (c) | Not c | True | False

Keywords are case-insensitive; predicate, extractor and function names are not.
A missing ``Where`` means ``True`` and a missing ``Apply`` means ``Identity``.
"""

from __future__ import annotations

import datetime
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from smtquery import extractors, predicates, transforms
from smtquery.errors import (
    IntelError, ParseError, QuerySyntaxError, SMTQueryError, UnknownExtractor, UnknownFunction,
)
from smtquery.extractors import ExtractEnv, QueryResult
from smtquery.predicates import EvalContext, PredicateCall
from smtquery.smtlib import content_hash
from smtquery.store import All, Set, SetTrack

log = logging.getLogger(__name__)

KEYWORDS = {"select", "extract", "from", "where", "apply", "and", "or", "not", "true", "false"}
OUTPUTS = {"name": "Name", "hash": "Hash", "content": "Content"}


# --- syntax tree ----------------------------------------------------------------

@dataclass(frozen=True)
class Pred:
    call: PredicateCall


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    inner: object


@dataclass(frozen=True)
class Const:
    value: bool


TRUE, FALSE = Const(True), Const(False)


@dataclass(frozen=True)
class Select:
    output: str
    dataset: tuple
    condition: object = TRUE


@dataclass(frozen=True)
class Extract:
    extractor: str
    dataset: tuple
    condition: object = TRUE
    function: str = "Identity"


def predicate_calls(c):
    """All predicate calls of a condition, left to right."""
    stack, out = [c], []
    while stack:
        n = stack.pop()
        if isinstance(n, Pred):
            out.append(n.call)
        elif isinstance(n, (And, Or)):
            stack += [n.right, n.left]
        elif isinstance(n, Not):
            stack.append(n.inner)
    return out


# --- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),:*])|(?P<word>[A-Za-z0-9_.\-]+))")


@dataclass
class Token:
    kind: str  # "punct", "word" or "end"
    text: str
    column: int

    def is_kw(self, kw):
        return self.kind == "word" and self.text.lower() == kw


def tokenize(text: str) -> list[Token]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise QuerySyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, what):
        t = self.tok
        found = "end of query" if t.kind == "end" else repr(t.text)
        raise QuerySyntaxError(f"expected {what}, found {found}", t.column)

    def keyword(self, kw):
        if not self.tok.is_kw(kw):
            self.fail(kw.capitalize())
        return self.next()

    def punct(self, p):
        if not (self.tok.kind == "punct" and self.tok.text == p):
            self.fail(repr(p))
        return self.next()

    def ident(self, what="a name"):
        t = self.tok
        if t.kind != "word" or t.text.lower() in KEYWORDS:
            self.fail(what)
        return self.next()

    def query(self):
        if self.tok.is_kw("select"):
            self.next()
            t = self.ident("Name, Hash or Content")
            out = OUTPUTS.get(t.text.lower())
            if out is None:
                raise QuerySyntaxError(f"expected Name, Hash or Content, found {t.text!r}", t.column)
            self.keyword("from")
            ds = self.dataset()
            cond = self.where()
            q = Select(out, ds, cond)
        elif self.tok.is_kw("extract"):
            self.next()
            t = self.ident("an extractor")
            if t.text not in extractors.EXTRACTORS:
                raise UnknownExtractor(f"unknown extractor {t.text!r} at column {t.column}")
            self.keyword("from")
            ds = self.dataset()
            cond = self.where()
            fn = "Identity"
            if self.tok.is_kw("apply"):
                self.next()
                f = self.ident("a function")
                if f.text not in transforms.TRANSFORMS:
                    raise UnknownFunction(f"unknown function {f.text!r} at column {f.column}")
                fn = f.text
            q = Extract(t.text, ds, cond, fn)
        else:
            self.fail("Select or Extract")
        if self.tok.kind != "end":
            self.fail("end of query")
        return q

    def where(self):
        if self.tok.is_kw("where"):
            self.next()
            return self.condition()
        return TRUE

    def dataset(self):
        atoms = [self.dataset_atom()]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.next()
            atoms.append(self.dataset_atom())
        return tuple(atoms)

    def dataset_atom(self):
        if self.tok.kind == "punct" and self.tok.text == "*":
            self.next()
            return All()
        name = self.ident("a benchmark set").text
        if self.tok.kind == "punct" and self.tok.text == ":":
            self.next()
            return SetTrack(name, self.ident("a track").text)
        return Set(name)

    def condition(self):
        t = self.tok
        if t.is_kw("true"):
            self.next()
            return TRUE
        if t.is_kw("false"):
            self.next()
            return FALSE
        if t.is_kw("not"):
            self.next()
            return Not(self.condition())
        if t.kind == "punct" and t.text == "(":
            self.next()
            # "not" binds to the next operand: (not a and b) is ((not a) and b)
            left = self.condition()
            if self.tok.is_kw("and") or self.tok.is_kw("or"):
                op = And if self.next().text.lower() == "and" else Or
                right = self.condition()
                self.punct(")")
                return op(left, right)
            self.punct(")")
            return left
        return self.predicate()

    def predicate(self):
        name = self.ident("a predicate")
        args = []
        if self.tok.kind == "punct" and self.tok.text == "(":
            self.next()
            args.append(self.ident("a solver name").text)
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.next()
                args.append(self.ident("a solver name").text)
            self.punct(")")
        call = PredicateCall(name.text, tuple(args))
        predicates.resolve(call)
        return Pred(call)


def parse_query(text: str):
    """Parse one query; raises QuerySyntaxError with a 1-based column."""
    return _Parser(text).query()


# --- evaluation ---------------------------------------------------------------

def eval_condition(c, inst, ctx) -> bool:
    if isinstance(c, Const):
        return c.value
    if isinstance(c, Pred):
        return predicates.eval_predicate(c.call, inst, ctx)
    if isinstance(c, Not):
        return not eval_condition(c.inner, inst, ctx)
    if isinstance(c, And):
        return eval_condition(c.left, inst, ctx) and eval_condition(c.right, inst, ctx)
    if isinstance(c, Or):
        return eval_condition(c.left, inst, ctx) or eval_condition(c.right, inst, ctx)
    raise TypeError(f"not a condition: {c!r}")


@dataclass
class QueryOutcome:
    query: object
    result: QueryResult
    lines: list
    files: list
    outdir: Path | None = None


class QueryEngine:
    """Evaluates queries against a store, running solvers through ``harness`` when needed."""

    def __init__(self, store, harness=None, output_root="output", jobs=1, render=False,
                 out=None):
        self.store = store
        self.harness = harness
        self.output_root = Path(output_root)
        self.jobs = max(1, int(jobs))
        self.render = render
        self.out = out

    def context(self):
        return EvalContext(self.store, self.harness)

    def emit(self, line):
        print(line, file=self.out or sys.stdout)

    def matches(self, q, ctx=None):
        """(matched instances, universe) for the dataset and condition of ``q``."""
        ctx = ctx or self.context()
        for call in predicate_calls(q.condition):
            for a in call.args:
                ctx.canonical(a)
        universe = self.store.select_instances(q.dataset)

        def check(inst):
            try:
                return eval_condition(q.condition, inst, ctx)
            except (ParseError, IntelError) as exc:
                log.warning("skipping %s: %s", inst.label, exc)
                return False

        if self.jobs > 1 and len(universe) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                verdicts = list(pool.map(check, universe))
        else:
            verdicts = [check(i) for i in universe]
        return [i for i, ok in zip(universe, verdicts) if ok], universe

    def evaluate(self, q) -> QueryOutcome:
        ctx = self.context()
        matched, universe = self.matches(q, ctx)
        per_bench = {}
        for inst in universe:
            m, n = per_bench.get(inst.benchmark, (0, 0))
            per_bench[inst.benchmark] = (m, n + 1)
        for inst in matched:
            m, n = per_bench[inst.benchmark]
            per_bench[inst.benchmark] = (m + 1, n)
        if isinstance(q, Select):
            lines = [self.select_line(q.output, inst) for inst in matched]
            for line in lines:
                self.emit(line)
            return QueryOutcome(q, QueryResult([(i, None) for i in matched], len(universe),
                                               per_bench), lines, [])
        pairs = []
        for inst in matched:
            try:
                pairs.append((inst, transforms.apply_transform(q.function, ctx.script(inst))))
            except ParseError as exc:
                log.warning("skipping %s: %s", inst.label, exc)
        result = QueryResult(pairs, len(universe), per_bench)
        solvers = self.harness.names if self.harness is not None else self.store.solver_names()
        if q.extractor in extractors.NEEDS_RESULTS and self.harness is not None:
            self.harness.schedule_runs([i for i, _ in pairs], solvers, self.jobs)
        outdir = self.output_root / datetime.datetime.now().strftime("%Y%m%d-%H%M%S-%f")
        env = ExtractEnv(outdir, solvers,
                         lambda inst, s: self.store.newest_result(inst.id, s), self.render)
        done = extractors.get_extractor(q.extractor)(result, env)
        lines = done.text.splitlines()
        for line in lines:
            self.emit(line)
        return QueryOutcome(q, result, lines, done.files, outdir if done.files else None)

    def select_line(self, output, inst):
        if output == "Name":
            return inst.label
        source = self.store.read_source(inst)
        if output == "Hash":
            return content_hash(source)
        return source.decode("utf-8").rstrip("\n")

    def run(self, text: str) -> QueryOutcome:
        return self.evaluate(parse_query(text))


def repl(engine: QueryEngine, stdin=None, err=None, prompt="qlang> ") -> int:
    """Read queries line by line until end of input or ``exit``."""
    stdin = stdin or sys.stdin
    err = err or sys.stderr
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    while True:
        if interactive:
            print(prompt, end="", file=engine.out or sys.stdout, flush=True)
        line = stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower() in ("exit", "quit"):
            break
        try:
            engine.run(line)
        except SMTQueryError as exc:
            print(f"error: {exc}", file=err)
        except Exception as exc:  # keep the loop alive on unexpected failures
            log.exception("query failed")
            print(f"error: {exc}", file=err)
    return 0
