"""The predicate catalog used in qlang ``Where`` clauses.

Structural predicates read the intel attached to an instance's AST.  Solver
predicates read stored results and trigger a solver run when none exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from smtquery.errors import SolverUnavailable, UnknownPredicate, UnknownSolver
from smtquery.intel import (
    constraint_kinds, regex_classification, upper_bounds, variable_counts,
    word_equation_forms,
)
from smtquery.smtlib.ast import Script, Sort
from smtquery.store import Result, Validation


@dataclass(frozen=True)
class PredicateCall:
    name: str
    args: tuple = ()

    def __str__(self):
        return f"{self.name}({', '.join(self.args)})" if self.args else self.name


@dataclass(frozen=True)
class PredicateSpec:
    name: str
    arity: int
    fn: Callable
    doc: str
    structural: bool = True


# --- structural ---------------------------------------------------------------

def string_variable_counts(script: Script) -> dict:
    counts = variable_counts(script)
    return {v: n for v, n in counts.items() if script.sort_of(v) is Sort.STRING}


def has_weq(script):
    return constraint_kinds(script).hasWEQ


def has_linears(script):
    return constraint_kinds(script).hasLinears


def has_regex(script):
    return constraint_kinds(script).hasRegex


def has_higher_order(script):
    return constraint_kinds(script).hasHigherOrder


def is_simple_regex(script):
    r = regex_classification(script)
    return r.onlyMembership and r.simpleLHS and not r.usesComplementOrInter


def is_simple_regex_concatenation(script):
    r = regex_classification(script)
    return r.onlyMembership and r.concatLHS and not r.usesComplementOrInter


def is_upper_bounded(script):
    bounds = upper_bounds(script)
    return all(bounds.get(v) is not None for v in string_variable_counts(script))


def is_quadratic(script):
    return all(n <= 2 for n in string_variable_counts(script).values())


def is_pattern_matching(script):
    forms = word_equation_forms(script)
    if not forms:
        return False
    counts = variable_counts(script)
    return all(any(x is not None and counts.get(x) == 1 for x in sides) for sides in forms)


def has_at_least_5_variables(script):
    return len(script.variables(Sort.STRING)) >= 5


# --- solver-backed ------------------------------------------------------------

def is_sat(ctx, inst, solver):
    r = ctx.result(inst, solver)
    return r is not None and r.result is Result.SATISFIED


def is_unsat(ctx, inst, solver):
    r = ctx.result(inst, solver)
    return r is not None and r.result is Result.UNSATISFIED


def has_valid_model(ctx, inst, solver):
    r = ctx.result(inst, solver)
    if r is None or r.result is not Result.SATISFIED:
        return False
    return ctx.validation(inst, r) is Validation.MODEL_VALID


def is_correct(ctx, inst, solver):
    # the verdict depends on every solver's answer, so all of them must have run
    ctx.results_all(inst)
    r = ctx.result(inst, solver)
    if r is None:
        return False
    v = ctx.validation(inst, r)
    if r.result is Result.SATISFIED:
        return v is Validation.MODEL_VALID
    if r.result is Result.UNSATISFIED:
        return v is Validation.MAJORITY_AGREE
    return False


def is_faster(ctx, inst, s1, s2):
    a, b = ctx.result(inst, s1), ctx.result(inst, s2)
    bad = (Result.TIMEOUT, Result.CRASH)
    if a is None or b is None or a.result in bad or b.result in bad:
        return False
    return a.time < b.time


CATALOG = {s.name: s for s in (
    PredicateSpec("hasWEQ", 0, has_weq, "contains a word equation"),
    PredicateSpec("hasLinears", 0, has_linears, "contains a linear length constraint"),
    PredicateSpec("hasRegex", 0, has_regex, "contains a regular membership query"),
    PredicateSpec("hasHigherOrder", 0, has_higher_order,
                  "uses substr, indexof, replace or a similar function"),
    PredicateSpec("isSimpleRegex", 0, is_simple_regex,
                  "only memberships of a variable or constant, no complement or intersection"),
    PredicateSpec("isSimpleRegexConcatenation", 0, is_simple_regex_concatenation,
                  "only memberships of concatenations, no complement or intersection"),
    PredicateSpec("isUpperBounded", 0, is_upper_bounded,
                  "every string variable has a finite length bound"),
    PredicateSpec("isQuadratic", 0, is_quadratic, "every string variable occurs at most twice"),
    PredicateSpec("isPatternMatching", 0, is_pattern_matching,
                  "every word equation is x = t with x occurring nowhere else"),
    PredicateSpec("hasAtLeast5Variables", 0, has_at_least_5_variables,
                  "declares at least 5 string variables"),
    PredicateSpec("isSAT", 1, is_sat, "solver answered sat", False),
    PredicateSpec("isUNSAT", 1, is_unsat, "solver answered unsat", False),
    PredicateSpec("hasValidModel", 1, has_valid_model,
                  "solver answered sat with a model that validates", False),
    PredicateSpec("isCorrect", 1, is_correct,
                  "solver answer agrees with the cross-validated verdict", False),
    PredicateSpec("isFaster", 2, is_faster,
                  "first solver produced a result quicker than the second", False),
)}


def resolve(call: PredicateCall) -> PredicateSpec:
    """Catalog entry for ``call``; checks the name and the number of arguments."""
    spec = CATALOG.get(call.name)
    if spec is None:
        raise UnknownPredicate(f"unknown predicate {call.name!r}")
    if len(call.args) != spec.arity:
        raise UnknownPredicate(
            f"{call.name} takes {spec.arity} argument(s), got {len(call.args)}")
    return spec


@dataclass
class EvalContext:
    """What predicates may look at: the store, and a harness for missing results."""

    store: object
    harness: object = None
    _scripts: dict = field(default_factory=dict, repr=False)

    def script(self, inst) -> Script:
        s = self._scripts.get(inst.id)
        if s is None:
            s = self._scripts[inst.id] = self.store.load_ast(inst)
        return s

    def forget(self, inst):
        self._scripts.pop(inst.id, None)

    @property
    def configured(self) -> list[str]:
        return self.harness.names if self.harness is not None else []

    def canonical(self, name: str) -> str:
        for n in self.configured + self.store.solver_names():
            if n.lower() == name.lower():
                return n
        raise UnknownSolver(f"unknown solver {name!r}")

    def result(self, inst, solver):
        name = self.canonical(solver)
        r = self.store.newest_result(inst.id, name)
        if r is None:
            if name not in self.configured:
                raise SolverUnavailable(f"no results for {name} and it is not configured")
            r = self.harness.ensure(inst, [name])[name]
        return r

    def results_all(self, inst):
        if self.harness is not None:
            self.harness.ensure(inst, self.configured)

    def validation(self, inst, r):
        v = self.store.get_validation(r.id)
        if v is None and self.harness is not None:
            self.harness.revalidate(inst)
            v = self.store.get_validation(r.id)
        return v.result if v else None


def eval_predicate(call: PredicateCall, inst, ctx: EvalContext) -> bool:
    spec = resolve(call)
    if spec.structural:
        return bool(spec.fn(ctx.script(inst)))
    return bool(spec.fn(ctx, inst, *call.args))
