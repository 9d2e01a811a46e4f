"""In-memory representation of string-constraint instances.

Every formula node is an :class:`Expr` carrying an operator name (``decl``),
a sort, optional integer parameters (e.g. the bounds of ``re.loop``), its
children and a per-node intel dictionary filled in by analysis passes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterator


class Sort(enum.Enum):
    STRING = "String"
    BOOL = "Bool"
    RE = "RE"
    INTEGER = "Integer"
    UNKNOWN = "Unknown"


class Kind(enum.Enum):
    VARIABLE = "Variable"
    OTHER = "Other"


STR_LIT = "str-lit"
INT_LIT = "int-lit"
BOOL_LIT = "bool-lit"
GENERIC = "generic"
LITERAL_DECLS = frozenset({STR_LIT, INT_LIT, BOOL_LIT})

# SMT-LIB sort names used in declarations
SORT_NAMES = {
    "String": Sort.STRING,
    "Int": Sort.INTEGER,
    "Bool": Sort.BOOL,
    "RegLan": Sort.RE,
}
SMTLIB_SORT = {v: k for k, v in SORT_NAMES.items()}


@dataclass(eq=False)
class Expr:
    id: int
    kind: Kind
    decl: str
    sort: Sort
    params: list[int] = field(default_factory=list)
    children: list["Expr"] = field(default_factory=list)
    intel: dict = field(default_factory=dict)
    # literal payload (str/int/bool); for generic nodes the head symbol
    value: Any = None

    @property
    def is_variable(self):
        return self.kind is Kind.VARIABLE

    @property
    def is_literal(self):
        return self.decl in LITERAL_DECLS

    @property
    def name(self):
        """Variable name; only meaningful for variable nodes."""
        return self.decl

    def walk(self) -> Iterator["Expr"]:
        """Pre-order traversal without recursion."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def postorder(self) -> Iterator["Expr"]:
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                yield node
            else:
                stack.append((node, True))
                for child in reversed(node.children):
                    stack.append((child, False))

    def key(self):
        """Structural identity ignoring ids and intel."""
        keys = {}
        for node in self.postorder():
            keys[id(node)] = (
                node.kind.value,
                node.decl,
                node.sort.value,
                tuple(node.params),
                _hashable(node.value),
                tuple(keys[id(c)] for c in node.children),
            )
        return keys[id(self)]

    def copy(self) -> "Expr":
        """Deep copy of the tree (intel dictionaries are copied shallowly)."""
        clones = {}
        for node in self.postorder():
            clones[id(node)] = Expr(
                node.id, node.kind, node.decl, node.sort, list(node.params),
                [clones[id(c)] for c in node.children], dict(node.intel), node.value,
            )
        return clones[id(self)]

    def __repr__(self):
        if self.is_variable:
            return f"Var({self.decl})"
        if self.is_literal:
            return f"Lit({self.value!r})"
        return f"Expr({self.decl}, {self.children!r})"


def _hashable(value):
    if isinstance(value, list):
        return tuple(value)
    return value


def var(name: str, sort: Sort) -> Expr:
    return Expr(-1, Kind.VARIABLE, name, sort)


def str_lit(value: str) -> Expr:
    return Expr(-1, Kind.OTHER, STR_LIT, Sort.STRING, value=value)


def int_lit(value: int) -> Expr:
    return Expr(-1, Kind.OTHER, INT_LIT, Sort.INTEGER, value=value)


def bool_lit(value: bool) -> Expr:
    return Expr(-1, Kind.OTHER, BOOL_LIT, Sort.BOOL, value=value)


def app(decl: str, sort: Sort, *children: Expr, params=()) -> Expr:
    return Expr(-1, Kind.OTHER, decl, sort, list(params), list(children))


def is_true(e: Expr) -> bool:
    return e.decl == BOOL_LIT and e.value is True


def is_false(e: Expr) -> bool:
    return e.decl == BOOL_LIT and e.value is False


@dataclass
class Script:
    logic: str | None = None
    declarations: list[tuple[str, Sort]] = field(default_factory=list)
    assertions: list[Expr] = field(default_factory=list)
    trailing: list[str] = field(default_factory=list)

    def sort_of(self, name):
        for n, s in self.declarations:
            if n == name:
                return s
        return None

    def variables(self, sort: Sort | None = None) -> list[str]:
        return [n for n, s in self.declarations if sort is None or s is sort]

    def nodes(self) -> Iterator[Expr]:
        for a in self.assertions:
            yield from a.walk()

    def renumber(self) -> "Script":
        """Assign fresh pre-order ids; returns self."""
        counter = 0
        for node in self.nodes():
            node.id = counter
            counter += 1
        return self

    def copy(self) -> "Script":
        return Script(self.logic, list(self.declarations),
                      [a.copy() for a in self.assertions], list(self.trailing))

    def key(self):
        return (
            self.logic,
            tuple((n, s.value) for n, s in self.declarations),
            tuple(a.key() for a in self.assertions),
            tuple(self.trailing),
        )

    def check(self):
        """Return a list of invariant violations (empty when well-formed)."""
        problems = []
        declared = {n: s for n, s in self.declarations}
        seen = set()
        for i, a in enumerate(self.assertions):
            if a.sort not in (Sort.BOOL, Sort.UNKNOWN):
                problems.append(f"assertion {i} has sort {a.sort.value}")
            for node in a.walk():
                if node.id in seen:
                    problems.append(f"duplicate node id {node.id}")
                seen.add(node.id)
                if node.is_variable:
                    if node.children:
                        problems.append(f"variable {node.decl} has children")
                    if node.decl not in declared:
                        problems.append(f"undeclared variable {node.decl}")
                    elif declared[node.decl] is not node.sort:
                        problems.append(f"variable {node.decl} sort mismatch")
        return problems


def _node_sig(n: Expr):
    return (n.kind, n.decl, n.sort, tuple(n.params), _hashable(n.value), len(n.children))


def expr_equal(a: Expr, b: Expr) -> bool:
    """Structural equality ignoring ids and intel (pre-order with arities fixes the tree)."""
    wa, wb = a.walk(), b.walk()
    for x, y in zip(wa, wb):
        if _node_sig(x) != _node_sig(y):
            return False
    return next(wa, None) is None and next(wb, None) is None


def structurally_equal(a: Script, b: Script) -> bool:
    return (a.logic == b.logic and a.declarations == b.declarations
            and a.trailing == b.trailing and len(a.assertions) == len(b.assertions)
            and all(expr_equal(x, y) for x, y in zip(a.assertions, b.assertions)))
