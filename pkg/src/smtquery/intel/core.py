"""Bottom-up attribute computation over expression trees.

An :class:`IntelSpec` describes one analysis pass: a neutral element, a
``merge`` combining the values of sibling subtrees and an ``apply`` turning
the merged child value into the value of the node itself.  Results are stored
in every node's ``intel`` dictionary under ``(name, version)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from smtquery.errors import IntelError
from smtquery.smtlib.ast import Expr, Script


@dataclass(frozen=True)
class IntelSpec:
    name: str
    version: int
    neutral: Any
    apply: Callable[[Expr, Any], Any]
    merge: Callable[[Any, Any], Any]

    @property
    def key(self):
        return (self.name, self.version)

    def fold(self, values):
        acc = self.neutral
        for v in values:
            acc = self.merge(acc, v)
        return acc


def compute_intel(root: Expr, spec: IntelSpec) -> Expr:
    """Annotate every node below ``root`` with ``spec``; returns ``root``.

    Entries stored under other keys are left alone.
    """
    key = spec.key
    for node in root.postorder():
        try:
            merged = spec.neutral
            for child in node.children:
                merged = spec.merge(merged, child.intel[key])
            node.intel[key] = spec.apply(node, merged)
        except IntelError:
            raise
        except Exception as exc:
            raise IntelError(f"{spec.name} failed on node {node.id} ({node.decl}): {exc}") from exc
    return root


def annotate(script: Script, spec: IntelSpec, force: bool = False) -> Script:
    """Run ``spec`` over every assertion that does not yet carry its value."""
    for a in script.assertions:
        if force or spec.key not in a.intel:
            compute_intel(a, spec)
    return script


def script_value(script: Script, spec: IntelSpec):
    """Fold of the per-assertion root values."""
    annotate(script, spec)
    return spec.fold(a.intel[spec.key] for a in script.assertions)
