"""
Rewriting instances
===================

Functions named after Apply rewrite each matched script before extraction.
Restrictions keep one kind of constraint and relax the rest, so the result is
always implied by the original.
"""

from smtquery.smtlib import parse_script, print_script
from smtquery.transforms import DESCRIPTIONS, apply_transform

for name, doc in DESCRIPTIONS.items():
    print(f"{name:20} {doc}")

s = parse_script('(declare-fun x () String)(declare-fun y () String)(declare-fun n () Int)'
                 '(assert (and (= x (str.++ y "a")) (str.in_re y (re.* (str.to_re "b")))))'
                 '(assert (not (not (= (str.len x) n))))')

for name in ["Restrict2WEQ", "Restrict2RegEx", "Restrict2Length", "ReduceNegations",
             "RenameVariables"]:
    print(f"\n;; {name}")
    print(print_script(apply_transform(name, s)))
