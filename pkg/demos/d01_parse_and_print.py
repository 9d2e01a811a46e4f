"""
Reading and writing SMT-LIB
===========================

Parse a benchmark into a typed syntax tree, walk it, print it back and
check that the round trip is stable.
"""

from _corpus import CORPUS
from smtquery.smtlib import (
    content_hash, parse_script, print_expr, print_script, structurally_equal,
    translate_25_to_26,
)

source = (CORPUS / "pisa" / "pisa" / "pisa-000.smt2").read_text()
script = parse_script(source)

print("logic:", script.logic)
print("declarations:", script.declarations)
for i, a in enumerate(script.assertions, 1):
    print(f"assertion {i}:", print_expr(a))

# every node carries its sort, and variables are leaves
variables = sorted({n.decl for n in script.nodes() if n.is_variable})
print("variables:", variables)

# printing and re-parsing gives back the same tree
again = parse_script(print_script(script))
print("round trip stable:", structurally_equal(script, again))
print("sha256:", content_hash(source)[:16], "...")

# older 2.5 spellings are rewritten before parsing
old = '(declare-fun x () String)(assert (str.in.re x (str.to.re "ab")))'
print(translate_25_to_26(old))
