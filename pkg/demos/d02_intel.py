"""
Bottom-up facts about a benchmark
=================================

Each intel pass folds a value up the tree once. The results are stored on
the nodes, so asking again is free.
"""

from _corpus import CORPUS
from smtquery.intel import (
    constraint_kinds, regex_classification, upper_bounds, variable_counts, word_equation_forms,
)
from smtquery.smtlib import parse_script, print_expr

pisa = parse_script((CORPUS / "pisa" / "pisa" / "pisa-000.smt2").read_text())
print("variable occurrences:", variable_counts(pisa))
print("constraint kinds:", constraint_kinds(pisa))
print("length upper bounds:", upper_bounds(pisa))

regex = parse_script((CORPUS / "regex" / "simple" / "concat.smt2").read_text())
print("regex shape:", regex_classification(regex))

# each word equation side is recorded as its variable name, or None when it is a longer term
weq = parse_script((CORPUS / "woorpje" / "track01" / "01_track_1.smt2").read_text())
for a in weq.assertions:
    print("equation:", print_expr(a))
print("forms:", word_equation_forms(weq))
