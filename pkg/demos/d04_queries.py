"""
Asking questions with qlang
===========================

Queries pick a dataset, filter it with predicates and hand the matches to an
output (Select) or an extractor (Extract).
"""

import io

from _corpus import scratch
from smtquery.qlang import QueryEngine, parse_query, repl
from smtquery.store import Store

work = scratch()
store = Store(work / "db" / "smtquery.db").init_db(work / "smtfiles")
engine = QueryEngine(store, output_root=work / "output")

print(parse_query("Select Name From woorpje Where (hasWEQ And Not isQuadratic)"))

print("\n-- quadratic word equations in woorpje")
engine.run("Select Name From woorpje Where isQuadratic")

print("\n-- how much of the corpus has a word equation")
engine.run("Extract Count From * Where hasWEQ")

print("\n-- not binds to the next operand")
engine.run("Select Name From * Where (not hasWEQ and hasRegex)")

# a small session read from a stream; errors are reported and skipped
print("\n-- repl")
session = io.StringIO("Select Name From pisa Where isPatternMatching\nSelect oops\nexit\n")
repl(engine, session, prompt="")
store.close()
