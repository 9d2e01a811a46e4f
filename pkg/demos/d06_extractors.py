"""
Tables, plots and graphs
========================

Extractors turn a query result into text on stdout and files under a fresh
timestamped output directory.
"""

from _corpus import CORPUS, scratch
from smtquery.extractors import cactus_rows, instance_table, results_table, vardep_edges
from smtquery.qlang import QueryEngine
from smtquery.smtlib import parse_script
from smtquery.store import Store

# the table layouts work on plain rows too
print(instance_table([["pisa:pisa:pisa-000.smt2", "Satisfied", 0.0695572, "Unknown", 1.5]],
                     ["CVC5", "Z3Seq"]))
col = {"SAT": 3, "UNSAT": 1, "Unknown": 0, "Timeout": 1, "Crash": 0,
       "Time w/o Timeout": 0.75, "Total Time": 20.75}
print(results_table({"A": col}, ["A"]))

# cactus data: per solver, solved count against cumulative time
for row in cactus_rows({"A": [0.5, 0.1, 0.3], "B": [0.2]}):
    print(row)

# variable dependency: which assertions mention which variables
ghj = parse_script((CORPUS / "woorpje" / "track01" / "02_track_1.smt2").read_text())
print(sorted(vardep_edges(ghj)))

work = scratch()
store = Store(work / "db" / "smtquery.db").init_db(work / "smtfiles")
engine = QueryEngine(store, output_root=work / "output")
for q in ["Extract VarDepPlot From woorpje:track01",
          "Extract SMTPlot From pisa Where isPatternMatching",
          "Extract SMTLib From * Where hasWEQ Apply Restrict2WEQ"]:
    out = engine.run(q)
    print(f"{q}\n  -> {len(out.files)} file(s) in {out.outdir.relative_to(work)}")
store.close()
