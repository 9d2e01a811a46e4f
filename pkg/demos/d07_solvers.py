"""
Running solvers
===============

Solvers are plain commands listed in a config file. Here two tiny shell
"solvers" stand in for real ones so the demo runs anywhere.
"""

from _corpus import scratch
from smtquery.qlang import QueryEngine
from smtquery.solvers import Harness, SolverOutcome, cross_validate, load_solver_config
from smtquery.store import Result, Set, Store

work = scratch()
conf = work / "solvers.conf"
conf.write_text(
    "# name binary args... [timeout=S] [model=FLAG]\n"
    "Quick /bin/sh -c 'echo sat' {file}\n"
    "Slow /bin/sh -c 'sleep 0.2; echo unsat' {file} timeout=5\n"
    "Stuck /bin/sh -c 'sleep 5; echo sat' {file} timeout=0.3\n")
solvers = load_solver_config(conf)
print({n: c.command("x.smt2") for n, c in solvers.items()})

store = Store(work / "db" / "smtquery.db").init_db(work / "smtfiles")
harness = Harness(store, solvers, progress=None)
pisa = store.select_instances([Set("pisa")])
print("new results:", harness.schedule_runs(pisa, parallelism=4))
for r in (store.newest_result(pisa[0].id, s) for s in harness.names):
    print(f"  {r.solver:6} {r.result.value:12} {r.time:.2f}s")

# disagreement handling: unsat wins a vote when no sat model checks out
votes = {"A": SolverOutcome(Result.SATISFIED, 0.1),
         "B": SolverOutcome(Result.UNSATISFIED, 0.2),
         "C": SolverOutcome(Result.UNSATISFIED, 0.3)}
print(cross_validate(votes))

engine = QueryEngine(store, harness, output_root=work / "output")
engine.run("Select Name From pisa Where isFaster(Quick, Slow)")
engine.run("Extract ResultsTable From pisa")
store.close()
