"""
The benchmark database
======================

Index a benchmark tree into SQLite, select instances by set and track, and
see the AST cache at work.
"""

import time

from _corpus import scratch
from smtquery.store import All, Set, SetTrack, Store

work = scratch()
store = Store(work / "db" / "smtquery.db").init_db(work / "smtfiles")

print("benchmarks:", [b.name for b in store.benchmarks()])
print("tracks:", [t.name for t in store.tracks()])
print("instances:", len(store.instances()))

woorpje = store.select_instances([Set("woorpje")])
track = store.select_instances([SetTrack("woorpje", "track01"), Set("pisa")])
print("woorpje:", len(woorpje), " track01 + pisa:", len(track))
print("first label:", store.select_instances([All()])[0].label)

# the first load parses and computes intel, the second reads the cache
inst = woorpje[0]
t0 = time.perf_counter()
store.load_ast(inst)
t1 = time.perf_counter()
store.load_ast(inst)
t2 = time.perf_counter()
print(f"cold load {1000 * (t1 - t0):.2f} ms, warm load {1000 * (t2 - t1):.2f} ms")
print("cache file:", store.cache_path(inst).relative_to(work))

# files dropped into the tree later are picked up by allocate_new
(work / "smtfiles" / "pisa" / "pisa" / "pisa-100.smt2").write_text("(check-sat)")
print("newly linked:", store.allocate_new(work / "smtfiles"))
store.close()
