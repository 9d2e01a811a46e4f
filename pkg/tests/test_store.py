import sqlite3

import pytest

from helpers import CORPUS, copy_corpus, corpus_files
from smtquery.errors import ForeignKeyViolation, SchemaExists, UnknownDataset
from smtquery.intel import BUILTIN_SPECS, VAR_COUNTS, IntelSpec, variable_counts
from smtquery.smtlib import parse_script, print_script, structurally_equal
from smtquery.store import (
    CACHE_MAGIC, All, Result, ResultRec, Set, SetTrack, Store, Validation, decode_script,
    encode_script, read_cache_file, scan_corpus,
)


def test_init_counts(store):
    files = corpus_files()
    assert len(store.instances()) == len(files) == 20
    assert [b.name for b in store.benchmarks()] == ["lengths", "pisa", "regex", "woorpje"]
    tracks = {(store.benchmarks()[0].id, "default")}
    assert {(t.benchmark_id, t.name) for t in store.tracks()} >= tracks
    assert len(store.tracks()) == 6


def test_scan_layout():
    triples = scan_corpus(CORPUS)
    assert ("lengths", "default") in {(b, t) for b, t, _ in triples}
    assert all(p.suffix in (".smt2", ".smt") for _, _, p in triples)


def test_init_twice_needs_force(store):
    with pytest.raises(SchemaExists):
        store.init_db(CORPUS)
    store.put_result(ResultRec(store.instances()[0].id, "A", Result.SATISFIED, 0.1))
    store.init_db(CORPUS, force=True)
    assert store.dump()["results"] == []
    assert len(store.instances()) == 20


def test_allocate_new(tmp_path):
    root = copy_corpus(tmp_path / "corpus")
    s = Store(tmp_path / "db" / "x.db").init_db(root)
    assert s.allocate_new(root) == 0
    (root / "woorpje" / "track03").mkdir()
    (root / "woorpje" / "track03" / "new.smt2").write_text("(check-sat)")
    (root / "fresh").mkdir()
    (root / "fresh" / "a.smt2").write_text("(check-sat)")
    (root / "fresh" / "notes.txt").write_text("ignored")
    before = s.dump()
    assert s.allocate_new(root) == 2
    after = s.dump()
    assert set(before["instances"]) < set(after["instances"])
    assert s.allocate_new(root) == 0
    assert s.find_instance("fresh", "default", "a.smt2") is not None


def test_allocate_needs_init(tmp_path):
    s = Store(tmp_path / "x.db")
    with pytest.raises(sqlite3.OperationalError):
        s.allocate_new(CORPUS)


def test_schema_version_checked(store):
    store._conn.execute("PRAGMA user_version = 99")
    with pytest.raises(sqlite3.OperationalError):
        store.allocate_new(CORPUS)


def test_select_instances(store):
    every = store.select_instances([All()])
    assert len(every) == 20
    assert [i.label for i in every] == sorted(i.label for i in every)
    woorpje = store.select_instances([Set("woorpje")])
    assert len(woorpje) == 7
    track = store.select_instances([SetTrack("woorpje", "track01")])
    assert len(track) == 4
    union = store.select_instances([SetTrack("woorpje", "track01"), Set("woorpje"), Set("pisa")])
    assert len(union) == 10
    with pytest.raises(UnknownDataset):
        store.select_instances([Set("nope")])
    with pytest.raises(UnknownDataset):
        store.select_instances([SetTrack("woorpje", "track99")])


def test_results_newest_first(store):
    iid = store.instances()[0].id
    store.put_result(ResultRec(iid, "Z3", Result.SATISFIED, 1.0, "(model)"))
    store.put_result(ResultRec(iid, "Z3", Result.UNKNOWN, 2.0))
    rows = store.get_results(iid, "z3")
    assert [r.result for r in rows] == [Result.UNKNOWN, Result.SATISFIED]
    assert store.newest_result(iid, "Z3").time == 2.0
    assert store.newest_result(iid, "cvc5") is None
    assert store.solver_names() == ["Z3"]


def test_foreign_keys(store):
    with pytest.raises(ForeignKeyViolation):
        store.put_result(ResultRec(99999, "A", Result.SATISFIED, 0.0))
    with pytest.raises(ForeignKeyViolation):
        store.put_validation(99999, Validation.MODEL_VALID)


def test_validation_is_replaced(store):
    rid = store.put_result(ResultRec(store.instances()[0].id, "A", Result.SATISFIED, 0.1))
    store.put_validation(rid, Validation.INCONCLUSIVE)
    store.put_validation(rid, Validation.MODEL_VALID)
    assert store.get_validation(rid).result is Validation.MODEL_VALID
    assert len(store.dump()["validation_results"]) == 1


# --- AST cache -----------------------------------------------------------------

def test_cache_cold_then_warm(store):
    inst = store.instances()[0]
    cold = store.load_ast(inst)
    assert store.cache_stats == {"hits": 0, "misses": 1, "computed": len(BUILTIN_SPECS)}
    assert store.cache_path(inst).read_bytes().startswith(CACHE_MAGIC)
    warm = store.load_ast(inst)
    assert store.cache_stats["hits"] == 1
    assert structurally_equal(cold, warm)
    for a, b in zip(cold.nodes(), warm.nodes()):
        assert a.id == b.id
        assert set(a.intel) == set(b.intel)
    assert variable_counts(warm) == variable_counts(cold)


def test_cache_invalidated_by_source_change(tmp_path):
    root = copy_corpus(tmp_path / "corpus")
    s = Store(tmp_path / "db" / "x.db").init_db(root)
    inst = s.find_instance("woorpje", "track01", "01_track_1.smt2")
    before = variable_counts(s.load_ast(inst))
    path = root / "woorpje" / "track01" / "01_track_1.smt2"
    path.write_text('(declare-fun X () String)(assert (= X "a"))(check-sat)')
    after = s.load_ast(inst)
    assert variable_counts(after) == {"X": 1} != before
    assert s.cache_stats["hits"] == 0


def test_cache_corrupt_file_is_recomputed(store):
    inst = store.instances()[0]
    store.load_ast(inst)
    store.cache_path(inst).write_bytes(b"garbage")
    store.load_ast(inst)
    assert store.cache_stats["misses"] == 2
    assert read_cache_file(store.cache_path(inst)) is not None


def test_cache_version_bump_recomputes_only_that_pass(store):
    inst = store.instances()[0]
    store.load_ast(inst)
    bumped = IntelSpec(VAR_COUNTS.name, VAR_COUNTS.version + 1, VAR_COUNTS.neutral,
                       VAR_COUNTS.apply, VAR_COUNTS.merge)
    specs = [bumped if s.name == VAR_COUNTS.name else s for s in BUILTIN_SPECS]
    script = store.load_ast(inst, specs)
    assert store.cache_stats["computed"] == len(BUILTIN_SPECS) + 1
    keys = {k for n in script.nodes() for k in n.intel}
    assert bumped.key in keys and VAR_COUNTS.key not in keys
    store.load_ast(inst, specs)
    assert store.cache_stats["hits"] == 1


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_encode_decode(path):
    s = parse_script(path.read_text())
    manifest, back = decode_script(encode_script(s, "h"))
    assert manifest["source_hash"] == "h"
    assert print_script(back) == print_script(s)


# --- 2.5 translation on ingest -----------------------------------------------------

def test_translate25_ingest(tmp_path):
    root = tmp_path / "old"
    (root / "bench").mkdir(parents=True)
    (root / "bench" / "a.smt2").write_text(
        '(declare-fun x () String)(assert (str.in.re x (str.to.re "\\x41")))(check-sat)')
    s = Store(tmp_path / "db" / "x.db", translate25=True).init_db(root)
    inst = s.instances()[0]
    assert inst.name == "a.smt2" and inst.path.endswith("a.v26.smt2")
    script = s.load_ast(inst)
    assert script.assertions[0].decl == "str.in_re"
    assert script.assertions[0].children[1].children[0].value == "A"
    # translated copies are not picked up as new instances
    assert s.allocate_new(root) == 0
