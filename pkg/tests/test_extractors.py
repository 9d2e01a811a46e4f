import csv
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import GHJ, PISA000, corpus_files
from smtquery.errors import UnknownExtractor
from smtquery.extractors import (
    EXTRACTORS, ExtractEnv, QueryResult, cactus_rows, count_lines, extract_cactus,
    extract_matching_pie, extract_smtlib, format_percentage, get_extractor, instance_table,
    results_summary, results_table, smt_dot, vardep_dot, vardep_edges,
)
from smtquery.smtlib import parse_script
from smtquery.store import InstanceRec, Result, ResultRec


def inst(i, name="x.smt2", bench="b", track="t"):
    return InstanceRec(i, name, f"/nowhere/{name}", 1, bench, track)


# --- Count ----------------------------------------------------------------------

@pytest.mark.parametrize("m,n,expected", [
    (51, 94, "Total matching instances: 51 of 94 within the selected set (54.25%)"),
    (76, 94, "Total matching instances: 76 of 94 within the selected set (80.85%)"),
    (0, 0, "Total matching instances: 0 of 0 within the selected set (0.00%)"),
    (3, 3, "Total matching instances: 3 of 3 within the selected set (100.00%)"),
])
def test_count_line(m, n, expected):
    assert count_lines(m, n)[0] == expected


@given(st.integers(min_value=1, max_value=10**7).flatmap(
    lambda n: st.tuples(st.integers(min_value=0, max_value=n), st.just(n))))
def test_percentage_is_truncated(mn):
    m, n = mn
    exact = Fraction(100 * m, n)
    shown = Fraction(format_percentage(m, n))
    assert 0 <= exact - shown < Fraction(1, 100)


def test_per_benchmark_lines():
    lines = count_lines(3, 5, {"woorpje": (2, 3), "pisa": (1, 2)})
    assert lines[1:] == ["pisa: 1 of 2", "woorpje: 2 of 3"]


# --- tables ----------------------------------------------------------------------

INSTANCE_TABLE = """\
Instance                 Result CVC5      Time CVC5  Result Z3Seq      Time Z3Seq  Result Z3Str3      Time Z3Str3
-----------------------  -------------  -----------  --------------  ------------  ---------------  -------------
pisa:pisa:pisa-011.smt2  Satisfied       0.00897606  Satisfied          0.0259043  Satisfied            0.0344819
pisa:pisa:pisa-009.smt2  Satisfied       0.0191097   Satisfied          0.0276228  Satisfied            0.028013
pisa:pisa:pisa-010.smt2  Satisfied       0.0167181   Satisfied          0.0258694  Satisfied            0.0266274
pisa:pisa:pisa-002.smt2  Satisfied       0.0235912   Satisfied          0.116755   Satisfied            0.0386019
pisa:pisa:pisa-000.smt2  Satisfied       0.0695572   Satisfied          0.0426866  Satisfied            0.0492182"""


def test_instance_table_layout():
    times = {
        "pisa-011": (0.00897606, 0.0259043, 0.0344819),
        "pisa-009": (0.0191097, 0.0276228, 0.028013),
        "pisa-010": (0.0167181, 0.0258694, 0.0266274),
        "pisa-002": (0.0235912, 0.116755, 0.0386019),
        "pisa-000": (0.0695572, 0.0426866, 0.0492182),
    }
    rows = []
    for name, ts in times.items():
        row = [f"pisa:pisa:{name}.smt2"]
        for t in ts:
            row += ["Satisfied", t]
        rows.append(row)
    assert instance_table(rows, ["CVC5", "Z3Seq", "Z3Str3"]) == INSTANCE_TABLE


def test_instance_table_empty_and_single():
    empty = instance_table([], ["A"]).splitlines()
    assert len(empty) == 2 and empty[0].split() == ["Instance", "Result", "A", "Time", "A"]
    one = instance_table([["b:t:x.smt2", "Unknown", 1.5]], ["A"]).splitlines()
    assert len(one) == 3 and one[2].split() == ["b:t:x.smt2", "Unknown", "1.5"]


RESULTS = """\
                    Z3Str3    Z3Seq     CVC4
----------------  --------  -------  -------
SAT               512       604      594
UNSAT             170       164      164
Unknown            13         0        0
Timeout           114        41       51
Crash               0         0        0
Time w/o Timeout   97.5154  123.816  134.242
Total Time        669.859   329.158  389.631"""


def test_results_table_layout():
    def col(sat, unsat, unk, to, w, total):
        return {"SAT": sat, "UNSAT": unsat, "Unknown": unk, "Timeout": to, "Crash": 0,
                "Time w/o Timeout": w, "Total Time": total}
    summary = {"Z3Str3": col(512, 170, 13, 114, 97.5154, 669.859),
               "Z3Seq": col(604, 164, 0, 41, 123.816, 329.158),
               "CVC4": col(594, 164, 0, 51, 134.242, 389.631)}
    assert results_table(summary, ["Z3Str3", "Z3Seq", "CVC4"]) == RESULTS


def test_results_summary_arithmetic():
    recs = [ResultRec(1, "A", Result.SATISFIED, 1.0), ResultRec(2, "A", Result.TIMEOUT, 20.0)]
    col = results_summary({"A": recs})["A"]
    assert col["SAT"] == 1 and col["Timeout"] == 1 and col["UNSAT"] == 0
    assert col["Time w/o Timeout"] == 1.0 and col["Total Time"] == 21.0
    empty = results_summary({"A": []})["A"]
    assert all(v == 0 for v in empty.values())


# --- cactus -----------------------------------------------------------------------

@given(st.dictionaries(st.sampled_from(["A", "B", "C"]),
                       st.lists(st.floats(min_value=0, max_value=100), max_size=30)))
def test_cactus_rows_properties(times):
    rows = cactus_rows(times)
    for s, ts in times.items():
        mine = [r for r in rows if r[0] == s]
        assert [r[1] for r in mine] == list(range(1, len(ts) + 1))
        cum = [r[2] for r in mine]
        assert cum == sorted(cum)
        if ts:
            assert abs(cum[-1] - sum(sorted(ts))) < 1e-9


def test_cactus_excludes_timeouts(tmp_path):
    insts = [inst(i, f"{i}.smt2") for i in range(4)]
    table = {(0, "A"): (Result.SATISFIED, 0.5), (1, "A"): (Result.TIMEOUT, 20.0),
             (2, "A"): (Result.UNSATISFIED, 0.25), (3, "A"): (Result.CRASH, 0.1),
             (0, "B"): (Result.UNKNOWN, 1.0)}

    def results(i, s):
        hit = table.get((i.id, s))
        return ResultRec(i.id, s, hit[0], hit[1]) if hit else None

    env = ExtractEnv(tmp_path, ["A", "B"], results)
    out = extract_cactus(QueryResult([(i, None) for i in insts], 4), env)
    rows = list(csv.reader(out.files[0].open()))
    assert rows == [["solver", "index", "cumulative"], ["A", "1", "0.25"], ["A", "2", "0.75"]]


def test_matching_pie(tmp_path):
    env = ExtractEnv(tmp_path)
    out = extract_matching_pie(QueryResult([(inst(1), None)], 4), env)
    assert list(csv.reader(out.files[0].open()))[1:] == [["matching", "1"], ["not matching", "3"]]


# --- files and graphs ------------------------------------------------------------------

def test_smtlib_export(tmp_path):
    s = parse_script(PISA000.read_text())
    i = inst(1, "pisa-000.smt2", "pisa", "pisa")
    out = extract_smtlib(QueryResult([(i, s)], 1), ExtractEnv(tmp_path))
    assert out.files == [tmp_path / "pisa" / "pisa" / "pisa-000.smt2"]
    parse_script(out.files[0].read_text())


def test_vardep_edges_ghj():
    s = parse_script(GHJ.read_text())
    assert set(vardep_edges(s)) == {("G", "a1"), ("H", "a1"), ("J", "a2"), ("J", "a3")}
    dot = vardep_dot(s)
    assert dot.startswith("graph ") and '"J" -- a3;' in dot


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_vardep_edges_match_occurrences(path):
    s = parse_script(path.read_text())
    expected = {(n.decl, f"a{i}") for i, a in enumerate(s.assertions, 1)
                for n in a.walk() if n.is_variable}
    assert set(vardep_edges(s)) == expected


def test_smt_dot_colours_repeated_subtrees():
    s = parse_script('(declare-fun x () String)'
                     '(assert (= (str.++ x "a") (str.++ x "a")))(assert (= x "b"))')
    dot = smt_dot(s)
    assert dot.count("fillcolor") == 2
    # one edge into every node: from its parent or from its assertion marker
    assert dot.count(" -> ") == len(list(s.nodes()))
    assert smt_dot(parse_script(GHJ.read_text())).count("fillcolor") >= 2


def test_catalog():
    assert set(EXTRACTORS) == {"Count", "InstanceTable", "ResultsTable", "SMTLib", "CactusPlot",
                               "MatchingPie", "SMTPlot", "VarDepPlot"}
    with pytest.raises(UnknownExtractor):
        get_extractor("Histogram")
