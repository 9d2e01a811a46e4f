"""Extractors: turn the matches of a query into text, tables and files."""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from tabulate import tabulate

from smtquery.errors import UnknownExtractor
from smtquery.intel import variable_counts
from smtquery.smtlib import print_script
from smtquery.smtlib.ast import BOOL_LIT, GENERIC, INT_LIT, STR_LIT, Script
from smtquery.smtlib.printer import print_expr
from smtquery.store import Result

PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6",
    "#bfef45", "#fabed4", "#469990", "#dcbeff", "#9a6324", "#800000", "#aaffc3",
    "#808000", "#ffd8b1", "#000075", "#a9a9a9",
)


@dataclass
class QueryResult:
    """Matched instances (with their possibly transformed scripts) of one query."""

    matched: list = field(default_factory=list)  # (InstanceRec, Script) pairs
    universe_size: int = 0
    per_benchmark: dict = field(default_factory=dict)  # name -> (matched, total)

    @property
    def count(self):
        return len(self.matched)


@dataclass
class ExtractEnv:
    outdir: Path = Path("output")
    solvers: list = field(default_factory=list)
    # (instance, solver) -> newest ResultRec or None
    results: Callable = lambda inst, solver: None
    render: bool = False


@dataclass
class Extracted:
    text: str = ""
    files: list = field(default_factory=list)


# --- count --------------------------------------------------------------------

def format_percentage(m: int, n: int) -> str:
    """100*m/n cut (not rounded) to two decimals, computed exactly."""
    if n <= 0:
        return "0.00"
    hundredths = (10000 * m) // n
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def count_lines(m: int, n: int, per_benchmark=None) -> list[str]:
    lines = [f"Total matching instances: {m} of {n} within the selected set "
             f"({format_percentage(m, n)}%)"]
    for name in sorted(per_benchmark or {}):
        mb, nb = per_benchmark[name]
        lines.append(f"{name}: {mb} of {nb}")
    return lines


def extract_count(r: QueryResult, env: ExtractEnv) -> Extracted:
    return Extracted("\n".join(count_lines(r.count, r.universe_size, r.per_benchmark)))


# --- tables -------------------------------------------------------------------

def instance_rows(r: QueryResult, env: ExtractEnv):
    rows = []
    for inst, _ in r.matched:
        row = [inst.label]
        for s in env.solvers:
            res = env.results(inst, s)
            row += [res.result.value, res.time] if res else ["", ""]
        rows.append(row)
    return rows


def instance_table(rows, solvers) -> str:
    headers = ["Instance"]
    for s in solvers:
        headers += [f"Result {s}", f"Time {s}"]
    return tabulate(rows, headers=headers, floatfmt="", disable_numparse=[0] if rows else False)


def extract_instance_table(r: QueryResult, env: ExtractEnv) -> Extracted:
    return Extracted(instance_table(instance_rows(r, env), env.solvers))


RESULT_ROWS = (
    ("SAT", Result.SATISFIED), ("UNSAT", Result.UNSATISFIED), ("Unknown", Result.UNKNOWN),
    ("Timeout", Result.TIMEOUT), ("Crash", Result.CRASH),
)


def results_summary(outcomes: dict) -> dict:
    """solver -> row name -> value, from solver -> list of ResultRec."""
    summary = {}
    for s, recs in outcomes.items():
        col = {name: sum(1 for x in recs if x.result is res) for name, res in RESULT_ROWS}
        col["Time w/o Timeout"] = sum(x.time for x in recs if x.result is not Result.TIMEOUT)
        col["Total Time"] = sum(x.time for x in recs)
        summary[s] = col
    return summary


def results_table(summary: dict, solvers) -> str:
    names = [n for n, _ in RESULT_ROWS] + ["Time w/o Timeout", "Total Time"]
    rows = [[n] + [summary[s][n] for s in solvers] for n in names]
    return tabulate(rows, headers=[""] + list(solvers))


def extract_results_table(r: QueryResult, env: ExtractEnv) -> Extracted:
    outcomes = {s: [x for x in (env.results(i, s) for i, _ in r.matched) if x] for s in env.solvers}
    return Extracted(results_table(results_summary(outcomes), env.solvers))


# --- files --------------------------------------------------------------------

def instance_dir(outdir, inst) -> Path:
    return Path(outdir) / inst.benchmark / inst.track


def extract_smtlib(r: QueryResult, env: ExtractEnv) -> Extracted:
    written = []
    Path(env.outdir).mkdir(parents=True, exist_ok=True)
    for inst, script in r.matched:
        path = instance_dir(env.outdir, inst) / inst.name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(print_script(script), encoding="utf-8")
        written.append(path)
    return Extracted(f"Wrote {len(written)} file(s) to {env.outdir}", written)


def cactus_rows(times: dict) -> list[tuple]:
    """(solver, index, cumulative time) from solver -> solved-case times."""
    rows = []
    for s in times:
        total = 0.0
        for i, t in enumerate(sorted(times[s]), 1):
            total += t
            rows.append((s, i, total))
    return rows


def solved_times(r: QueryResult, env: ExtractEnv) -> dict:
    out = {}
    for s in env.solvers:
        recs = (env.results(i, s) for i, _ in r.matched)
        out[s] = [x.time for x in recs if x is not None and x.result.decisive]
    return out


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def extract_cactus(r: QueryResult, env: ExtractEnv) -> Extracted:
    times = solved_times(r, env)
    rows = cactus_rows(times)
    files = [write_csv(Path(env.outdir) / "cactus.csv", ["solver", "index", "cumulative"], rows)]
    if env.render:
        files.append(render_cactus(rows, list(times), Path(env.outdir) / "cactus.png"))
    return Extracted(f"Cactus data written to {files[0]}", files)


def extract_matching_pie(r: QueryResult, env: ExtractEnv) -> Extracted:
    m, n = r.count, r.universe_size
    path = write_csv(Path(env.outdir) / "matching_pie.csv", ["slice", "count"],
                     [("matching", m), ("not matching", n - m)])
    files = [path]
    if env.render:
        files.append(render_pie(m, n - m, Path(env.outdir) / "matching_pie.png"))
    return Extracted(f"{m} of {n} instances match; data written to {path}", files)


# --- graphs -------------------------------------------------------------------

def _dot_id(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def node_label(e) -> str:
    if e.is_variable:
        return e.decl
    if e.decl in (STR_LIT, INT_LIT, BOOL_LIT) or (e.decl == GENERIC and not e.children):
        return print_expr(e)
    head = e.value if e.decl == GENERIC else e.decl
    return f"{head} {' '.join(map(str, e.params))}" if e.params else head


def subtree_hashes(script: Script) -> dict:
    """Python id of every node -> digest of its structure (ignores ids and intel)."""
    digests = {}
    for a in script.assertions:
        for n in a.postorder():
            h = hashlib.sha1()
            h.update(repr((n.kind.value, n.decl, n.sort.value, tuple(n.params), n.value)).encode())
            for c in n.children:
                h.update(digests[id(c)].encode())
            digests[id(n)] = h.hexdigest()
    return digests


def smt_dot(script: Script, title="instance") -> str:
    """Graphviz description of the assertion trees.

    Repeated subtrees of more than one node share a fill colour.
    """
    digests = subtree_hashes(script)
    occurrences = {}
    for a in script.assertions:
        for n in a.walk():
            if n.children:
                occurrences[digests[id(n)]] = occurrences.get(digests[id(n)], 0) + 1
    colours = {}
    for d in sorted(d for d, k in occurrences.items() if k > 1):
        colours[d] = PALETTE[len(colours) % len(PALETTE)]
    lines = [f"digraph {_dot_id(title)} {{", "  node [shape=box];"]
    edges = []
    for i, a in enumerate(script.assertions, 1):
        lines.append(f'  r{i} [label="assert {i}", shape=ellipse];')
        edges.append(f"  r{i} -> n{a.id};")
        for n in a.walk():
            attrs = [f"label={_dot_id(node_label(n))}"]
            colour = colours.get(digests[id(n)])
            if colour:
                attrs += ["style=filled", f'fillcolor="{colour}"']
            lines.append(f"  n{n.id} [{', '.join(attrs)}];")
            for c in n.children:
                edges.append(f"  n{n.id} -> n{c.id};")
    return "\n".join(lines + edges + ["}"]) + "\n"


def vardep_edges(script: Script) -> list[tuple[str, str]]:
    """(variable, assertion label) pairs, assertions numbered a1, a2, ..."""
    edges = []
    for i, a in enumerate(script.assertions, 1):
        counts = variable_counts(Script(script.logic, script.declarations, [a]))
        for name, _ in script.declarations:
            if name in counts:
                edges.append((name, f"a{i}"))
    return edges


def vardep_dot(script: Script, title="instance") -> str:
    lines = [f"graph {_dot_id(title)} {{", "  rankdir=TB;",
             "  { rank=same;"]
    lines += [f"    {_dot_id(n)} [shape=ellipse];" for n, _ in script.declarations]
    lines += ["  }", "  { rank=same;"]
    lines += [f"    a{i} [shape=box];" for i in range(1, len(script.assertions) + 1)]
    lines.append("  }")
    lines += [f"  {_dot_id(v)} -- {a};" for v, a in vardep_edges(script)]
    return "\n".join(lines + ["}"]) + "\n"


def _write_graphs(r, env, render_fn, suffix):
    files = []
    for inst, script in r.matched:
        path = instance_dir(env.outdir, inst) / (inst.name + suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_fn(script, inst.label), encoding="utf-8")
        files.append(path)
    return files


def extract_smt_plot(r: QueryResult, env: ExtractEnv) -> Extracted:
    files = _write_graphs(r, env, smt_dot, ".dot")
    return Extracted(f"Wrote {len(files)} tree graph(s) to {env.outdir}", files)


def extract_vardep_plot(r: QueryResult, env: ExtractEnv) -> Extracted:
    files = _write_graphs(r, env, vardep_dot, ".vardep.dot")
    return Extracted(f"Wrote {len(files)} dependency graph(s) to {env.outdir}", files)


# --- optional rendering -------------------------------------------------------

def _pyplot():
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # optional dependency
        raise RuntimeError("rendering needs matplotlib (pip install smtquery[plot])") from exc
    return plt


def render_cactus(rows, solvers, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for s in solvers:
        pts = [(i, t) for name, i, t in rows if name == s]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", label=s)
    ax.set_xlabel("solved instances")
    ax.set_ylabel("cumulative time (s)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def render_pie(matching, rest, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4, 4))
    if matching + rest:
        ax.pie([matching, rest], labels=["matching", "not matching"], autopct="%1.1f%%")
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


EXTRACTORS = {
    "Count": extract_count,
    "InstanceTable": extract_instance_table,
    "ResultsTable": extract_results_table,
    "SMTLib": extract_smtlib,
    "CactusPlot": extract_cactus,
    "MatchingPie": extract_matching_pie,
    "SMTPlot": extract_smt_plot,
    "VarDepPlot": extract_vardep_plot,
}

DESCRIPTIONS = {
    "Count": "number of matching instances and their distribution",
    "InstanceTable": "per-instance solver results and times",
    "ResultsTable": "per-solver result counts and time sums",
    "SMTLib": "write the (transformed) instances as SMT-LIB files",
    "CactusPlot": "cumulative solving time per solver",
    "MatchingPie": "matching versus non-matching instances",
    "SMTPlot": "instances as tree diagrams (Graphviz)",
    "VarDepPlot": "variable/assertion dependency graphs (Graphviz)",
}

# extractors that need solver results for every matched instance
NEEDS_RESULTS = frozenset({"InstanceTable", "ResultsTable", "CactusPlot"})


def get_extractor(name: str):
    try:
        return EXTRACTORS[name]
    except KeyError:
        raise UnknownExtractor(f"unknown extractor {name!r}") from None
