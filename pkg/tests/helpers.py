"""Shared test utilities: paths, solver configs and random script generation."""

import json
import random
import shutil
import sys
from pathlib import Path

from smtquery.smtlib.ast import Script, Sort, app, bool_lit, int_lit, str_lit, var

HERE = Path(__file__).parent
CORPUS = HERE / "fixtures" / "corpus"
MOCK = HERE / "fixtures" / "mock_solver.py"
PISA000 = CORPUS / "pisa" / "pisa" / "pisa-000.smt2"
GHJ = CORPUS / "woorpje" / "track01" / "02_track_1.smt2"
WEQ_EXAMPLE = CORPUS / "woorpje" / "track01" / "01_track_1.smt2"


def corpus_files():
    return sorted(p for p in CORPUS.rglob("*") if p.suffix in (".smt2", ".smt"))


def copy_corpus(dst):
    shutil.copytree(CORPUS, dst)
    return Path(dst)


def mock_line(name, verdict="sat", delay=0.0, table=None, models=True, timeout=None):
    parts = [name, sys.executable, str(MOCK), "--verdict", verdict, "--delay", str(delay)]
    if table:
        parts += ["--table", str(table)]
    parts.append("{file}")
    if models:
        parts.append("model=--models")
    if timeout is not None:
        parts.append(f"timeout={timeout}")
    return " ".join(f"'{p}'" if " " in p else p for p in parts)


def shell_line(name, script, timeout=None):
    """A solver that is just ``sh -c SCRIPT`` (fast start-up, exact delays)."""
    line = f"{name} /bin/sh -c '{script}' {{file}}"
    return line + (f" timeout={timeout}" if timeout is not None else "")


def write_solvers(path, lines):
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_table(path, table):
    path = Path(path)
    path.write_text(json.dumps(table))
    return path


# --- random scripts -----------------------------------------------------------

ALPHABET = 'ab<>"\\ é中z'
STRING_VARS = ("s1", "s2", "s3")
INT_VARS = ("n1", "n2")
BOOL_VARS = ("p1",)


def random_word(rng, max_len=4):
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len)))


def random_string(rng, depth):
    if depth <= 0 or rng.random() < 0.35:
        if rng.random() < 0.6:
            return var(rng.choice(STRING_VARS), Sort.STRING)
        return str_lit(random_word(rng))
    k = rng.randint(0, 5)
    if k <= 1:
        return app("str.++", Sort.STRING, *[random_string(rng, depth - 1)
                                           for _ in range(rng.randint(2, 3))])
    if k == 2:
        return app("str.substr", Sort.STRING, random_string(rng, depth - 1),
                   random_int(rng, depth - 1), random_int(rng, depth - 1))
    if k == 3:
        return app("str.at", Sort.STRING, random_string(rng, depth - 1), random_int(rng, depth - 1))
    if k == 4:
        return app("str.replace", Sort.STRING, *[random_string(rng, depth - 1) for _ in range(3)])
    return app("str.from_int", Sort.STRING, random_int(rng, depth - 1))


def random_int(rng, depth):
    if depth <= 0 or rng.random() < 0.35:
        if rng.random() < 0.5:
            return var(rng.choice(INT_VARS), Sort.INTEGER)
        return int_lit(rng.randint(0, 20))
    k = rng.randint(0, 4)
    if k <= 1:
        return app("str.len", Sort.INTEGER, random_string(rng, depth - 1))
    if k == 2:
        return app(rng.choice(["+", "-"]), Sort.INTEGER,
                   random_int(rng, depth - 1), random_int(rng, depth - 1))
    if k == 3:
        return app("str.indexof", Sort.INTEGER, random_string(rng, depth - 1),
                   random_string(rng, depth - 1), random_int(rng, depth - 1))
    return app("str.to_int", Sort.INTEGER, random_string(rng, depth - 1))


def random_regex(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        k = rng.randint(0, 4)
        if k <= 1:
            return app("str.to_re", Sort.RE, str_lit(random_word(rng)))
        if k == 2:
            a, b = sorted(rng.choice("abcz") for _ in range(2))
            return app("re.range", Sort.RE, str_lit(a), str_lit(b))
        return app(rng.choice(["re.allchar", "re.none", "re.all"]), Sort.RE)
    k = rng.randint(0, 6)
    sub = lambda: random_regex(rng, depth - 1)  # noqa: E731
    if k == 0:
        return app(rng.choice(["re.*", "re.+", "re.opt", "re.comp"]), Sort.RE, sub())
    if k == 1:
        lo = rng.randint(0, 3)
        params = [lo] if rng.random() < 0.3 else [lo, lo + rng.randint(0, 3)]
        return app("re.loop", Sort.RE, sub(), params=params)
    return app(rng.choice(["re.++", "re.union", "re.inter"]), Sort.RE,
               *[sub() for _ in range(rng.randint(2, 3))])


def random_bool(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        k = rng.randint(0, 9)
        if k <= 2:
            return app("=", Sort.BOOL, random_string(rng, 2), random_string(rng, 2))
        if k == 3:
            return app(rng.choice(["<=", "<", ">=", ">", "="]), Sort.BOOL,
                       random_int(rng, 2), random_int(rng, 2))
        if k <= 5:
            return app("str.in_re", Sort.BOOL, random_string(rng, 1), random_regex(rng, 2))
        if k == 6:
            return app(rng.choice(["str.contains", "str.prefixof", "str.suffixof"]), Sort.BOOL,
                       random_string(rng, 1), random_string(rng, 1))
        if k == 7:
            return var(rng.choice(BOOL_VARS), Sort.BOOL)
        return bool_lit(rng.random() < 0.5)
    k = rng.randint(0, 5)
    sub = lambda: random_bool(rng, depth - 1)  # noqa: E731
    if k == 0:
        return app("not", Sort.BOOL, sub())
    if k == 1:
        return app("=>", Sort.BOOL, sub(), sub())
    if k == 2:
        return app("ite", Sort.BOOL, sub(), sub(), sub())
    return app(rng.choice(["and", "or"]), Sort.BOOL, *[sub() for _ in range(rng.randint(2, 3))])


def random_script(rng: random.Random, max_assertions=4) -> Script:
    decls = ([(v, Sort.STRING) for v in STRING_VARS] + [(v, Sort.INTEGER) for v in INT_VARS]
             + [(v, Sort.BOOL) for v in BOOL_VARS])
    assertions = [random_bool(rng, rng.randint(0, 3)) for _ in range(rng.randint(0, max_assertions))]
    return Script("QF_SLIA", decls, assertions, ["(check-sat)"]).renumber()


def random_negation_tree(rng, depth):
    """Boolean tree over atoms p/q with deep runs of ``not``."""
    if depth <= 0 or rng.random() < 0.25:
        return var(rng.choice(["p", "q"]), Sort.BOOL)
    k = rng.randint(0, 3)
    if k <= 1:
        e = random_negation_tree(rng, depth - 1)
        for _ in range(rng.randint(1, 4)):
            e = app("not", Sort.BOOL, e)
        return e
    return app(rng.choice(["and", "or"]), Sort.BOOL,
               random_negation_tree(rng, depth - 1), random_negation_tree(rng, depth - 1))
