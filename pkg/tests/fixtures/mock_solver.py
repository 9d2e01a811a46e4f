#!/usr/bin/env python3
"""Scripted stand-in for an SMT solver.

When every variable used in the assertions is pinned by a top-level
``(= var literal)`` assertion (as in a model-validation script) the instance
is evaluated directly and the true answer printed.  Otherwise the answer
comes from ``--table`` (a JSON object keyed by file name) or the defaults
given on the command line.
"""

import argparse
import json
import re
import sys
import time
from pathlib import Path

from smtquery.smtlib import parse_script
from smtquery.smtlib.ast import BOOL_LIT, INT_LIT, STR_LIT


class Unsupported(Exception):
    pass


def regex(e):
    d, ch = e.decl, e.children
    if d == "str.to_re":
        return re.escape(ground(ch[0], {}))
    if d == "re.++":
        return "".join(f"(?:{regex(c)})" for c in ch)
    if d == "re.union":
        return "|".join(f"(?:{regex(c)})" for c in ch)
    if d in ("re.*", "re.+", "re.opt"):
        suffix = {"re.*": "*", "re.+": "+", "re.opt": "?"}[d]
        return f"(?:{regex(ch[0])}){suffix}"
    if d == "re.range":
        lo, hi = ground(ch[0], {}), ground(ch[1], {})
        if len(lo) != 1 or len(hi) != 1:
            return "(?!)"
        return f"[{re.escape(lo)}-{re.escape(hi)}]"
    if d == "re.allchar":
        return "."
    if d == "re.all":
        return ".*"
    if d == "re.none":
        return "(?!)"
    if d == "re.loop":
        hi = e.params[1] if len(e.params) > 1 else ""
        return f"(?:{regex(ch[0])}){{{e.params[0]},{hi}}}"
    raise Unsupported(d)


def ground(e, env):
    d, ch = e.decl, e.children
    if e.is_variable:
        return env[d]
    if d in (STR_LIT, INT_LIT, BOOL_LIT):
        return e.value
    v = [ground(c, env) for c in ch] if d not in ("ite", "and", "or", "=>", "str.in_re") else None
    if d == "and":
        return all(ground(c, env) for c in ch)
    if d == "or":
        return any(ground(c, env) for c in ch)
    if d == "=>":
        return (not ground(ch[0], env)) or ground(ch[1], env)
    if d == "ite":
        return ground(ch[1], env) if ground(ch[0], env) else ground(ch[2], env)
    if d == "str.in_re":
        return re.fullmatch(regex(ch[1]), ground(ch[0], env), re.S) is not None
    if d == "not":
        return not v[0]
    if d == "=":
        return all(x == v[0] for x in v)
    if d == "distinct":
        return len(set(v)) == len(v)
    ops = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
           ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}
    if d in ops:
        return all(ops[d](a, b) for a, b in zip(v, v[1:]))
    if d == "+":
        return sum(v)
    if d == "-":
        return -v[0] if len(v) == 1 else v[0] - sum(v[1:])
    if d == "*":
        out = 1
        for x in v:
            out *= x
        return out
    if d == "str.++":
        return "".join(v)
    if d == "str.len":
        return len(v[0])
    if d == "str.at":
        return v[0][v[1]] if 0 <= v[1] < len(v[0]) else ""
    if d == "str.substr":
        s, i, n = v
        return s[i:i + n] if 0 <= i < len(s) and n > 0 else ""
    if d == "str.contains":
        return v[1] in v[0]
    if d == "str.prefixof":
        return v[1].startswith(v[0])
    if d == "str.suffixof":
        return v[1].endswith(v[0])
    if d == "str.indexof":
        start = v[2] if len(v) > 2 else 0
        if start < 0 or start > len(v[0]):
            return -1
        return v[0].find(v[1], start)
    if d == "str.replace":
        return v[0].replace(v[1], v[2], 1) if v[1] else v[2] + v[0]
    if d == "str.to_int":
        return int(v[0]) if v[0].isdigit() else -1
    if d == "str.from_int":
        return str(v[0]) if v[0] >= 0 else ""
    raise Unsupported(d)


def pinned(script):
    env = {}
    for a in script.assertions:
        if a.decl == "=" and len(a.children) == 2:
            x, lit = a.children
            if x.is_variable and lit.decl in (STR_LIT, INT_LIT, BOOL_LIT):
                env[x.decl] = lit.value
    used = {n.decl for n in script.nodes() if n.is_variable}
    return env if used <= set(env) else None


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--verdict", default="sat")
    p.add_argument("--delay", type=float, default=0.0)
    p.add_argument("--table")
    p.add_argument("--models", action="store_true")
    p.add_argument("file")
    a = p.parse_args()
    text = Path(a.file).read_text()
    try:
        script = parse_script(text)
    except Exception as exc:
        print(f'(error "{exc}")')
        return 1
    env = pinned(script)
    if env is not None:
        try:
            ok = all(ground(x, env) for x in script.assertions)
            print("sat" if ok else "unsat")
        except (Unsupported, KeyError, TypeError):
            print("unknown")
        return 0
    entry = {}
    if a.table:
        entry = json.loads(Path(a.table).read_text()).get(Path(a.file).name, {})
    if isinstance(entry, str):
        entry = {"verdict": entry}
    verdict = entry.get("verdict", a.verdict)
    delay = entry.get("delay", a.delay)
    model = entry.get("model")
    time.sleep(delay)
    if verdict == "crash":
        print("segmentation fault", file=sys.stderr)
        return 3
    if verdict == "hang":
        time.sleep(3600)
    print(verdict)
    if verdict == "sat" and a.models and model:
        print("(")
        for name, value in model.items():
            sort = script.sort_of(name)
            sort_name = {"STRING": "String", "INTEGER": "Int", "BOOL": "Bool"}.get(
                sort.name if sort else "STRING", "String")
            print(f"  (define-fun {name} () {sort_name} {value})")
        print(")")
    return 0


if __name__ == "__main__":
    sys.exit(main())
