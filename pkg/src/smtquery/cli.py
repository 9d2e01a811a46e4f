"""Command-line entry point: ``smtquery [options] COMMAND [ARGS]``."""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sqlite3
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from smtquery import __version__, extractors, predicates, transforms
from smtquery.errors import ConfigError, SMTQueryError, UnknownDataset
from smtquery.qlang import QueryEngine, repl
from smtquery.solvers import DEFAULT_TIMEOUT, Harness, parse_solver_config
from smtquery.store import Store

log = logging.getLogger("smtquery")

COMMANDS = {
    "initdb": "create a fresh database from the instances under --root",
    "allocateNew": "register instances added under --root since the last scan",
    "updateResults": "run every configured solver on every instance lacking a result",
    "qlang": "evaluate --query, or read queries from standard input",
    "smtsolver": "smtsolver SOLVER SET TRACK FILE: run one solver on one instance",
}

DEFAULTS = {
    "root": "data/smtfiles",
    "db": "data/smtquery.db",
    "cache": None,
    "timeout": DEFAULT_TIMEOUT,
    "jobs": 1,
    "solvers": "solvers.conf",
    "output": "output",
}
CONFIG_KEYS = {"root", "db", "cache", "timeout", "jobs", "solvers", "output"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def catalog_text() -> str:
    def block(title, entries):
        width = max(len(k) for k in entries)
        return [title] + [f"  {k.ljust(width)}  {v}" for k, v in entries.items()]

    preds = {}
    for spec in predicates.CATALOG.values():
        args = {1: "(s)", 2: "(s1, s2)"}.get(spec.arity, "")
        preds[spec.name + args] = spec.doc
    lines = block("commands:", COMMANDS) + [""]
    lines += block("predicates (Where):", preds) + [""]
    lines += block("functions (Apply):", transforms.DESCRIPTIONS) + [""]
    lines += block("extractors (Extract):", extractors.DESCRIPTIONS)
    lines += ["", "example:", "  smtquery qlang --query 'Select Name From * Where (hasWEQ And isQuadratic)'"]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="smtquery",
        description="Analyse, filter and benchmark SMT-LIB string constraint instances.",
        epilog=catalog_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", nargs="?", choices=list(COMMANDS), metavar="COMMAND")
    p.add_argument("args", nargs="*", help=argparse.SUPPRESS)
    p.add_argument("--root", help="benchmark tree (default data/smtfiles)")
    p.add_argument("--db", help="database file (default data/smtquery.db)")
    p.add_argument("--cache", help="AST cache directory (default: next to the database)")
    p.add_argument("--timeout", type=float, help="solver timeout in seconds (default 20)")
    p.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    p.add_argument("--query", help="one-shot qlang query")
    p.add_argument("--force", action="store_true", help="let initdb replace an existing database")
    p.add_argument("--translate25", action="store_true",
                   help="translate SMT-LIB 2.5 instances to 2.6 when ingesting")
    p.add_argument("--solvers", help="solver configuration file (default solvers.conf)")
    p.add_argument("--output", help="root directory for extractor files (default output)")
    p.add_argument("--config", help="settings file (default smtquery.toml if present)")
    p.add_argument("--render", action="store_true", help="also render plots (needs matplotlib)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"smtquery {__version__}")
    return p


def load_settings(ns) -> dict:
    settings = dict(DEFAULTS)
    path = ns.config or ("smtquery.toml" if Path("smtquery.toml").exists() else None)
    if path:
        try:
            data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"{path}: unknown key(s) {', '.join(sorted(unknown))}")
        settings.update(data)
    for k in CONFIG_KEYS:
        v = getattr(ns, k)
        if v is not None:
            settings[k] = v
    settings["timeout"] = float(settings["timeout"])
    settings["jobs"] = max(1, int(settings["jobs"]))
    return settings


def _executable(binary):
    return bool(shutil.which(binary)) or os.access(binary, os.X_OK)


def load_harness(store, settings, strict) -> Harness:
    path = Path(settings["solvers"])
    configs = {}
    if path.exists():
        configs = parse_solver_config(path.read_text(encoding="utf-8"), settings["timeout"], check=strict)
        for name in [n for n, c in configs.items() if not _executable(c.binary)]:
            log.warning("solver %s skipped: %s is not executable", name, configs[name].binary)
            del configs[name]
    elif strict:
        raise ConfigError(f"solver configuration {path} not found")
    return Harness(store, configs, settings["jobs"], settings["timeout"])


def open_store(settings, translate25=False) -> Store:
    return Store(settings["db"], settings["cache"], translate25)


def run(ns, settings) -> int:
    cmd = ns.command
    if cmd != "smtsolver" and ns.args:
        raise UsageError(f"{cmd} takes no positional arguments")
    with open_store(settings, ns.translate25) as store:
        if cmd == "initdb":
            store.init_db(settings["root"], force=ns.force)
            print(f"Initialised {settings['db']}: {len(store.benchmarks())} benchmark(s), "
                  f"{len(store.tracks())} track(s), {len(store.instances())} instance(s)")
        elif cmd == "allocateNew":
            added = store.allocate_new(settings["root"])
            print(f"Linked {added} new instance(s)")
        elif cmd == "updateResults":
            harness = load_harness(store, settings, strict=True)
            n = harness.schedule_runs(store.instances())
            print(f"Recorded {n} new result(s)")
        elif cmd == "qlang":
            harness = load_harness(store, settings, strict=False)
            engine = QueryEngine(store, harness, settings["output"], settings["jobs"], ns.render)
            if ns.query is not None:
                engine.run(ns.query)
            else:
                return repl(engine)
        elif cmd == "smtsolver":
            if len(ns.args) != 4:
                raise UsageError("smtsolver expects SOLVER SET TRACK FILE")
            solver, bench, track, name = ns.args
            harness = load_harness(store, settings, strict=True)
            inst = store.find_instance(bench, track, name)
            if inst is None:
                raise UnknownDataset(f"no instance {bench}:{track}:{name}")
            rec = harness.run_and_record(inst, solver)
            print(f"{inst.label} {rec.solver} {rec.result.value} {rec.time}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return 1
    try:
        ns = parser.parse_intermixed_args(argv)
        if ns.command is None:
            raise UsageError("no command given")
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        settings = load_settings(ns)
        return run(ns, settings)
    except UsageError as exc:
        print(f"smtquery: {exc}\n", file=sys.stderr)
        parser.print_help(sys.stderr)
        return 1
    except (SMTQueryError, sqlite3.Error, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
