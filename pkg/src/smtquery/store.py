"""Benchmark metadata, solver results and the on-disk AST cache.

The relational part lives in a single SQLite file with five tables
(benchmarks, tracks, instances, results, validation_results).  Parsed and
annotated ASTs are cached next to it, one file per instance.
"""

from __future__ import annotations

import datetime
import enum
import json
import logging
import os
import sqlite3
import struct
import tempfile
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

from smtquery.errors import ForeignKeyViolation, SchemaExists, UnknownDataset
from smtquery.intel import BUILTIN_SPECS, annotate
from smtquery.smtlib import content_hash, parse_script, translate_25_to_26
from smtquery.smtlib.ast import Expr, Kind, Script, Sort

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXTENSIONS = (".smt2", ".smt")
DEFAULT_TRACK = "default"
TRANSLATED_MARK = ".v26"

SCHEMA = """
CREATE TABLE benchmarks (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL UNIQUE
);
CREATE TABLE tracks (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    benchmark_id INTEGER NOT NULL REFERENCES benchmarks(id),
    UNIQUE (benchmark_id, name)
);
CREATE TABLE instances (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    path TEXT NOT NULL,
    track_id INTEGER NOT NULL REFERENCES tracks(id),
    UNIQUE (track_id, name)
);
CREATE TABLE results (
    id INTEGER PRIMARY KEY,
    instance_id INTEGER NOT NULL REFERENCES instances(id),
    solver TEXT NOT NULL,
    result TEXT NOT NULL,
    time REAL NOT NULL,
    model TEXT,
    date TEXT NOT NULL
);
CREATE INDEX results_by_instance ON results (instance_id, solver);
CREATE TABLE validation_results (
    id INTEGER PRIMARY KEY,
    result_id INTEGER NOT NULL UNIQUE REFERENCES results(id),
    result TEXT NOT NULL,
    date TEXT NOT NULL
);
"""
TABLES = ("validation_results", "results", "instances", "tracks", "benchmarks")


class Result(str, enum.Enum):
    SATISFIED = "Satisfied"
    UNSATISFIED = "Unsatisfied"
    UNKNOWN = "Unknown"
    TIMEOUT = "Timeout"
    CRASH = "Crash"

    @property
    def decisive(self):
        return self in (Result.SATISFIED, Result.UNSATISFIED)


class Validation(str, enum.Enum):
    MODEL_VALID = "ModelValid"
    MODEL_INVALID = "ModelInvalid"
    MAJORITY_AGREE = "MajorityAgree"
    MAJORITY_DISAGREE = "MajorityDisagree"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class BenchmarkRec:
    id: int
    name: str


@dataclass(frozen=True)
class TrackRec:
    id: int
    name: str
    benchmark_id: int


@dataclass(frozen=True)
class InstanceRec:
    id: int
    name: str
    path: str
    track_id: int
    benchmark: str = ""
    track: str = ""

    @property
    def label(self):
        return f"{self.benchmark}:{self.track}:{self.name}"


@dataclass
class ResultRec:
    instance_id: int
    solver: str
    result: Result
    time: float
    model: str | None = None
    date: str = ""
    id: int | None = None


@dataclass
class ValidationRec:
    result_id: int
    result: Validation
    date: str = ""
    id: int | None = None


# dataset selector atoms
@dataclass(frozen=True)
class All:
    pass


@dataclass(frozen=True)
class Set:
    name: str


@dataclass(frozen=True)
class SetTrack:
    name: str
    track: str


def now():
    return datetime.datetime.now().isoformat(timespec="microseconds")


def scan_corpus(root) -> list[tuple[str, str, Path]]:
    """List ``(benchmark, track, file)`` triples below ``root``, sorted."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"benchmark root {root} is not a directory")
    found = []
    for bench in sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")):
        for entry in sorted(bench.iterdir()):
            if entry.name.startswith("."):
                continue
            if entry.is_dir():
                for f in sorted(entry.iterdir()):
                    if _is_instance_file(f):
                        found.append((bench.name, entry.name, f))
            elif _is_instance_file(entry):
                found.append((bench.name, DEFAULT_TRACK, entry))
    return found


def _is_instance_file(p: Path):
    return (p.is_file() and p.suffix in EXTENSIONS
            and not p.stem.endswith(TRANSLATED_MARK) and not p.name.startswith("."))


class Store:
    """Handle on the benchmark database and its AST cache."""

    def __init__(self, db_path="data/smtquery.db", cache_dir=None, translate25=False):
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self.cache_dir = Path(cache_dir) if cache_dir else self.db_path.parent / "cache"
        self.translate25 = translate25
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(str(self.db_path), check_same_thread=False)
        self._conn.execute("PRAGMA foreign_keys = ON")
        self.cache_stats = {"hits": 0, "misses": 0, "computed": 0}

    def close(self):
        with self._lock:
            self._conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # --- schema and ingestion ---------------------------------------------

    @property
    def initialized(self) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT count(*) FROM sqlite_master WHERE type='table' AND name='instances'"
            ).fetchone()
        return row[0] == 1

    def init_db(self, root, force=False):
        """Create a fresh schema and register every instance below ``root``."""
        files = scan_corpus(root)
        with self._lock:
            if self.initialized:
                if not force:
                    raise SchemaExists(f"{self.db_path} already holds a database")
                for t in TABLES:
                    self._conn.execute(f"DROP TABLE IF EXISTS {t}")
            self._conn.executescript(SCHEMA)
            self._conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
            self._link(files)
            self._conn.commit()
        return self

    def allocate_new(self, root) -> int:
        """Register files below ``root`` that are not yet known; returns how many."""
        files = scan_corpus(root)
        with self._lock:
            self._check_schema()
            added = self._link(files)
            self._conn.commit()
        return added

    def _check_schema(self):
        if not self.initialized:
            raise sqlite3.OperationalError(f"{self.db_path} is not initialised (run initdb)")
        version = self._conn.execute("PRAGMA user_version").fetchone()[0]
        if version != SCHEMA_VERSION:
            raise sqlite3.OperationalError(
                f"database schema version {version}, expected {SCHEMA_VERSION}")

    def _link(self, files) -> int:
        c = self._conn
        added = 0
        for bench, track, path in files:
            c.execute("INSERT OR IGNORE INTO benchmarks (name) VALUES (?)", (bench,))
            bid = c.execute("SELECT id FROM benchmarks WHERE name = ?", (bench,)).fetchone()[0]
            c.execute("INSERT OR IGNORE INTO tracks (name, benchmark_id) VALUES (?, ?)", (track, bid))
            tid = c.execute("SELECT id FROM tracks WHERE name = ? AND benchmark_id = ?",
                            (track, bid)).fetchone()[0]
            if self.translate25:
                path = self._translated_copy(path)
            cur = c.execute("INSERT OR IGNORE INTO instances (name, path, track_id) VALUES (?, ?, ?)",
                            (path.name if not self.translate25 else _original_name(path),
                             str(path.resolve()), tid))
            added += cur.rowcount
        return added

    @staticmethod
    def _translated_copy(path: Path) -> Path:
        target = path.with_name(path.stem + TRANSLATED_MARK + path.suffix)
        text = path.read_text(encoding="utf-8")
        converted = translate_25_to_26(text)
        if not target.exists() or target.read_text(encoding="utf-8") != converted:
            target.write_text(converted, encoding="utf-8")
        return target

    # --- lookups -----------------------------------------------------------

    _INSTANCE_SELECT = """
        SELECT i.id, i.name, i.path, i.track_id, b.name, t.name
        FROM instances i JOIN tracks t ON i.track_id = t.id
        JOIN benchmarks b ON t.benchmark_id = b.id
    """
    _ORDER = " ORDER BY b.name, t.name, i.name"

    def benchmarks(self) -> list[BenchmarkRec]:
        with self._lock:
            rows = self._conn.execute("SELECT id, name FROM benchmarks ORDER BY name").fetchall()
        return [BenchmarkRec(*r) for r in rows]

    def tracks(self) -> list[TrackRec]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT t.id, t.name, t.benchmark_id FROM tracks t "
                "JOIN benchmarks b ON t.benchmark_id = b.id ORDER BY b.name, t.name").fetchall()
        return [TrackRec(*r) for r in rows]

    def instances(self) -> list[InstanceRec]:
        with self._lock:
            rows = self._conn.execute(self._INSTANCE_SELECT + self._ORDER).fetchall()
        return [InstanceRec(*r) for r in rows]

    def instance(self, instance_id) -> InstanceRec | None:
        with self._lock:
            row = self._conn.execute(self._INSTANCE_SELECT + " WHERE i.id = ?",
                                     (instance_id,)).fetchone()
        return InstanceRec(*row) if row else None

    def find_instance(self, benchmark, track, name) -> InstanceRec | None:
        with self._lock:
            row = self._conn.execute(
                self._INSTANCE_SELECT + " WHERE b.name = ? AND t.name = ? AND i.name = ?",
                (benchmark, track, name)).fetchone()
        return InstanceRec(*row) if row else None

    def select_instances(self, selector) -> list[InstanceRec]:
        """Resolve a dataset selector (a list of All/Set/SetTrack atoms)."""
        chosen = {}
        with self._lock:
            for atom in selector:
                if isinstance(atom, All):
                    rows = self._conn.execute(self._INSTANCE_SELECT).fetchall()
                elif isinstance(atom, Set):
                    if not self._conn.execute("SELECT 1 FROM benchmarks WHERE name = ?",
                                              (atom.name,)).fetchone():
                        raise UnknownDataset(f"unknown benchmark set {atom.name!r}")
                    rows = self._conn.execute(self._INSTANCE_SELECT + " WHERE b.name = ?",
                                              (atom.name,)).fetchall()
                elif isinstance(atom, SetTrack):
                    if not self._conn.execute(
                            "SELECT 1 FROM tracks t JOIN benchmarks b ON t.benchmark_id = b.id "
                            "WHERE b.name = ? AND t.name = ?", (atom.name, atom.track)).fetchone():
                        raise UnknownDataset(f"unknown track {atom.name}:{atom.track}")
                    rows = self._conn.execute(
                        self._INSTANCE_SELECT + " WHERE b.name = ? AND t.name = ?",
                        (atom.name, atom.track)).fetchall()
                else:
                    raise TypeError(f"not a dataset atom: {atom!r}")
                for r in rows:
                    chosen[r[0]] = InstanceRec(*r)
        return sorted(chosen.values(), key=lambda i: (i.benchmark, i.track, i.name))

    @staticmethod
    def read_source(inst: InstanceRec) -> bytes:
        return Path(inst.path).read_bytes()

    # --- results -----------------------------------------------------------

    def put_result(self, r: ResultRec) -> int:
        date = r.date or now()
        with self._lock:
            try:
                cur = self._conn.execute(
                    "INSERT INTO results (instance_id, solver, result, time, model, date) "
                    "VALUES (?, ?, ?, ?, ?, ?)",
                    (r.instance_id, r.solver, Result(r.result).value, float(r.time), r.model, date))
            except sqlite3.IntegrityError as exc:
                raise ForeignKeyViolation(f"no instance with id {r.instance_id}") from exc
            self._conn.commit()
        r.id, r.date = cur.lastrowid, date
        return r.id

    def get_results(self, instance_id, solver) -> list[ResultRec]:
        """All runs of ``solver`` on the instance, newest first."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT instance_id, solver, result, time, model, date, id FROM results "
                "WHERE instance_id = ? AND solver = ? COLLATE NOCASE ORDER BY id DESC",
                (instance_id, solver)).fetchall()
        return [ResultRec(r[0], r[1], Result(r[2]), r[3], r[4], r[5], r[6]) for r in rows]

    def newest_result(self, instance_id, solver) -> ResultRec | None:
        rows = self.get_results(instance_id, solver)
        return rows[0] if rows else None

    def solver_names(self) -> list[str]:
        """Distinct solver names that have recorded results."""
        with self._lock:
            rows = self._conn.execute("SELECT DISTINCT solver FROM results ORDER BY solver").fetchall()
        return [r[0] for r in rows]

    def put_validation(self, result_id, verdict: Validation) -> int:
        """Insert or replace the validation verdict of one result row."""
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO validation_results (result_id, result, date) VALUES (?, ?, ?) "
                    "ON CONFLICT(result_id) DO UPDATE SET result = excluded.result, "
                    "date = excluded.date",
                    (result_id, Validation(verdict).value, now()))
            except sqlite3.IntegrityError as exc:
                raise ForeignKeyViolation(f"no result with id {result_id}") from exc
            self._conn.commit()
            row = self._conn.execute("SELECT id FROM validation_results WHERE result_id = ?",
                                     (result_id,)).fetchone()
        return row[0]

    def get_validation(self, result_id) -> ValidationRec | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT result_id, result, date, id FROM validation_results WHERE result_id = ?",
                (result_id,)).fetchone()
        return ValidationRec(row[0], Validation(row[1]), row[2], row[3]) if row else None

    def dump(self) -> dict:
        """Table contents keyed by names instead of ids (for comparisons)."""
        with self._lock:
            c = self._conn
            out = {
                "benchmarks": sorted(r[0] for r in c.execute("SELECT name FROM benchmarks")),
                "tracks": sorted(c.execute(
                    "SELECT b.name, t.name FROM tracks t JOIN benchmarks b "
                    "ON t.benchmark_id = b.id").fetchall()),
                "instances": sorted(c.execute(
                    "SELECT b.name, t.name, i.name, i.path FROM instances i "
                    "JOIN tracks t ON i.track_id = t.id "
                    "JOIN benchmarks b ON t.benchmark_id = b.id").fetchall()),
                "results": sorted(c.execute(
                    "SELECT b.name, t.name, i.name, r.solver, r.result, r.time, "
                    "coalesce(r.model, '') FROM results r "
                    "JOIN instances i ON r.instance_id = i.id JOIN tracks t ON i.track_id = t.id "
                    "JOIN benchmarks b ON t.benchmark_id = b.id").fetchall()),
                "validation_results": sorted(c.execute(
                    "SELECT b.name, t.name, i.name, r.solver, v.result FROM validation_results v "
                    "JOIN results r ON v.result_id = r.id JOIN instances i ON r.instance_id = i.id "
                    "JOIN tracks t ON i.track_id = t.id "
                    "JOIN benchmarks b ON t.benchmark_id = b.id").fetchall()),
            }
        return out

    # --- AST cache ---------------------------------------------------------

    def cache_path(self, inst: InstanceRec) -> Path:
        return self.cache_dir / f"{inst.id}.ast"

    def load_ast(self, inst: InstanceRec, specs=BUILTIN_SPECS) -> Script:
        """Parsed, annotated script for ``inst``, reusing the cache when valid."""
        source = self.read_source(inst)
        digest = content_hash(source)
        cached = read_cache_file(self.cache_path(inst))
        have = {}
        if cached is not None and cached[0]["source_hash"] == digest:
            manifest, script = cached
            have = dict(manifest["intel"])
            missing = [s for s in specs if have.get(s.name) != s.version]
            if not missing:
                self.cache_stats["hits"] += 1
                return script
        else:
            script = parse_script(source, translate25=self.translate25)
            missing = list(specs)
        self.cache_stats["misses"] += 1
        for spec in missing:
            _drop_intel(script, spec.name)
            annotate(script, spec, force=True)
            have[spec.name] = spec.version
            self.cache_stats["computed"] += 1
        write_cache_file(self.cache_path(inst), script, digest, have)
        return script

    def load_script(self, inst: InstanceRec) -> Script:
        """Fresh parse without touching the cache."""
        return parse_script(self.read_source(inst), translate25=self.translate25)


def _original_name(path: Path) -> str:
    return path.stem[: -len(TRANSLATED_MARK)] + path.suffix


def _drop_intel(script: Script, name: str):
    for node in script.nodes():
        for k in [k for k in node.intel if k[0] == name]:
            del node.intel[k]


# --- cache file format ------------------------------------------------------
#
# MAGIC | u16 format version | u32 manifest length | manifest JSON | zlib(body JSON)
# The body holds the script with its nodes flattened in post-order.

CACHE_MAGIC = b"SMTQAST\x00"
CACHE_FORMAT = 1


def _intel_manifest(script: Script) -> dict:
    keys = {}
    for a in script.assertions:
        keys.update(a.intel)
    return {name: version for name, version in keys}


def encode_script(script: Script, source_hash: str, intel_versions=None) -> bytes:
    nodes, index = [], {}
    roots = []
    for a in script.assertions:
        for node in a.postorder():
            index[id(node)] = len(nodes)
            nodes.append([
                node.id, node.kind.value, node.decl, node.sort.value, node.params, node.value,
                [index[id(c)] for c in node.children],
                {f"{k[0]}@{k[1]}": v for k, v in node.intel.items()},
            ])
        roots.append(index[id(a)])
    body = {
        "logic": script.logic,
        "declarations": [[n, s.value] for n, s in script.declarations],
        "trailing": script.trailing,
        "nodes": nodes,
        "roots": roots,
    }
    if intel_versions is None:
        intel_versions = _intel_manifest(script)
    manifest = json.dumps({"source_hash": source_hash, "intel": intel_versions},
                          sort_keys=True).encode()
    return (CACHE_MAGIC + struct.pack(">HI", CACHE_FORMAT, len(manifest)) + manifest
            + zlib.compress(json.dumps(body, separators=(",", ":")).encode()))


def decode_script(blob: bytes):
    """Return ``(manifest, script)`` or ``None`` for unreadable/outdated blobs."""
    head = len(CACHE_MAGIC)
    if not blob.startswith(CACHE_MAGIC) or len(blob) < head + 6:
        return None
    fmt, mlen = struct.unpack(">HI", blob[head:head + 6])
    if fmt != CACHE_FORMAT:
        return None
    try:
        manifest = json.loads(blob[head + 6:head + 6 + mlen])
        body = json.loads(zlib.decompress(blob[head + 6 + mlen:]))
    except (ValueError, zlib.error):
        return None
    built = []
    for nid, kind, decl, sort, params, value, children, intel in body["nodes"]:
        built.append(Expr(
            nid, Kind(kind), decl, Sort(sort), params, [built[c] for c in children],
            {tuple(_split_key(k)): v for k, v in intel.items()}, value,
        ))
    script = Script(
        body["logic"],
        [(n, Sort(s)) for n, s in body["declarations"]],
        [built[r] for r in body["roots"]],
        body["trailing"],
    )
    return manifest, script


def _split_key(k):
    name, _, version = k.rpartition("@")
    return name, int(version)


def read_cache_file(path: Path):
    try:
        blob = path.read_bytes()
    except OSError:
        return None
    return decode_script(blob)


def write_cache_file(path: Path, script: Script, source_hash: str, intel_versions=None):
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = encode_script(script, source_hash, intel_versions)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
