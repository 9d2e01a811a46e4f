"""Running external SMT solvers and cross-validating their answers.

Solvers are described in a plain-text configuration file, one solver per
line::

    # name   binary              argument template        options
    CVC5     /usr/bin/cvc5       --lang=smt2 {file}       timeout=20 model=--produce-models
    Z3Seq    /usr/bin/z3         smt.string_solver=seq {file}

Tokens are split shell-style.  ``{file}`` is replaced with the instance path
(appended when absent).  ``timeout=SECONDS`` and ``model=FLAG`` are options,
not arguments; ``model`` names the flag that makes the solver print a model.
"""

from __future__ import annotations

import enum
import logging
import os
import re
import shlex
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from smtquery.errors import (
    ConfigError, ModelParseError, ParseError, SolverUnavailable, SpawnError, UnknownSolver,
)
from smtquery.smtlib import parse_script, parse_term, print_script
from smtquery.smtlib.ast import Sort, app, var
from smtquery.smtlib.reader import Atom, SList, read
from smtquery.store import InstanceRec, Result, ResultRec, Validation

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 20.0
_VERDICTS = {"sat": Result.SATISFIED, "unsat": Result.UNSATISFIED, "unknown": Result.UNKNOWN}


@dataclass
class SolverConfig:
    name: str
    binary: str
    args: list[str] = field(default_factory=lambda: ["{file}"])
    timeout: float = DEFAULT_TIMEOUT
    model_flag: str | None = None

    def command(self, path, with_model=False) -> list[str]:
        args = [a.replace("{file}", str(path)) for a in self.args]
        at = next((i for i, a in enumerate(self.args) if "{file}" in a), None)
        if at is None:
            at = len(args)
            args.append(str(path))
        if with_model and self.model_flag:
            # the flag goes right before the file argument
            args.insert(at, self.model_flag)
        return [self.binary] + args


def parse_solver_config(text: str, default_timeout=DEFAULT_TIMEOUT, check=True) -> dict:
    """Parse the solver configuration format; returns name -> SolverConfig in file order."""
    configs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            tokens = shlex.split(line, comments=True)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
        if len(tokens) < 2:
            raise ConfigError(f"line {lineno}: expected at least a name and a binary")
        name, binary, rest = tokens[0], tokens[1], tokens[2:]
        args, timeout, model_flag = [], default_timeout, None
        for tok in rest:
            if tok.startswith("timeout="):
                try:
                    timeout = float(tok.split("=", 1)[1])
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: bad timeout {tok!r}") from exc
            elif tok.startswith("model="):
                model_flag = tok.split("=", 1)[1] or None
            else:
                args.append(tok)
        if name.lower() in (n.lower() for n in configs):
            raise ConfigError(f"line {lineno}: solver {name} configured twice")
        if check and not (shutil.which(binary) or os.access(binary, os.X_OK)):
            raise ConfigError(f"line {lineno}: solver binary {binary!r} is not executable")
        configs[name] = SolverConfig(name, binary, args or ["{file}"], timeout, model_flag)
    return configs


def load_solver_config(path, default_timeout=DEFAULT_TIMEOUT, check=True) -> dict:
    return parse_solver_config(Path(path).read_text(), default_timeout, check)


@dataclass
class SolverOutcome:
    result: Result
    time: float
    model: str | None = None
    stdout: str = ""
    stderr: str = ""


def parse_output(stdout: str):
    """First verdict token of the solver output and the model text after it."""
    for m in re.finditer(r"[^\s()]+", stdout):
        verdict = _VERDICTS.get(m.group(0))
        if verdict is not None:
            rest = stdout[m.end():].strip()
            return verdict, (rest or None)
    return None, None


def run_solver(cfg: SolverConfig, inst, timeout=None, with_model=True) -> SolverOutcome:
    """Run one solver on one instance file (an InstanceRec or a path)."""
    path = Path(inst.path if isinstance(inst, InstanceRec) else inst)
    timeout = cfg.timeout if timeout is None else timeout
    if with_model and cfg.model_flag:
        text = path.read_text(encoding="utf-8")
        if "get-model" not in text:
            # same file name in a private directory, with a model request appended
            with tempfile.TemporaryDirectory(prefix="smtquery-") as tmp:
                copy = Path(tmp) / path.name
                copy.write_text(text.rstrip() + "\n(get-model)\n", encoding="utf-8")
                return _spawn(cfg.command(copy, with_model), timeout)
    return _spawn(cfg.command(path, with_model), timeout)


def _spawn(cmd, timeout) -> SolverOutcome:
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                stdin=subprocess.DEVNULL, start_new_session=True, text=True)
    except OSError as exc:
        raise SpawnError(f"cannot start {cmd[0]}: {exc}") from exc
    try:
        out, err = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        _kill(proc)
        out, err = proc.communicate()
        return SolverOutcome(Result.TIMEOUT, time.perf_counter() - start, None, out, err)
    except BaseException:
        _kill(proc)
        proc.wait()
        raise
    elapsed = time.perf_counter() - start
    verdict, model = parse_output(out)
    if verdict is None:
        verdict = Result.CRASH if proc.returncode != 0 else Result.UNKNOWN
    if verdict is not Result.SATISFIED:
        model = None
    return SolverOutcome(verdict, elapsed, model, out, err)


def _kill(proc):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


# --- models -------------------------------------------------------------------

def parse_model(text: str | None) -> dict:
    """Bindings ``name -> value source`` from ``(define-fun x () S v)`` output."""
    if not text or not text.strip():
        return {}
    try:
        exprs = read(text)
    except ParseError as exc:
        raise ModelParseError(str(exc)) from exc
    entries = []
    for e in exprs:
        if isinstance(e, SList) and e and isinstance(e[0], Atom) and e[0].value == "model":
            entries.extend(e[1:])
        elif isinstance(e, SList) and e and isinstance(e[0], SList):
            entries.extend(e)
        else:
            entries.append(e)
    bindings = {}
    for e in entries:
        if not (isinstance(e, SList) and len(e) == 5 and isinstance(e[0], Atom)
                and e[0].value == "define-fun" and isinstance(e[1], Atom)
                and isinstance(e[2], SList) and not e[2]):
            raise ModelParseError(f"unexpected model entry: {_source(text, e)}")
        bindings[e[1].value] = _source(text, e[4])
    return bindings


def _source(text, sx):
    if isinstance(sx, Atom):
        return sx.text
    return text[sx.start:sx.end]


def model_script(source: str, model: str | None, translate25=False):
    """The original instance plus one ``(= var value)`` assertion per binding."""
    script = parse_script(source, translate25=translate25)
    declared = dict(script.declarations)
    for name, value in parse_model(model).items():
        if name not in declared:
            continue
        try:
            term = parse_term(value)
        except ParseError as exc:
            raise ModelParseError(f"cannot read value of {name}: {exc}") from exc
        script.assertions.append(app("=", Sort.BOOL, var(name, declared[name]), term))
    if not any(t.strip("() \n").startswith("check-sat") for t in script.trailing):
        script.trailing.append("(check-sat)")
    return script.renumber()


def validate_model(inst, model, validator: SolverConfig, translate25=False, timeout=None) -> bool:
    """Assert the model into the instance and ask ``validator`` whether it stays satisfiable."""
    return _check_model(inst, model, validator, translate25, timeout).result is Result.SATISFIED


def _check_model(inst, model, validator, translate25=False, timeout=None) -> SolverOutcome:
    path = Path(inst.path if isinstance(inst, InstanceRec) else inst)
    script = model_script(path.read_text(encoding="utf-8"), model, translate25)
    fd, tmp = tempfile.mkstemp(suffix=".smt2")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(print_script(script))
        return run_solver(validator, tmp, timeout=timeout, with_model=False)
    finally:
        os.unlink(tmp)


# --- cross-validation ---------------------------------------------------------

class Consensus(str, enum.Enum):
    SAT_VALIDATED = "SatValidated"
    UNSAT_MAJORITY = "UnsatMajority"
    DISAGREEMENT = "Disagreement"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    consensus: Consensus
    witness: tuple | None = None
    # solver -> outcome of the model check, for every SAT answer with a model
    validity: dict = field(default_factory=dict)


def cross_validate(outcomes: dict, validate=None) -> Verdict:
    """Combine the answers of several solvers on one instance.

    ``validate(solver, outcome)`` checks a SAT answer's model.  A validated
    model wins; otherwise UNSAT needs a strict majority of the decisive
    (SAT/UNSAT) answers.
    """
    validity = {}
    witness = None
    for name in sorted(outcomes, key=str.lower):
        o = outcomes[name]
        if o.result is Result.SATISFIED and o.model:
            try:
                ok = bool(validate(name, o)) if validate else False
            except ModelParseError:
                ok = False
            validity[name] = ok
            if ok and witness is None:
                witness = (name, o.model)
    if witness is not None:
        return Verdict(Consensus.SAT_VALIDATED, witness, validity)
    decisive = [o.result for o in outcomes.values() if o.result.decisive]
    if not decisive:
        return Verdict(Consensus.INCONCLUSIVE, None, validity)
    unsat = decisive.count(Result.UNSATISFIED)
    if 2 * unsat > len(decisive):
        return Verdict(Consensus.UNSAT_MAJORITY, None, validity)
    if unsat:
        return Verdict(Consensus.DISAGREEMENT, None, validity)
    return Verdict(Consensus.INCONCLUSIVE, None, validity)


def validation_label(verdict: Verdict, solver: str, outcome) -> Validation:
    """How one solver's answer relates to the combined verdict."""
    c = verdict.consensus
    if outcome.result is Result.SATISFIED:
        if solver in verdict.validity:
            return Validation.MODEL_VALID if verdict.validity[solver] else Validation.MODEL_INVALID
        if c is Consensus.SAT_VALIDATED:
            return Validation.MAJORITY_AGREE
        if c is Consensus.UNSAT_MAJORITY:
            return Validation.MAJORITY_DISAGREE
        return Validation.INCONCLUSIVE
    if outcome.result is Result.UNSATISFIED:
        if c is Consensus.UNSAT_MAJORITY:
            return Validation.MAJORITY_AGREE
        if c is Consensus.SAT_VALIDATED:
            return Validation.MAJORITY_DISAGREE
    return Validation.INCONCLUSIVE


# --- harness ------------------------------------------------------------------

def _stderr_progress(msg):
    print(msg, file=sys.stderr, flush=True)


class Harness:
    """Runs configured solvers against stored instances and records the results."""

    def __init__(self, store, solvers: dict, parallelism=1, timeout=None, progress=_stderr_progress):
        self.store = store
        self.solvers = dict(solvers)
        self.parallelism = max(1, int(parallelism))
        self.timeout = timeout
        self.progress = progress or (lambda msg: None)

    @property
    def names(self) -> list[str]:
        return list(self.solvers)

    def canonical(self, name: str) -> str:
        for n in self.solvers:
            if n.lower() == name.lower():
                return n
        raise UnknownSolver(f"unknown solver {name!r}; configured: {', '.join(self.solvers) or 'none'}")

    def _execute(self, inst, name) -> SolverOutcome:
        try:
            return run_solver(self.solvers[name], inst, timeout=self.timeout)
        except SpawnError as exc:
            log.warning("%s on %s: %s", name, inst.label, exc)
            return SolverOutcome(Result.CRASH, 0.0, None, "", str(exc))

    def _record(self, inst, name, outcome) -> ResultRec:
        rec = ResultRec(inst.id, name, outcome.result, outcome.time,
                        outcome.model if outcome.result is Result.SATISFIED else None)
        self.store.put_result(rec)
        return rec

    def run_and_record(self, inst, name) -> ResultRec:
        """Run one solver now (regardless of stored results) and cross-validate."""
        name = self.canonical(name)
        cfg = self.solvers[name]
        outcome = run_solver(cfg, inst, timeout=self.timeout)
        rec = self._record(inst, name, outcome)
        self.revalidate(inst)
        return rec

    def ensure(self, inst, names, validate=False) -> dict:
        """Newest result per solver, running any that are missing first."""
        names = [self.canonical(n) for n in names]
        missing = [n for n in names if self.store.newest_result(inst.id, n) is None]
        for n in missing:
            if not (shutil.which(self.solvers[n].binary) or os.access(self.solvers[n].binary, os.X_OK)):
                raise SolverUnavailable(f"solver binary for {n} is missing")
        for n in missing:
            self._record(inst, n, self._execute(inst, n))
        if missing or validate:
            self.revalidate(inst)
        return {n: self.store.newest_result(inst.id, n) for n in names}

    def _validator(self, inst, records):
        order = list(self.solvers)

        def validate(claimant, outcome):
            rec = records[claimant]
            known = self.store.get_validation(rec.id) if rec.id is not None else None
            if known and known.result in (Validation.MODEL_VALID, Validation.MODEL_INVALID):
                return known.result is Validation.MODEL_VALID
            i = order.index(claimant)
            for other in order[i + 1:] + order[:i]:
                try:
                    answer = _check_model(inst, outcome.model, self.solvers[other],
                                          self.store.translate25, self.timeout).result
                except SpawnError:
                    continue
                if answer.decisive:
                    return answer is Result.SATISFIED
            return False

        return validate

    def revalidate(self, inst) -> Verdict:
        """Cross-validate the newest results of every solver on ``inst``."""
        records = {}
        for n in self.solvers:
            r = self.store.newest_result(inst.id, n)
            if r is not None:
                records[n] = r
        outcomes = {n: SolverOutcome(r.result, r.time, r.model) for n, r in records.items()}
        if not outcomes:
            return Verdict(Consensus.INCONCLUSIVE)
        verdict = cross_validate(outcomes, self._validator(inst, records))
        for n, r in records.items():
            self.store.put_validation(r.id, validation_label(verdict, n, outcomes[n]))
        return verdict

    def schedule_runs(self, instances, names=None, parallelism=None) -> int:
        """Run every (instance, solver) pair that has no stored result yet."""
        names = [self.canonical(n) for n in (names or self.solvers)]
        jobs = [(inst, n) for inst in instances for n in names
                if self.store.newest_result(inst.id, n) is None]
        if not jobs:
            return 0
        self.progress("Waiting for results ...")
        workers = max(1, int(parallelism or self.parallelism))
        touched = {}
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(self._execute, inst, n): (inst, n) for inst, n in jobs}
            for fut in as_completed(futures):
                inst, n = futures[fut]
                try:
                    outcome = fut.result()
                except Exception as exc:  # never abort the batch
                    log.warning("%s on %s failed: %s", n, inst.label, exc)
                    outcome = SolverOutcome(Result.CRASH, 0.0, None, "", str(exc))
                self._record(inst, n, outcome)
                touched[inst.id] = inst
        for inst in sorted(touched.values(), key=lambda i: i.id):
            self.revalidate(inst)
        return len(jobs)
