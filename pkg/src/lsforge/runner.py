"""Run candidate local searches as isolated child processes.

Protocol: the candidate is started as
``<entry...> <instance-path> <cnf-path> <varmap-path> <soft-timeout>`` and
answers on stdout with signed DIMACS literals (any whitespace) terminated by
a single ``0``.  A bundle directory holds ``instance``, ``formula.cnf`` and
``varmap.json``.
"""

from __future__ import annotations

import json
import logging
import os
import re
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .cnf import Assignment, CnfFormula, write_dimacs
from .encodings.varmap import VarMap

log = logging.getLogger(__name__)

OK = "OK"
SOFT_TIMEOUT_OK = "SOFT_TIMEOUT_OK"
HARD_TIMEOUT = "HARD_TIMEOUT"
RUNTIME_ERROR = "RUNTIME_ERROR"
INVALID_OUTPUT = "INVALID_OUTPUT"

VERIFY_SOFT = 30.0
VERIFY_HARD = 60.0
SOURCE_NAME = "candidate.py"

HARNESS_ENTRY = ("{python}", "-m", "lsforge.harness", "{source}")


def builtin_entry(algo: str, scheme: str | None = None, seed: int = 0) -> tuple[str, ...]:
    entry = ["{python}", "-m", "lsforge.localsearch.candidate", algo, "--seed", str(seed)]
    if scheme:
        entry += ["--scheme", scheme]
    return tuple(entry)


@dataclass
class CandidateSpec:
    id: str
    source: str = ""
    entry: tuple[str, ...] = HARNESS_ENTRY
    origin: str = "base"  # base | refined | builtin
    version: int = 1
    lineage: str | None = None

    def __post_init__(self):
        self.entry = tuple(self.entry)
        if self.origin == "builtin" and self.lineage is not None:
            raise ValueError("builtin candidates have no lineage")
        if self.origin != "builtin" and not 1 <= self.version <= 20:
            raise ValueError(f"version {self.version} outside 1..20")

    def to_dict(self) -> dict:
        return {"id": self.id, "source": self.source, "entry": list(self.entry), "origin": self.origin,
                "version": self.version, "lineage": self.lineage}

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateSpec":
        return cls(d["id"], d.get("source", ""), tuple(d.get("entry", HARNESS_ENTRY)), d.get("origin", "base"),
                   d.get("version", 1), d.get("lineage"))


@dataclass
class RunResult:
    status: str
    wall_time: float
    assignment: Assignment | None = None
    message: str | None = None
    line: int | None = None
    stderr_tail: str = ""

    @property
    def returned(self) -> bool:
        return self.status in (OK, SOFT_TIMEOUT_OK)

    def __post_init__(self):
        if self.returned != (self.assignment is not None):
            raise ValueError(f"{self.status} inconsistent with assignment presence")


@dataclass
class Bundle:
    path: Path
    id: str = ""
    _num_vars: int | None = field(default=None, repr=False)

    def __post_init__(self):
        self.path = Path(self.path)
        if not self.id:
            self.id = self.path.name

    @property
    def instance(self) -> Path:
        return self.path / "instance"

    @property
    def cnf(self) -> Path:
        return self.path / "formula.cnf"

    @property
    def varmap(self) -> Path:
        return self.path / "varmap.json"

    @property
    def num_vars(self) -> int:
        if self._num_vars is None:
            with open(self.cnf) as fh:
                for line in fh:
                    if line.startswith("p"):
                        self._num_vars = int(line.split()[2])
                        break
                else:
                    raise ValueError(f"{self.cnf}: no header")
        return self._num_vars

    def check(self) -> None:
        for p in (self.instance, self.cnf, self.varmap):
            if not p.is_file():
                raise FileNotFoundError(f"bundle file missing: {p}")


def write_bundle(path, instance: bytes, formula: CnfFormula, vm: VarMap, manifest: dict | None = None) -> Bundle:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / "instance").write_bytes(instance)
    (path / "formula.cnf").write_bytes(write_dimacs(formula))
    (path / "varmap.json").write_text(vm.to_json())
    if manifest is not None:
        (path / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return Bundle(path)


# ---------------------------------------------------------------------------
# Output and error parsing

_ERROR_LINE = re.compile(r"^(?:[A-Za-z_][\w.]*(?:Error|Exception|Exit|Interrupt)|Error|Exception)\b\s*(?::\s*(.*))?$")
_FRAME = re.compile(r'File "([^"]+)", line (\d+)')
_ANY_LINE = re.compile(r"\bline (\d+)")


def extract_error_context(raw_stderr: str, returncode: int | None = None,
                          source_name: str | None = SOURCE_NAME) -> tuple[str, int | None]:
    """Last reported error message and, when visible, its source line.

    Frames inside ``source_name`` are preferred for the line number.
    """
    lines = [l.rstrip() for l in (raw_stderr or "").splitlines() if l.strip()]
    if not lines:
        return f"process exited with code {returncode}", None
    message = None
    err_idx = len(lines) - 1
    for i in range(len(lines) - 1, -1, -1):
        m = _ERROR_LINE.match(lines[i].strip())
        if m:
            message = (m.group(1) or lines[i].strip()).strip()
            err_idx = i
            break
    if message is None:
        message = lines[-1].strip()
    # the line belongs to the trace that produced the reported error
    start = 0
    for i in range(err_idx, -1, -1):
        if lines[i].startswith("Traceback") or "During handling" in lines[i] or "direct cause" in lines[i]:
            start = i
            break
    scope = lines[start:err_idx + 1]
    line_no = None
    for l in scope:
        m = _FRAME.search(l)
        if m and (source_name is None or os.path.basename(m.group(1)) == source_name):
            line_no = int(m.group(2))
    if line_no is None:
        for l in scope:
            for m in _ANY_LINE.finditer(l):
                line_no = int(m.group(1))
    return message, line_no


def parse_candidate_output(stdout: str, num_vars: int) -> Assignment:
    """Parse protocol output; raises ``ValueError`` with the rejection reason."""
    tokens = stdout.split()
    if not tokens or tokens[-1] != "0":
        raise ValueError("no terminator")
    out: Assignment = {}
    for tok in tokens[:-1]:
        try:
            lit = int(tok)
        except ValueError:
            raise ValueError(f"non-integer token {tok!r}") from None
        if lit == 0:
            raise ValueError("data after terminator")
        v = abs(lit)
        if v > num_vars:
            raise ValueError(f"literal {lit} out of range 1..{num_vars}")
        if v in out:
            raise ValueError(f"duplicate assignment for var {v}")
        out[v] = lit > 0
    return out


# ---------------------------------------------------------------------------
# Execution


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.kill()
    except ProcessLookupError:
        pass


def _fmt_seconds(x: float) -> str:
    return f"{x:g}"


def run(c: CandidateSpec, bundle: Bundle, soft: float, hard: float | None = None) -> RunResult:
    """Execute ``c`` on ``bundle``; never raises for candidate misbehavior."""
    if hard is None:
        hard = 2 * soft
    if hard < soft:
        raise ValueError("hard limit must be >= soft limit")
    workdir = Path(tempfile.mkdtemp(prefix=f"lsforge-{c.id}-"))
    try:
        source_path = workdir / SOURCE_NAME
        if c.source:
            source_path.write_text(c.source)
        argv = [part.format(python=sys.executable, source=str(source_path)) for part in c.entry]
        argv += [str(bundle.instance.resolve()), str(bundle.cnf.resolve()), str(bundle.varmap.resolve()),
                 _fmt_seconds(soft)]
        proc = None
        start = time.perf_counter()
        for attempt in range(2):
            try:
                proc = subprocess.Popen(argv, cwd=workdir, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                        stdin=subprocess.DEVNULL, text=True, start_new_session=True)
                break
            except OSError as exc:
                if attempt:
                    return RunResult(RUNTIME_ERROR, time.perf_counter() - start,
                                     message=f"cannot start candidate: {exc}")
                log.warning("spawn failed for %s (%s); retrying once", c.id, exc)
        try:
            out, err = proc.communicate(timeout=hard)
        except subprocess.TimeoutExpired:
            _kill_group(proc)
            out, err = proc.communicate()
            return RunResult(HARD_TIMEOUT, time.perf_counter() - start, stderr_tail=_tail(err))
        finally:
            _kill_group(proc)
        wall = time.perf_counter() - start
        if proc.returncode != 0:
            msg, line = extract_error_context(err, proc.returncode)
            return RunResult(RUNTIME_ERROR, wall, message=msg, line=line, stderr_tail=_tail(err))
        try:
            assignment = parse_candidate_output(out, bundle.num_vars)
        except ValueError as exc:
            return RunResult(INVALID_OUTPUT, wall, message=str(exc), stderr_tail=_tail(err))
        status = OK if wall <= soft else SOFT_TIMEOUT_OK
        return RunResult(status, wall, assignment, stderr_tail=_tail(err))
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def _tail(text: str | None, n: int = 20) -> str:
    return "\n".join((text or "").splitlines()[-n:])


def verify(c: CandidateSpec, easy: Bundle, soft: float = VERIFY_SOFT, hard: float = VERIFY_HARD) -> RunResult:
    """Smoke-run a fresh candidate on an easy instance."""
    easy.check()
    return run(c, easy, soft, hard)


class Dispatcher:
    """Runs candidate/bundle pairs on up to ``workers`` concurrent processes."""

    def __init__(self, workers: int = 1):
        self.workers = max(1, workers)

    def run_many(self, jobs: Sequence[tuple[CandidateSpec, Bundle]], soft: float,
                 hard: float | None = None) -> list[RunResult]:
        if self.workers == 1:
            return [run(c, b, soft, hard) for c, b in jobs]
        with ThreadPoolExecutor(self.workers) as pool:
            return list(pool.map(lambda job: run(job[0], job[1], soft, hard), jobs))
