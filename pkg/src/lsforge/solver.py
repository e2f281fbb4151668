"""Hand local-search assignments to a complete solver as default phases.

Two backends ship: :class:`MiniSolver`, a small deterministic DPLL used for
tests and desk-scale runs, and :class:`ExternalSolver`, which drives any
binary that speaks the SAT-competition output grammar.  A third adapter for
PySAT solvers with native phase support is available when ``python-sat`` is
installed.
"""

from __future__ import annotations

import logging
import os
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .cnf import Assignment, CnfFormula, is_model, write_dimacs

log = logging.getLogger(__name__)

SAT, UNSAT, TIMEOUT = "SAT", "UNSAT", "TIMEOUT"


class SolverError(RuntimeError):
    """Backend could not be run or talked to (distinct from a timeout)."""


class IntegrityError(SolverError):
    """Backend claimed SAT with an assignment that is not a model."""


@dataclass
class SolveOutcome:
    status: str
    runtime: float
    model: Assignment | None = None
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status in (SAT, UNSAT)


# ---------------------------------------------------------------------------
# Mini solver


def mini_solve(formula: CnfFormula, phases: Mapping[int, bool] | None = None,
               timeout: float | None = None) -> SolveOutcome:
    """DPLL with watched-literal unit propagation and chronological backtracking.

    Branches on the lowest-numbered unassigned variable and tries its phase
    first (missing phases default to false).  ``stats`` reports decisions,
    flips (second branches after a conflict), propagations, conflicts and
    ``work = decisions + flips + propagations``, a deterministic effort
    measure.
    """
    start = time.perf_counter()
    deadline = None if timeout is None else start + timeout
    phases = phases or {}
    n = formula.num_vars
    val = [0] * (n + 1)
    stats = {"decisions": 0, "flips": 0, "propagations": 0, "conflicts": 0, "phase_contradictions": 0}

    def done(status, model=None):
        stats["work"] = stats["decisions"] + stats["flips"] + stats["propagations"]
        return SolveOutcome(status, time.perf_counter() - start, model, stats)

    clauses: list[list[int]] = []
    units: list[int] = []
    for c in formula.clauses:
        lits = list(dict.fromkeys(c))
        if any(-l in lits for l in lits):
            continue
        if len(lits) == 1:
            units.append(lits[0])
        else:
            clauses.append(lits)
    watches: dict[int, list[int]] = {}
    for ci, c in enumerate(clauses):
        watches.setdefault(c[0], []).append(ci)
        watches.setdefault(c[1], []).append(ci)

    trail: list[int] = []
    qhead = 0

    def value(lit):
        v = val[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def assign(lit):
        val[abs(lit)] = 1 if lit > 0 else -1
        trail.append(lit)

    def propagate() -> bool:
        """Returns False on conflict."""
        nonlocal qhead
        while qhead < len(trail):
            false_lit = -trail[qhead]
            qhead += 1
            ws = watches.get(false_lit)
            if not ws:
                continue
            kept = []
            for pos, ci in enumerate(ws):
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if value(c[0]) == 1:
                    kept.append(ci)
                    continue
                for m in range(2, len(c)):
                    if value(c[m]) != -1:
                        c[1], c[m] = c[m], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    kept.append(ci)
                    if value(c[0]) == -1:
                        kept.extend(ws[pos + 1:])
                        watches[false_lit] = kept
                        return False
                    assign(c[0])
                    stats["propagations"] += 1
            watches[false_lit] = kept
        return True

    for lit in units:
        v = value(lit)
        if v == -1:
            return done(UNSAT)
        if v == 0:
            assign(lit)
            stats["propagations"] += 1
    # levels: (trail index, decision literal, second branch taken)
    levels: list[tuple[int, int, bool]] = []
    ok = propagate()
    next_var = 1
    steps = 0
    while True:
        steps += 1
        if deadline is not None and (steps & 63) == 0 and time.perf_counter() > deadline:
            return done(TIMEOUT)
        if not ok:
            stats["conflicts"] += 1
            while levels:
                idx, lit, flipped = levels.pop()
                for undone in trail[idx:]:
                    val[abs(undone)] = 0
                    next_var = min(next_var, abs(undone))
                del trail[idx:]
                qhead = idx
                if not flipped:
                    levels.append((idx, -lit, True))
                    assign(-lit)
                    stats["flips"] += 1
                    break
            else:
                return done(UNSAT)
            ok = propagate()
            continue
        while next_var <= n and val[next_var] != 0:
            next_var += 1
        if next_var > n:
            model = {v: val[v] == 1 for v in range(1, n + 1)}
            return done(SAT, model)
        phase = phases.get(next_var, False)
        lit = next_var if phase else -next_var
        levels.append((len(trail), lit, False))
        assign(lit)
        stats["decisions"] += 1
        ok = propagate()


# ---------------------------------------------------------------------------
# Adapters


class SolverAdapter:
    name = "abstract"
    phase_hints = False
    reports_stats = False

    def invoke(self, formula: CnfFormula, phases: Mapping[int, bool], timeout: float) -> SolveOutcome:
        raise NotImplementedError


class MiniSolver(SolverAdapter):
    name = "mini"
    phase_hints = True
    reports_stats = True

    def invoke(self, formula, phases, timeout):
        return mini_solve(formula, phases, timeout)


def parse_solver_output(text: str) -> tuple[str | None, list[int]]:
    """Read ``s``/``v`` lines of the competition output format."""
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip().upper()
            status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT, "UNKNOWN": TIMEOUT}.get(word)
            if status is None:
                raise SolverError(f"unparseable status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverError(f"unparseable value token {tok!r}") from None
                if lit:
                    lits.append(lit)
    return status, lits


def write_phase_file(path, phases: Mapping[int, bool]) -> None:
    body = " ".join(str(v if b else -v) for v, b in sorted(phases.items()))
    Path(path).write_text((body + " 0\n") if body else "0\n")


class ExternalSolver(SolverAdapter):
    """Runs a solver binary on a temporary DIMACS file.

    ``args`` may contain ``{cnf}`` and, in ``phase_mode="file"``, ``{phases}``
    placeholders; the phase file uses the candidate-protocol grammar (signed
    literals, whitespace separated, ``0`` terminated).  ``phase_mode="ignore"``
    is the degraded mode: phases are dropped with a warning.
    """

    reports_stats = False

    def __init__(self, executable: str, args: Sequence[str] | None = None, phase_mode: str = "file"):
        if phase_mode not in ("file", "ignore"):
            raise ValueError(f"unknown phase mode {phase_mode!r}")
        if args is None:
            args = ["{cnf}", "{phases}"] if phase_mode == "file" else ["{cnf}"]
        self.executable = executable
        self.args = list(args)
        self.phase_mode = phase_mode
        self.phase_hints = phase_mode == "file"
        self.name = f"external:{Path(executable).name}"
        self._warned = False

    def invoke(self, formula, phases, timeout):
        with tempfile.TemporaryDirectory(prefix="lsforge-solve-") as tmp:
            cnf_path = os.path.join(tmp, "formula.cnf")
            phase_path = os.path.join(tmp, "phases.txt")
            Path(cnf_path).write_bytes(write_dimacs(formula))
            if self.phase_mode == "file":
                write_phase_file(phase_path, phases)
            elif not self._warned:
                log.warning("%s: phase hints are ignored (degraded mode)", self.name)
                self._warned = True
            argv = [self.executable] + [a.format(cnf=cnf_path, phases=phase_path) for a in self.args]
            start = time.perf_counter()
            try:
                proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                        text=True, start_new_session=True)
            except OSError as exc:
                raise SolverError(f"cannot start {self.executable}: {exc}") from exc
            try:
                out, err = proc.communicate(timeout=timeout)
            except subprocess.TimeoutExpired:
                _kill_group(proc)
                proc.communicate()
                return SolveOutcome(TIMEOUT, timeout)
            runtime = time.perf_counter() - start
        if proc.returncode not in (0, 10, 20):
            raise SolverError(f"{self.executable} exited with {proc.returncode}: {err.strip()[-300:]}")
        status, lits = parse_solver_output(out)
        if status is None:
            raise SolverError(f"{self.executable} printed no status line")
        model = None
        if status == SAT:
            model = {v: False for v in range(1, formula.num_vars + 1)}
            for lit in lits:
                if abs(lit) <= formula.num_vars:
                    model[abs(lit)] = lit > 0
        return SolveOutcome(status, runtime, model)


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


class PysatSolver(SolverAdapter):
    """Native phase hints through PySAT's ``set_phases`` (optional dependency)."""

    phase_hints = True
    reports_stats = True

    def __init__(self, solver_name: str = "cadical195"):
        from pysat.solvers import Solver  # fails early if the extra is missing

        self._solver_cls = Solver
        self.solver_name = solver_name
        self.name = f"pysat:{solver_name}"

    def invoke(self, formula, phases, timeout):
        import threading

        start = time.perf_counter()
        with self._solver_cls(name=self.solver_name, bootstrap_with=[list(c) for c in formula.clauses]) as s:
            lits = [v if b else -v for v, b in sorted(phases.items())]
            if lits:
                s.set_phases(lits)
            timer = threading.Timer(timeout, s.interrupt) if timeout else None
            if timer:
                timer.start()
            try:
                res = s.solve_limited(expect_interrupt=True)
            finally:
                if timer:
                    timer.cancel()
            runtime = time.perf_counter() - start
            stats = {k: int(v) for k, v in (s.accum_stats() or {}).items()}
            if res is None:
                return SolveOutcome(TIMEOUT, runtime, stats=stats)
            if not res:
                return SolveOutcome(UNSAT, runtime, stats=stats)
            model = {v: False for v in range(1, formula.num_vars + 1)}
            for lit in s.get_model() or []:
                if abs(lit) <= formula.num_vars:
                    model[abs(lit)] = lit > 0
            return SolveOutcome(SAT, runtime, model, stats)


def make_adapter(spec: str) -> SolverAdapter:
    """``mini``, ``pysat:<name>``, ``external:<path>`` or
    ``external-ignore:<path>`` (phases dropped)."""
    if spec == "mini":
        return MiniSolver()
    kind, _, rest = spec.partition(":")
    if kind == "pysat":
        return PysatSolver(rest or "cadical195")
    if kind in ("external", "external-ignore") and rest:
        parts = rest.split()
        return ExternalSolver(parts[0], parts[1:] or None, "file" if kind == "external" else "ignore")
    raise ValueError(f"unknown adapter spec {spec!r}")


def solve_with_phases(formula: CnfFormula, phases: Mapping[int, bool], timeout: float,
                      adapter: SolverAdapter | None = None) -> SolveOutcome:
    """Run ``adapter`` with total ``phases``; wall-clock time is measured here."""
    adapter = adapter or MiniSolver()
    missing = [v for v in range(1, formula.num_vars + 1) if v not in phases]
    if missing:
        raise ValueError(f"phases must be total; {len(missing)} vars missing (first {missing[0]})")
    start = time.perf_counter()
    out = adapter.invoke(formula, phases, timeout)
    wall = time.perf_counter() - start
    if out.status == TIMEOUT:
        out.runtime = max(wall, out.runtime)
    else:
        out.runtime = wall
    if out.status == SAT and (out.model is None or not is_model(formula, out.model)):
        raise IntegrityError(f"{adapter.name} returned SAT with a non-model")
    return out
