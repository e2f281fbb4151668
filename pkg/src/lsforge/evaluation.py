"""Score candidates: local search, then the phase-seeded solver."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import runner as rn
from .cnf import CnfFormula, complete_assignment, read_dimacs
from .runner import Bundle, CandidateSpec
from .scoring import EvalRecord, InstanceResult, ResultStore
from .solver import SolverAdapter, SolverError, make_adapter, solve_with_phases

log = logging.getLogger(__name__)

SAT_ERROR = "ERROR"


@dataclass
class Limits:
    soft: float
    hard: float
    sat: float

    def __post_init__(self):
        if self.hard < self.soft:
            raise ValueError(f"hard limit {self.hard} below soft limit {self.soft}")
        if min(self.soft, self.sat) <= 0:
            raise ValueError("limits must be positive")


TRAIN_LIMITS = Limits(60.0, 120.0, 120.0)
TEST_LIMITS = Limits(900.0, 1800.0, 3600.0)


class Evaluator:
    """Runs candidates over a fixed set of bundles.

    ``metric`` selects what ``avg_ok_runtime`` averages: ``"wall"`` seconds or
    the solver's deterministic ``work`` counter (requires an adapter that
    reports stats).  With a ``store``, pairs already recorded are not rerun.
    """

    def __init__(self, bundles: Sequence[Bundle], limits: Limits, adapter: SolverAdapter | str | None = None,
                 metric: str = "wall", workers: int = 1, store: ResultStore | None = None):
        self.bundles = list(bundles)
        self.limits = limits
        self.adapter = make_adapter(adapter) if isinstance(adapter, str) else (adapter or make_adapter("mini"))
        if metric not in ("wall", "work"):
            raise ValueError(f"unknown metric {metric!r}")
        if metric == "work" and not self.adapter.reports_stats:
            raise ValueError(f"adapter {self.adapter.name} reports no work counter")
        self.metric = metric
        self.workers = max(1, workers)
        self.store = store
        self._formulas: dict[str, CnfFormula] = {}

    @property
    def instance_ids(self) -> list[str]:
        return [b.id for b in self.bundles]

    def formula(self, b: Bundle) -> CnfFormula:
        if b.id not in self._formulas:
            self._formulas[b.id] = read_dimacs(b.cnf)
        return self._formulas[b.id]

    def evaluate_pair(self, c: CandidateSpec, b: Bundle) -> InstanceResult:
        ls = rn.run(c, b, self.limits.soft, self.limits.hard)
        if not ls.returned:
            return InstanceResult(c.id, b.id, ls.status, ls.wall_time, message=ls.message)
        f = self.formula(b)
        phases = complete_assignment(f, ls.assignment)
        try:
            out = solve_with_phases(f, phases, self.limits.sat, self.adapter)
        except SolverError as exc:
            log.error("solver failed on %s/%s: %s", c.id, b.id, exc)
            return InstanceResult(c.id, b.id, ls.status, ls.wall_time, SAT_ERROR, message=str(exc))
        return InstanceResult(c.id, b.id, ls.status, ls.wall_time, out.status, out.runtime,
                              out.stats.get("work"))

    def evaluate(self, c: CandidateSpec) -> EvalRecord:
        return self.evaluate_many([c])[0]

    def evaluate_many(self, cands: Sequence[CandidateSpec]) -> list[EvalRecord]:
        todo = []
        for c in cands:
            for b in self.bundles:
                if self.store is None or self.store.get(c.id, b.id) is None:
                    todo.append((c, b))
        fresh: dict[tuple[str, str], InstanceResult] = {}
        if self.workers == 1:
            results = [self.evaluate_pair(c, b) for c, b in todo]
        else:
            with ThreadPoolExecutor(self.workers) as pool:
                results = list(pool.map(lambda job: self.evaluate_pair(*job), todo))
        for r in results:
            fresh[r.candidate, r.instance] = r
            if self.store is not None:
                self.store.add(r)
        records = []
        for c in cands:
            rows = []
            for b in self.bundles:
                r = fresh.get((c.id, b.id)) or self.store.get(c.id, b.id)
                rows.append(r)
            records.append(EvalRecord(c.id, rows, self.metric))
        return records

    def solver_alone(self, b: Bundle, timeout: float | None = None):
        """Reference run: all phases false, as a solver without hints would start."""
        f = self.formula(b)
        return solve_with_phases(f, complete_assignment(f, {}), timeout or self.limits.sat, self.adapter)
