"""Ranking of local-search candidates and the derived report metrics."""

from __future__ import annotations

import json
import math
import threading
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .runner import INVALID_OUTPUT, OK, RUNTIME_ERROR, SOFT_TIMEOUT_OK

BETTER, WORSE, NO_CHANGE = "BETTER", "WORSE", "NO_CHANGE"
SIGNIFICANCE = 0.10
ZERO_FLOOR = 0.5

METRICS = ("wall", "work")


@dataclass
class InstanceResult:
    candidate: str
    instance: str
    ls_status: str
    ls_time: float
    sat_status: str | None = None  # SAT | UNSAT | TIMEOUT | ERROR, None when skipped
    sat_time: float | None = None
    sat_work: int | None = None
    message: str | None = None

    def __post_init__(self):
        if self.sat_status is not None and not self.returned:
            raise ValueError("solver result without a local-search assignment")
        self.ls_time = round(float(self.ls_time), 2)
        if self.sat_time is not None:
            self.sat_time = round(float(self.sat_time), 2)

    @property
    def returned(self) -> bool:
        return self.ls_status in (OK, SOFT_TIMEOUT_OK)

    @property
    def errored(self) -> bool:
        return self.ls_status in (RUNTIME_ERROR, INVALID_OUTPUT)

    @property
    def sat_ok(self) -> bool:
        return self.sat_status in ("SAT", "UNSAT")

    def cost(self, metric: str = "wall") -> float | None:
        if not self.sat_ok:
            return None
        return float(self.sat_work) if metric == "work" else self.sat_time

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceResult":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__})


@dataclass
class EvalRecord:
    candidate: str
    results: list[InstanceResult] = field(default_factory=list)
    metric: str = "wall"

    @property
    def instances(self) -> frozenset[str]:
        return frozenset(r.instance for r in self.results)

    @property
    def had_runtime_error(self) -> bool:
        return any(r.errored for r in self.results)

    @property
    def ls_timeouts(self) -> int:
        return sum(1 for r in self.results if not r.returned and not r.errored)

    @property
    def sat_timeouts(self) -> int:
        return sum(1 for r in self.results if r.returned and not r.sat_ok)

    @property
    def avg_ok_runtime(self) -> float | None:
        costs = [r.cost(self.metric) for r in self.results if r.sat_ok]
        return sum(costs) / len(costs) if costs else None

    def rank_key(self) -> "RankKey":
        avg = self.avg_ok_runtime
        return RankKey(int(self.had_runtime_error), self.ls_timeouts, self.sat_timeouts,
                       math.inf if avg is None else avg, self.candidate)

    def summary(self) -> dict:
        return {"candidate": self.candidate, "had_runtime_error": self.had_runtime_error,
                "ls_timeouts": self.ls_timeouts, "sat_timeouts": self.sat_timeouts,
                "avg_ok_runtime": None if self.avg_ok_runtime is None else round(self.avg_ok_runtime, 2),
                "metric": self.metric}


class RankKey(NamedTuple):
    tier: int  # 1 = caused a runtime error
    ls_timeouts: int
    sat_timeouts: int
    avg_ok_runtime: float
    candidate: str


def rank(records: Sequence[EvalRecord]) -> list[EvalRecord]:
    """Errored candidates last; the rest by LS timeouts, solver timeouts and
    mean solver runtime, lower first; candidate id breaks ties."""
    if records:
        base = records[0].instances
        for r in records[1:]:
            if r.instances != base:
                raise ValueError(f"record {r.candidate} covers a different instance set")
    return sorted(records, key=EvalRecord.rank_key)


def relative_score(times: Mapping[str, float | None]) -> dict[str, float]:
    """Fastest time divided by each candidate's time; ``None`` (timeout or no
    assignment) scores 0."""
    valid = {c: Fraction(t) for c, t in times.items() if t is not None}
    if not valid:
        return {c: 0.0 for c in times}
    best = min(valid.values())
    out = {}
    for c in times:
        t = valid.get(c)
        if t is None:
            out[c] = 0.0
        elif t == best:
            out[c] = 1.0
        else:
            out[c] = float(best / t)
    return out


def mean_relative_scores(per_instance: Mapping[str, Mapping[str, float | None]]) -> dict[str, float]:
    """Average :func:`relative_score` over instances (missing entries count 0)."""
    totals: dict[str, float] = {}
    cands = sorted({c for times in per_instance.values() for c in times})
    for times in per_instance.values():
        scores = relative_score({c: times.get(c) for c in cands})
        for c, s in scores.items():
            totals[c] = totals.get(c, 0.0) + s
    n = len(per_instance)
    return {c: totals.get(c, 0.0) / n for c in cands} if n else {}


def significance(prev_avg: float, new_avg: float, floor: float = ZERO_FLOOR) -> str:
    """A change counts only when the relative difference exceeds 10%."""
    if prev_avg == 0:
        return WORSE if new_avg > floor else NO_CHANGE
    change = (new_avg - prev_avg) / prev_avg
    if change < -SIGNIFICANCE:
        return BETTER
    if change > SIGNIFICANCE:
        return WORSE
    return NO_CHANGE


def compare_records(prev: EvalRecord, new: EvalRecord) -> str:
    """Refinement verdict: errors, then timeout counts, then the 10% rule."""
    if new.had_runtime_error != prev.had_runtime_error:
        return WORSE if new.had_runtime_error else BETTER
    a = (prev.ls_timeouts, prev.sat_timeouts)
    b = (new.ls_timeouts, new.sat_timeouts)
    if a != b:
        return BETTER if b < a else WORSE
    pa, na = prev.avg_ok_runtime, new.avg_ok_runtime
    if pa is None and na is None:
        return NO_CHANGE
    if pa is None:
        return BETTER
    if na is None:
        return WORSE
    return significance(pa, na)


class Split(NamedTuple):
    train: list[str]
    test: list[str]
    discarded: list[str]


def split_train_test(outcomes: Mapping[str, tuple[bool, float]], train_min: float = 10.0,
                     train_max: float = 60.0) -> Split:
    """``outcomes`` maps instance -> (solved, runtime) for the solver alone."""
    train, test, discarded = [], [], []
    for inst in sorted(outcomes):
        solved, t = outcomes[inst]
        if not solved or t > train_max:
            test.append(inst)
        elif t >= train_min:
            train.append(inst)
        else:
            discarded.append(inst)
    return Split(train, test, discarded)


def solved_new(record: EvalRecord, baseline_solved: Iterable[str]) -> tuple[int, int]:
    solved = {r.instance for r in record.results if r.sat_status == "SAT"}
    return len(solved), len(solved - set(baseline_solved))


def solved_new_report(records: Sequence[EvalRecord], baseline: Mapping[str, str]) -> list[dict]:
    """Rows ``{candidate, solved, new}``; ``baseline`` maps instance -> solver-alone status."""
    base_solved = {i for i, st in baseline.items() if st == "SAT"}
    rows = [{"candidate": "SAT", "solved": len(base_solved), "new": None}]
    for rec in records:
        s, n = solved_new(rec, base_solved)
        rows.append({"candidate": rec.candidate, "solved": s, "new": n})
    return rows


# ---------------------------------------------------------------------------
# Persistence


class ResultStore:
    """Append-only JSON-lines file of :class:`InstanceResult`, one per
    candidate x instance pair; later lines win."""

    def __init__(self, path):
        self.path = Path(path)
        self._cache: dict[tuple[str, str], InstanceResult] | None = None
        self._lock = threading.RLock()

    def load(self) -> dict[tuple[str, str], InstanceResult]:
        with self._lock:
            return self._load()

    def _load(self) -> dict[tuple[str, str], InstanceResult]:
        if self._cache is None:
            self._cache = {}
            if self.path.exists():
                for line in self.path.read_text().splitlines():
                    if line.strip():
                        r = InstanceResult.from_dict(json.loads(line))
                        self._cache[r.candidate, r.instance] = r
        return self._cache

    def get(self, candidate: str, instance: str) -> InstanceResult | None:
        return self.load().get((candidate, instance))

    def add(self, r: InstanceResult) -> None:
        with self._lock:
            self._load()[r.candidate, r.instance] = r
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as fh:
                fh.write(r.to_json() + "\n")

    def record(self, candidate: str, instances: Iterable[str], metric: str = "wall") -> EvalRecord:
        data = self.load()
        return EvalRecord(candidate, [data[candidate, i] for i in instances if (candidate, i) in data], metric)
