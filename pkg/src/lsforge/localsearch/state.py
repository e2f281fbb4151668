from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..cnf import Assignment, CnfFormula, lit_value
from ..rng import XorShift64Star


@dataclass
class SearchParams:
    seed: int = 0
    soft_timeout: float = 10.0
    noise: float = 0.5
    sample_size: int = 20
    tabu_tenure: int = 10
    max_flips: int | None = None
    # non-improving flips before a search changes mode (restart, level, pool)
    stagnation: int = 200

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must lie in [0, 1]")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.tabu_tenure < 0 or self.stagnation < 0:
            raise ValueError("tabu_tenure and stagnation must be >= 0")


@dataclass
class SearchOutcome:
    assignment: Assignment
    flips: int
    best_unsat: int
    elapsed: float
    found_model: bool
    extra: dict = field(default_factory=dict)


class SearchState:
    """Total assignment with per-clause true-literal counters.

    ``flip`` and ``score`` touch only the clauses containing the variable, so
    the unsatisfied-clause set never has to be rebuilt from scratch.
    Duplicate literals and tautologies are counted as written.
    """

    def __init__(self, formula: CnfFormula, values: Sequence[bool]):
        n, m = formula.num_vars, len(formula.clauses)
        self.formula = formula
        self.val = [False] + [bool(values[v]) for v in range(1, n + 1)]
        # occ[v]: (clause, #positive occurrences, #negative occurrences)
        self.occ: list[list[tuple[int, int, int]]] = [[] for _ in range(n + 1)]
        self.clause_vars: list[list[int]] = []
        for ci, clause in enumerate(formula.clauses):
            counts: dict[int, list[int]] = {}
            for lit in clause:
                counts.setdefault(abs(lit), [0, 0])[lit < 0] += 1
            for v, (pos, neg) in counts.items():
                self.occ[v].append((ci, pos, neg))
            self.clause_vars.append(list(counts))
        self.true_count = [0] * m
        self.unsat: list[int] = []
        self._pos = [-1] * m
        for ci, clause in enumerate(formula.clauses):
            tc = sum(1 for lit in clause if (lit > 0) == self.val[abs(lit)])
            self.true_count[ci] = tc
            if tc == 0:
                self._add(ci)

    @classmethod
    def from_assignment(cls, formula: CnfFormula, a: Mapping[int, bool]) -> "SearchState":
        return cls(formula, [False] + [a.get(v, False) for v in range(1, formula.num_vars + 1)])

    def _add(self, ci: int) -> None:
        self._pos[ci] = len(self.unsat)
        self.unsat.append(ci)

    def _remove(self, ci: int) -> None:
        i = self._pos[ci]
        last = self.unsat.pop()
        if last != ci:
            self.unsat[i] = last
            self._pos[last] = i
        self._pos[ci] = -1

    @property
    def num_unsat(self) -> int:
        return len(self.unsat)

    def make_break(self, v: int) -> tuple[int, int]:
        cur = self.val[v]
        make = brk = 0
        tc = self.true_count
        for ci, pos, neg in self.occ[v]:
            before = tc[ci]
            after = before - pos + neg if cur else before - neg + pos
            if before == 0:
                if after > 0:
                    make += 1
            elif after == 0:
                brk += 1
        return make, brk

    def score(self, v: int) -> int:
        make, brk = self.make_break(v)
        return make - brk

    def flip(self, v: int) -> None:
        cur = self.val[v]
        self.val[v] = not cur
        tc = self.true_count
        for ci, pos, neg in self.occ[v]:
            before = tc[ci]
            after = before - pos + neg if cur else before - neg + pos
            tc[ci] = after
            if before == 0 and after > 0:
                self._remove(ci)
            elif before > 0 and after == 0:
                self._add(ci)

    def assignment(self) -> Assignment:
        return {v: self.val[v] for v in range(1, len(self.val))}

    def recount_unsat(self) -> int:
        """From-scratch unsat count; used to audit the incremental bookkeeping."""
        a = self.val
        return sum(1 for c in self.formula.clauses if not any((l > 0) == a[abs(l)] for l in c))


def initial_values(n: int, rng: XorShift64Star, init: Mapping[int, bool] | None = None) -> list[bool]:
    """Random values for every variable, overridden by ``init`` where given."""
    vals = [False] + [rng.randbool() for _ in range(n)]
    for v, b in (init or {}).items():
        vals[v] = bool(b)
    return vals


def propagate_lenient(formula: CnfFormula, a: Mapping[int, bool]) -> Assignment:
    """Unit propagation that skips falsified clauses instead of stopping.

    Used to fill implied variables after the decision variables are set,
    even when the decision variables do not yet form a model.
    """
    out = dict(a)
    occ = formula.occurrences
    queue = list(range(len(formula.clauses)))
    queued = [True] * len(queue)
    while queue:
        ci = queue.pop()
        queued[ci] = False
        open_lits = set()
        for lit in formula.clauses[ci]:
            val = lit_value(lit, out)
            if val:
                break
            if val is None:
                open_lits.add(lit)
        else:
            if len(open_lits) == 1:
                (unit,) = open_lits
                out[abs(unit)] = unit > 0
                for cj in occ[abs(unit)]:
                    if not queued[cj]:
                        queued[cj] = True
                        queue.append(cj)
    return out
