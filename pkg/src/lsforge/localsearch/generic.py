"""Encoding-agnostic local searches over a CNF formula."""

from __future__ import annotations

import time
from typing import Mapping

from ..cnf import CnfFormula
from ..encodings.varmap import VarMap
from ..rng import XorShift64Star
from .state import SearchOutcome, SearchParams, SearchState, initial_values


def _pick_best(st: SearchState, candidates, rng: XorShift64Star) -> tuple[int, int]:
    best_score = None
    ties: list[int] = []
    for v in candidates:
        s = st.score(v)
        if best_score is None or s > best_score:
            best_score, ties = s, [v]
        elif s == best_score:
            ties.append(v)
    return (ties[0] if len(ties) == 1 else rng.choice(ties)), best_score


class _Budget:
    def __init__(self, params: SearchParams):
        self.start = time.monotonic()
        self.deadline = self.start + params.soft_timeout
        self.max_flips = params.max_flips

    def exhausted(self, flips: int) -> bool:
        if self.max_flips is not None and flips >= self.max_flips:
            return True
        return time.monotonic() >= self.deadline

    def elapsed(self) -> float:
        return time.monotonic() - self.start


def walksat(formula: CnfFormula, params: SearchParams, init: Mapping[int, bool] | None = None) -> SearchOutcome:
    """Pick a random unsatisfied clause; with probability ``noise`` flip a random
    variable of it, otherwise the one with the highest conflict score."""
    rng = XorShift64Star(params.seed)
    budget = _Budget(params)
    st = SearchState(formula, initial_values(formula.num_vars, rng, init))
    best, best_a = st.num_unsat, st.assignment()
    flips = 0
    while st.num_unsat and not budget.exhausted(flips):
        ci = st.unsat[rng.randrange(st.num_unsat)]
        vars_ = st.clause_vars[ci]
        if rng.random() < params.noise:
            v = rng.choice(vars_)
        else:
            v, _ = _pick_best(st, vars_, rng)
        st.flip(v)
        flips += 1
        if st.num_unsat < best:
            best, best_a = st.num_unsat, st.assignment()
    return SearchOutcome(best_a, flips, best, budget.elapsed(), best == 0)


def gsat(formula: CnfFormula, params: SearchParams, init: Mapping[int, bool] | None = None) -> SearchOutcome:
    """Flip the globally best variable each step; restart from a random
    assignment after ``stagnation`` flips without a new best."""
    rng = XorShift64Star(params.seed)
    budget = _Budget(params)
    n = formula.num_vars
    st = SearchState(formula, initial_values(n, rng, init))
    neighbors: list[set[int] | None] = [None] * (n + 1)

    def nbrs(v):
        if neighbors[v] is None:
            neighbors[v] = {u for ci, _, _ in st.occ[v] for u in st.clause_vars[ci]}
        return neighbors[v]

    scores = [0] + [st.score(v) for v in range(1, n + 1)]
    best, best_a = st.num_unsat, st.assignment()
    flips = restarts = since_best = 0
    while st.num_unsat and n and not budget.exhausted(flips):
        top = max(scores[1:])
        ties = [v for v in range(1, n + 1) if scores[v] == top]
        v = ties[0] if len(ties) == 1 else rng.choice(ties)
        st.flip(v)
        flips += 1
        for u in nbrs(v):
            scores[u] = st.score(u)
        if st.num_unsat < best:
            best, best_a = st.num_unsat, st.assignment()
            since_best = 0
        else:
            since_best += 1
            if params.stagnation and since_best >= params.stagnation:
                st = SearchState(formula, initial_values(n, rng))
                scores = [0] + [st.score(u) for u in range(1, n + 1)]
                restarts += 1
                since_best = 0
    return SearchOutcome(best_a, flips, best, budget.elapsed(), best == 0, {"restarts": restarts})


def tabu_sampled(formula: CnfFormula, params: SearchParams, vm: VarMap | None = None,
                 init: Mapping[int, bool] | None = None) -> SearchOutcome:
    """Tabu search over small random samples of variables.

    Each iteration scores ``sample_size`` non-tabu variables and flips the best
    one, then forbids it for ``tabu_tenure`` iterations.  After ``stagnation``
    iterations without a new best the sample is replaced by the non-tabu
    variables whose flips improved the score most often so far.  When ``vm``
    is given, only its registered variables are sampled.
    """
    rng = XorShift64Star(params.seed)
    budget = _Budget(params)
    n = formula.num_vars
    st = SearchState(formula, initial_values(n, rng, init))
    pool = sorted(v for _, _, v in vm.items()) if vm is not None else list(range(1, n + 1))
    tabu_until = [0] * (n + 1)
    improved = [0] * (n + 1)
    best, best_a = st.num_unsat, st.assignment()
    flips = since_best = biased_steps = 0
    it = 0
    while st.num_unsat and pool and not budget.exhausted(flips):
        it += 1
        if since_best >= params.stagnation:
            free = [v for v in pool if tabu_until[v] <= it]
            keyed = sorted(free, key=lambda v: (-improved[v], rng.next_u64()))
            cands = keyed[: params.sample_size]
            biased_steps += 1
        else:
            draw = rng.sample(pool, params.sample_size + params.tabu_tenure)
            cands = [v for v in draw if tabu_until[v] <= it][: params.sample_size]
        if not cands:
            cands = rng.sample(pool, params.sample_size)
        v, score = _pick_best(st, cands, rng)
        st.flip(v)
        flips += 1
        tabu_until[v] = it + params.tabu_tenure + 1
        if score > 0:
            improved[v] += 1
        if st.num_unsat < best:
            best, best_a = st.num_unsat, st.assignment()
            since_best = 0
        else:
            since_best += 1
    return SearchOutcome(best_a, flips, best, budget.elapsed(), best == 0, {"biased_steps": biased_steps})
