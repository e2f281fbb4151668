"""Brute-force reference implementations, independent of the package code."""

from __future__ import annotations

import itertools
import random
from typing import Sequence


def all_assignments(n: int):
    for bits in itertools.product((False, True), repeat=n):
        yield {v + 1: bits[v] for v in range(n)}


def satisfies(clauses, a) -> bool:
    return all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses)


def unsat_count(clauses, a) -> int:
    return sum(1 for c in clauses if not any(a[abs(l)] == (l > 0) for l in c))


def brute_sat(num_vars: int, clauses) -> bool:
    return any(satisfies(clauses, a) for a in all_assignments(num_vars))


def colorable(n: int, edges, k: int) -> bool:
    if n == 0:
        return True
    for cols in itertools.product(range(k), repeat=n):
        if all(cols[u - 1] != cols[v - 1] for u, v in edges):
            return True
    return False


def has_cycle(n: int, arcs, removed) -> bool:
    succ = {v: [] for v in range(1, n + 1)}
    for u, v in arcs:
        if u not in removed and v not in removed:
            succ[u].append(v)
    state = {}

    def dfs(u):
        state[u] = 1
        for w in succ[u]:
            if state.get(w) == 1 or (w not in state and dfs(w)):
                return True
        state[u] = 2
        return False

    return any(v not in removed and v not in state and dfs(v) for v in range(1, n + 1))


def min_fvs(n: int, arcs) -> int:
    for size in range(n + 1):
        for sub in itertools.combinations(range(1, n + 1), size):
            if not has_cycle(n, arcs, set(sub)):
                return size
    return n


def tree_exists(rows: Sequence[Sequence[float]], labels: Sequence[int], depth: int) -> bool:
    """Exact classifier of depth <= ``depth`` with axis-aligned ``<=`` splits."""
    idx = list(range(len(rows)))

    def ok(ids, d):
        if len({labels[i] for i in ids}) <= 1:
            return True
        if d == 0:
            return False
        for f in range(len(rows[0])):
            vals = sorted({rows[i][f] for i in ids})
            for a, b in zip(vals, vals[1:]):
                thr = (a + b) / 2
                left = [i for i in ids if rows[i][f] <= thr]
                right = [i for i in ids if rows[i][f] > thr]
                if ok(left, d - 1) and ok(right, d - 1):
                    return True
        return False

    return ok(idx, depth)


def random_formula(rng: random.Random, n: int, m: int, kmax: int = 3):
    clauses = []
    for _ in range(m):
        width = rng.randint(1, kmax)
        vs = rng.sample(range(1, n + 1), min(width, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses


def planted_3cnf(rng: random.Random, n: int, ratio: float):
    """Random 3-CNF with every clause satisfied by a hidden model."""
    model = {v: rng.random() < 0.5 for v in range(1, n + 1)}
    clauses = []
    while len(clauses) < round(ratio * n):
        vs = rng.sample(range(1, n + 1), 3)
        c = tuple(v if rng.random() < 0.5 else -v for v in vs)
        if any(model[abs(l)] == (l > 0) for l in c):
            clauses.append(c)
    return clauses, model


def projected_models(clauses, n: int, total: int) -> set[tuple[bool, ...]]:
    """Assignments of vars 1..n that extend to a model over vars 1..total."""
    out = set()
    for head in itertools.product((False, True), repeat=n):
        fixed = {v + 1: head[v] for v in range(n)}
        rest = [c for c in clauses if not any(abs(l) <= n and fixed[abs(l)] == (l > 0) for l in c)]
        rest = [tuple(l for l in c if abs(l) > n) for c in rest]
        if any(not c for c in rest):
            continue
        for tail in itertools.product((False, True), repeat=total - n):
            a = {n + 1 + i: tail[i] for i in range(total - n)}
            if all(any(a[abs(l)] == (l > 0) for l in c) for c in rest):
                out.add(head)
                break
    return out
