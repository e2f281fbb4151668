"""Clause-directed random walk with a best-score move most of the time."""
import random
import time

SEED = 7
NOISE = 0.35
MAX_FLIPS = 20000


def local_search(instance, formula, varmap, timeout):
    start = time.monotonic()
    rng = random.Random(SEED)
    n = formula.num_vars
    clauses = formula.clauses
    occ = [[] for _ in range(n + 1)]
    for ci, cl in enumerate(clauses):
        for lit in cl:
            occ[abs(lit)].append(ci)
    val = [False] + [rng.random() < 0.5 for _ in range(n)]

    def sat(cl):
        return any((lit > 0) == val[abs(lit)] for lit in cl)

    def breaks(v):
        val[v] = not val[v]
        b = sum(1 for ci in occ[v] if not sat(clauses[ci]))
        val[v] = not val[v]
        return b

    unsat = {ci for ci, cl in enumerate(clauses) if not sat(cl)}
    for step in range(MAX_FLIPS):
        if not unsat or time.monotonic() - start > 0.8 * timeout:
            break
        ci = sorted(unsat)[rng.randrange(len(unsat))]
        cl = clauses[ci]
        if rng.random() < NOISE:
            v = abs(cl[rng.randrange(len(cl))])
        else:
            v = min((abs(l) for l in cl), key=lambda u: (breaks(u), u))
        val[v] = not val[v]
        for cj in occ[v]:
            if sat(clauses[cj]):
                unsat.discard(cj)
            else:
                unsat.add(cj)
    return {v: val[v] for v in range(1, n + 1)}
