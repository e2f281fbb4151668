"""Searches that exploit the instance behind an encoding."""

from __future__ import annotations

import bisect
from typing import Mapping

from ..cnf import CnfFormula
from ..encodings.bddt import Dataset, encode_bddt
from ..encodings.coloring import coloring_to_assignment, encode_coloring
from ..encodings.graphs import Digraph, Graph, greedy_fvs
from ..encodings.varmap import VarMap
from ..rng import XorShift64Star
from .generic import _Budget, _pick_best, walksat
from .state import SearchOutcome, SearchParams, SearchState, propagate_lenient


def degree_greedy_coloring(g: Graph, k: int) -> dict[int, int]:
    """Visit vertices by decreasing degree; each takes the color that creates
    the fewest monochromatic edges with already-colored neighbors."""
    color: dict[int, int] = {}
    for v in sorted(range(1, g.n + 1), key=lambda u: (-g.degree(u), u)):
        clash = [0] * (k + 1)
        for w in g.adj[v]:
            if w in color:
                clash[color[w]] += 1
        color[v] = min(range(1, k + 1), key=lambda c: (clash[c], c))
    return color


def monochromatic_edges(g: Graph, color: Mapping[int, int]) -> int:
    return sum(1 for u, v in g.edges if color[u] == color[v])


def coloring_native_search(g: Graph, k: int, params: SearchParams, vm: VarMap | None = None) -> SearchOutcome:
    """Min-conflicts on the graph itself, converted to ``x(v, c)`` only at the end.

    Starts from :func:`degree_greedy_coloring`; each move takes a random vertex
    on a monochromatic edge and recolors it to the color with the fewest
    clashes (a random other color with probability ``noise``).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if vm is None:
        vm = encode_coloring(g, k)[1]
    rng = XorShift64Star(params.seed)
    budget = _Budget(params)
    color = degree_greedy_coloring(g, k)
    # clash[v][c]: neighbors of v currently colored c
    clash = [[0] * (k + 1) for _ in range(g.n + 1)]
    for v in range(1, g.n + 1):
        for w in g.adj[v]:
            clash[v][color[w]] += 1
    conflicted: list[int] = []
    pos = [-1] * (g.n + 1)

    def refresh(v):
        bad = clash[v][color[v]] > 0
        if bad and pos[v] < 0:
            pos[v] = len(conflicted)
            conflicted.append(v)
        elif not bad and pos[v] >= 0:
            last = conflicted.pop()
            if last != v:
                conflicted[pos[v]] = last
                pos[last] = pos[v]
            pos[v] = -1

    for v in range(1, g.n + 1):
        refresh(v)
    mono = monochromatic_edges(g, color)
    best, best_color = mono, dict(color)
    moves = 0
    while conflicted and k > 1 and not budget.exhausted(moves):
        v = conflicted[rng.randrange(len(conflicted))]
        old = color[v]
        others = [c for c in range(1, k + 1) if c != old]
        if rng.random() < params.noise:
            new = rng.choice(others)
        else:
            low = min(clash[v][c] for c in others)
            new = rng.choice([c for c in others if clash[v][c] == low])
        mono += clash[v][new] - clash[v][old]
        color[v] = new
        for w in g.adj[v]:
            clash[w][old] -= 1
            clash[w][new] += 1
            refresh(w)
        refresh(v)
        moves += 1
        if mono < best:
            best, best_color = mono, dict(color)
    return SearchOutcome(coloring_to_assignment(best_color, vm), moves, best, budget.elapsed(), best == 0,
                         {"coloring": best_color})


def _transitive_closure(g: Digraph, removed: set[int]) -> set[tuple[int, int]]:
    succ: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
    for u, v in g.arcs:
        if u not in removed and v not in removed:
            succ[u].append(v)
    reach = set()
    for s in range(1, g.n + 1):
        if s in removed:
            continue
        stack, seen = list(succ[s]), set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(succ[v])
        reach |= {(s, v) for v in seen if v != s}
    return reach


def dfvs_degree_search(g: Digraph, k: int, params: SearchParams, vm: VarMap,
                       formula: CnfFormula) -> SearchOutcome:
    """Seed ``del`` with a degree-greedy feedback set and ``r`` with the
    residual closure, fill the counter by propagation, then run WalkSAT."""
    removed = greedy_fvs(g)
    reach = _transitive_closure(g, removed)
    a = {var: v in removed for (v,), var in vm.family("del").items()}
    a.update({var: (u, v) in reach for (u, v), var in vm.family("r").items()})
    a = propagate_lenient(formula, a)
    init = {v: a.get(v, False) for v in range(1, formula.num_vars + 1)}
    out = walksat(formula, params, init=init)
    out.extra["initial_removed"] = len(removed)
    return out


def _median_cut(d: Dataset, f: int, cuts: list[float]) -> int:
    if not cuts:
        return 0
    vals = sorted(r[f - 1] for r in d.rows)
    med = vals[(len(vals) - 1) // 2]
    return min(bisect.bisect_left(cuts, med) + 1, len(cuts))


def bddt_level_search(d: Dataset, depth: int, vm: VarMap, params: SearchParams,
                      formula: CnfFormula | None = None) -> SearchOutcome:
    """Level-by-level repair of a tree-shaped assignment.

    Every internal node starts with a random feature and the median cut,
    leaves take the majority class of the rows reaching them, and the path
    variables are filled by propagation.  The search then works on one tree
    level at a time: it picks a random unsatisfied clause that mentions a node
    variable of the current level and flips the clause variable with the best
    conflict score (recently flipped variables are tabu).  After
    ``stagnation`` flips without a new best it moves to the next level,
    wrapping around to the root.
    """
    if formula is None:
        formula = encode_bddt(d, depth)[0]
    rng = XorShift64Star(params.seed)
    budget = _Budget(params)
    nf, nc = vm.meta["features"], vm.meta["classes"]
    cuts = {int(f): c for f, c in vm.meta["cuts"].items()}

    choice: dict[int, tuple[int, int]] = {}
    for t in range(1, 2**depth):
        f = 1 + rng.randrange(nf)
        choice[t] = (f, _median_cut(d, f, cuts[f]))
    a: dict[int, bool] = {}
    for (t, f), var in vm.family("a").items():
        a[var] = choice[t][0] == f
    for (t, f, j), var in vm.family("s").items():
        a[var] = choice[t] == (f, j)
    votes: dict[int, list[int]] = {l: [0] * nc for l in range(2**depth)}
    for row, y in zip(d.rows, d.labels):
        t = 1
        for _ in range(depth):
            f, j = choice[t]
            left = j == 0 or row[f - 1] <= cuts[f][j - 1]
            t = 2 * t + (0 if left else 1)
        votes[t - 2**depth][y] += 1
    for (l, y), var in vm.family("c").items():
        counts = votes[l]
        a[var] = y == max(range(nc), key=lambda c: (counts[c], -c))
    a = propagate_lenient(formula, a)
    st = SearchState(formula, [False] + [a.get(v, False) for v in range(1, formula.num_vars + 1)])

    # node variables and the path variables of a node sit on the node's level;
    # leaf classes sit on the last internal level
    level_of: dict[int, int] = {}
    for name in ("a", "s"):
        for idx, var in vm.family(name).items():
            level_of[var] = idx[0].bit_length() - 1
    for (_, t), var in vm.family("d").items():
        level_of[var] = t.bit_length() - 1
    for var in vm.family("c").values():
        level_of[var] = depth - 1
    clause_levels = [{level_of[v] for v in vs if v in level_of} for vs in st.clause_vars]

    best, best_a = st.num_unsat, st.assignment()
    level = flips = since_best = level_moves = 0
    last_flip = [-(10**9)] * (formula.num_vars + 1)
    while st.num_unsat and not budget.exhausted(flips):
        if since_best >= max(params.stagnation, 1):
            level = (level + 1) % depth
            level_moves += 1
            since_best = 0
        pool = [ci for ci in st.unsat if level in clause_levels[ci]]
        if not pool:
            level = (level + 1) % depth
            level_moves += 1
            continue
        ci = pool[rng.randrange(len(pool))]
        vars_ = [v for v in st.clause_vars[ci] if flips - last_flip[v] > params.tabu_tenure]
        v, _ = _pick_best(st, vars_ or st.clause_vars[ci], rng)
        st.flip(v)
        last_flip[v] = flips
        flips += 1
        if st.num_unsat < best:
            best, best_a = st.num_unsat, st.assignment()
            since_best = 0
        else:
            since_best += 1
    return SearchOutcome(best_a, flips, best, budget.elapsed(), best == 0, {"level_moves": level_moves})

