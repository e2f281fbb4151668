from __future__ import annotations

from typing import Mapping

from ..cnf import CnfFormula
from .graphs import Graph
from .varmap import VarMap


def encode_coloring(g: Graph, k: int) -> tuple[CnfFormula, VarMap]:
    """Vertex/color grid ``x(v, c)``: one at-least-one clause per vertex and
    one conflict clause per edge and color.  No at-most-one clauses."""
    if k < 1:
        raise ValueError("k must be >= 1")
    vm = VarMap({"n": g.n, "k": k})
    for v in range(1, g.n + 1):
        for c in range(1, k + 1):
            vm.new("x", v, c)
    x = vm.families["x"]
    clauses = [[x[v, c] for c in range(1, k + 1)] for v in range(1, g.n + 1)]
    for u, v in g.sorted_edges():
        for c in range(1, k + 1):
            clauses.append([-x[u, c], -x[v, c]])
    return CnfFormula(vm.num_vars, tuple(map(tuple, clauses))), vm


def decode_coloring(model: Mapping[int, bool], vm: VarMap) -> dict[int, int]:
    n, k = vm.meta["n"], vm.meta["k"]
    out = {}
    for v in range(1, n + 1):
        for c in range(1, k + 1):
            if model.get(vm.var("x", v, c)):
                out[v] = c
                break
        else:
            raise ValueError(f"vertex {v} has no color set")
    return out


def is_proper_coloring(g: Graph, coloring: Mapping[int, int], k: int | None = None) -> bool:
    if set(coloring) != set(range(1, g.n + 1)):
        return False
    if k is not None and any(not 1 <= c <= k for c in coloring.values()):
        return False
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def coloring_to_assignment(coloring: Mapping[int, int], vm: VarMap) -> dict[int, bool]:
    """Exactly ``x(v, color[v])`` true, every other grid variable false."""
    return {var: coloring.get(v) == c for (v, c), var in vm.family("x").items()}
