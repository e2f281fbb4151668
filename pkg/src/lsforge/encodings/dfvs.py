"""Reachability encoding for directed feedback vertex set.

``del(v)`` is true iff ``v`` is removed; ``r(u, v)`` (``u != v``) states
that ``v`` is reachable from ``u`` in the residual graph.  Residual arcs
force reachability, reachability is transitive, and no residual arc may
close a cycle (``r(v, u)`` is forbidden for a residual arc ``u -> v``).
"""

from __future__ import annotations

from typing import Mapping

from ..cnf import CnfFormula
from .cardinality import encode_atmost_k
from .graphs import Digraph
from .varmap import AUX, VarMap

POLARITY = "del(v)=true means vertex v is deleted"


def encode_dfvs(g: Digraph, k: int) -> tuple[CnfFormula, VarMap]:
    if k < 0:
        raise ValueError("k must be >= 0")
    n = g.n
    vm = VarMap({"n": n, "k": k, "polarity": POLARITY})
    for v in range(1, n + 1):
        vm.new("del", v)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u != v:
                vm.new("r", u, v)
    d, r = vm.families["del"], vm.families.get("r", {})

    clauses: list[list[int]] = []
    for u, v in g.sorted_arcs():
        clauses.append([d[u,], d[v,], r[u, v]])
        clauses.append([d[u,], d[v,], -r[v, u]])
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if v == u:
                continue
            for w in range(1, n + 1):
                if w != u and w != v:
                    clauses.append([-r[u, v], -r[v, w], r[u, w]])

    card, aux = encode_atmost_k([d[v,] for v in range(1, n + 1)], min(k, n), vm.num_vars + 1)
    for (i, j), var in aux.items():
        assert vm.new(AUX, "atmost", i, j) == var
    clauses += card
    return CnfFormula(vm.num_vars, tuple(map(tuple, clauses))), vm


def decode_dfvs(model: Mapping[int, bool], vm: VarMap) -> set[int]:
    return {v for (v,), var in vm.family("del").items() if model.get(var)}
