"""Graph instances, their text format, and upper-bound heuristics.

Text format::

    c optional comment
    p <n> <m> <u|d>
    u v        (m lines, 1-based endpoints)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import networkx as nx


class InstanceError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InstanceError(f"edge ({u},{v}) out of range 1..{self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @cached_property
    def adj(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_text(self) -> str:
        lines = [f"p {self.n} {len(self.edges)} u"]
        lines += [f"{u} {v}" for u, v in self.sorted_edges()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.arcs:
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}: it belongs to every feedback set")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InstanceError(f"arc ({u},{v}) out of range 1..{self.n}")
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def to_nx(self, removed=()) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(v for v in range(1, self.n + 1) if v not in removed)
        g.add_edges_from((u, v) for u, v in self.arcs if u not in removed and v not in removed)
        return g

    def is_acyclic_without(self, removed=()) -> bool:
        return nx.is_directed_acyclic_graph(self.to_nx(set(removed)))

    def to_text(self) -> str:
        lines = [f"p {self.n} {len(self.arcs)} d"]
        lines += [f"{u} {v}" for u, v in self.sorted_arcs()]
        return "\n".join(lines) + "\n"


def parse_graph(data: Union[str, bytes]) -> Union[Graph, Digraph]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    header = None
    pairs: list[tuple[int, int]] = []
    seen = set()
    last = 0
    for lineno, raw in enumerate(data.splitlines(), start=1):
        last = lineno
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise InstanceError("duplicate header", lineno)
            if len(parts) != 4 or parts[3] not in ("u", "d"):
                raise InstanceError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[1]), int(parts[2]), parts[3])
            except ValueError:
                raise InstanceError(f"malformed header {line!r}", lineno) from None
            continue
        if header is None:
            raise InstanceError("edge before header", lineno)
        if len(parts) != 2:
            raise InstanceError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceError(f"non-integer endpoint in {line!r}", lineno) from None
        n, _, kind = header
        if not (1 <= u <= n and 1 <= v <= n):
            raise InstanceError(f"endpoint out of range 1..{n}", lineno)
        if u == v:
            raise InstanceError(f"self-loop at vertex {u}", lineno)
        key = (u, v) if kind == "d" else (min(u, v), max(u, v))
        if key in seen:
            raise InstanceError(f"duplicate edge {u} {v}", lineno)
        seen.add(key)
        pairs.append(key)
    if header is None:
        raise InstanceError("missing 'p' header", last or None)
    n, m, kind = header
    if len(pairs) != m:
        raise InstanceError(f"header declares {m} edges, found {len(pairs)}", last)
    if kind == "u":
        return Graph(n, frozenset(pairs))
    return Digraph(n, frozenset(pairs))


# ---------------------------------------------------------------------------
# Upper bounds


def dsatur(g: Graph) -> dict[int, int]:
    """DSATUR coloring (colors from 1).

    Picks the uncolored vertex with the most distinct neighbor colors, ties
    broken by degree and then by lowest index, and gives it the smallest
    color absent from its neighborhood.
    """
    color: dict[int, int] = {}
    sat: list[set[int]] = [set() for _ in range(g.n + 1)]
    uncolored = set(range(1, g.n + 1))
    while uncolored:
        v = min(uncolored, key=lambda u: (-len(sat[u]), -g.degree(u), u))
        c = 1
        while c in sat[v]:
            c += 1
        color[v] = c
        uncolored.discard(v)
        for w in g.adj[v]:
            sat[w].add(c)
    return color


def dsatur_upper_bound(g: Graph) -> int:
    return max(dsatur(g).values(), default=0)


def greedy_fvs(g: Digraph) -> set[int]:
    """Remove a max-degree vertex lying on a cycle until the rest is acyclic."""
    removed: set[int] = set()
    h = g.to_nx()
    while True:
        cyclic = set()
        for comp in nx.strongly_connected_components(h):
            if len(comp) > 1:
                cyclic |= comp
        if not cyclic:
            return removed
        v = min(cyclic, key=lambda u: (-(h.in_degree(u) + h.out_degree(u)), u))
        removed.add(v)
        h.remove_node(v)


def greedy_fvs_upper_bound(g: Digraph) -> int:
    return len(greedy_fvs(g))
