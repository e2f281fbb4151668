"""Encoding schemes: instance text in, CNF plus variable map out."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping

from ..cnf import CnfFormula
from .bddt import Dataset, decode_bddt, encode_bddt, greedy_depth_upper_bound, is_exact, parse_dataset, tree_depth
from .cardinality import encode_atmost_k
from .coloring import decode_coloring, encode_coloring, is_proper_coloring
from .dfvs import decode_dfvs, encode_dfvs
from .graphs import Digraph, Graph, InstanceError, dsatur_upper_bound, greedy_fvs_upper_bound, parse_graph
from .varmap import AUX, VarMap, VarMapError

__all__ = [
    "AUX", "Dataset", "Digraph", "EncodingScheme", "Graph", "InstanceError", "SCHEMES", "VarMap",
    "VarMapError", "decode_bddt", "decode_coloring", "decode_dfvs", "dsatur_upper_bound",
    "encode_atmost_k", "encode_bddt", "encode_coloring", "encode_dfvs", "get_scheme",
    "greedy_depth_upper_bound", "greedy_fvs_upper_bound", "parse_dataset", "parse_graph",
]


@dataclass(frozen=True)
class EncodingScheme:
    name: str
    parse: Callable[[bytes], Any]
    encode_instance: Callable[[Any, int], tuple[CnfFormula, VarMap]]
    decode: Callable[[Mapping[int, bool], VarMap], Any]
    upper_bound: Callable[[Any], int]
    check: Callable[[Any, Any, int], bool]
    bound_name: str
    #: words that identify the problem and must never reach a prompt
    deny_terms: tuple[str, ...] = field(default=())
    #: neutral description of the instance text handed to candidates
    instance_format: str = ""

    @property
    def source_text(self) -> str:
        return resources.files("lsforge.assets.encoders").joinpath(f"{self.name}.txt").read_text()

    def encode(self, instance: bytes | str, bound: int | None = None) -> tuple[CnfFormula, VarMap, int]:
        """Parse and encode; returns the bound actually used as well."""
        if isinstance(instance, str):
            instance = instance.encode()
        inst = self.parse(instance)
        if bound is None:
            bound = self.upper_bound(inst)
        f, vm = self.encode_instance(inst, bound)
        return f, vm, bound


def _parse_undirected(data: bytes) -> Graph:
    g = parse_graph(data)
    if not isinstance(g, Graph):
        raise InstanceError("expected an undirected graph ('u' header)")
    return g


def _parse_directed(data: bytes) -> Digraph:
    g = parse_graph(data)
    if not isinstance(g, Digraph):
        raise InstanceError("expected a directed graph ('d' header)")
    return g


def _check_fvs(g: Digraph, removed: set[int], k: int) -> bool:
    return len(removed) <= k and g.is_acyclic_without(removed)


def _check_tree(d: Dataset, tree, k: int) -> bool:
    return tree_depth(tree) <= k and is_exact(tree, d)


SCHEMES: dict[str, EncodingScheme] = {
    "coloring": EncodingScheme(
        name="coloring",
        parse=_parse_undirected,
        encode_instance=encode_coloring,
        decode=decode_coloring,
        upper_bound=lambda g: max(1, dsatur_upper_bound(g)),
        check=lambda g, col, k: is_proper_coloring(g, col, k),
        bound_name="k",
        deny_terms=("coloring", "colouring", "chromatic"),
        instance_format="Header line `p <n> <m> u`, then m lines `u v` (1-based vertex pairs, "
                        "undirected). Lines starting with `c` are comments.",
    ),
    "dfvs": EncodingScheme(
        name="dfvs",
        parse=_parse_directed,
        encode_instance=encode_dfvs,
        decode=decode_dfvs,
        upper_bound=greedy_fvs_upper_bound,
        check=_check_fvs,
        bound_name="k",
        deny_terms=("dfvs", "feedback vertex", "feedback set", "fvs"),
        instance_format="Header line `p <n> <m> d`, then m lines `u v` (1-based ordered pairs u -> v). "
                        "Lines starting with `c` are comments.",
    ),
    "bddt": EncodingScheme(
        name="bddt",
        parse=parse_dataset,
        encode_instance=encode_bddt,
        decode=decode_bddt,
        upper_bound=greedy_depth_upper_bound,
        check=_check_tree,
        bound_name="depth",
        deny_terms=("bddt", "decision tree", "decision-tree"),
        instance_format="CSV table, optional header; every column but the last is numeric, the last "
                        "column is the label. Labels are mapped to ids 0.. in sorted order.",
    ),
}


def get_scheme(name: str) -> EncodingScheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise KeyError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
