"""Reference local searches: generic CNF baselines and structure-aware variants."""

from .generic import gsat, tabu_sampled, walksat
from .state import SearchOutcome, SearchParams, SearchState
from .structured import (
    bddt_level_search,
    coloring_native_search,
    degree_greedy_coloring,
    dfvs_degree_search,
)

__all__ = [
    "SearchOutcome", "SearchParams", "SearchState", "bddt_level_search", "coloring_native_search",
    "degree_greedy_coloring", "dfvs_degree_search", "gsat", "tabu_sampled", "walksat",
]
