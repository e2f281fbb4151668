import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsforge.cnf import CnfFormula, count_unsat, is_model
from lsforge.encodings import encode_bddt, encode_coloring, encode_dfvs
from lsforge.localsearch import (
    SearchParams, SearchState, bddt_level_search, coloring_native_search, degree_greedy_coloring,
    dfvs_degree_search, gsat, tabu_sampled, walksat,
)
from lsforge.localsearch.structured import monochromatic_edges
from oracles import planted_3cnf, unsat_count
from test_cnf import formula_and_assignment
from test_encodings import random_dataset, random_digraph, random_graph


@given(formula_and_assignment(), st.lists(st.integers(1, 6), max_size=15))
def test_state_tracks_unsat_and_scores(fa, flips):
    f, a = fa
    st_ = SearchState.from_assignment(f, a)
    cur = dict(a)
    for v in flips:
        if v > f.num_vars:
            continue
        before = unsat_count(f.clauses, cur)
        predicted = st_.score(v)
        st_.flip(v)
        cur[v] = not cur[v]
        assert before - unsat_count(f.clauses, cur) == predicted
        assert st_.num_unsat == unsat_count(f.clauses, cur) == st_.recount_unsat()
    assert st_.assignment() == cur


def planted(seed, n=40, ratio=3.5):
    clauses, _ = planted_3cnf(random.Random(seed), n, ratio)
    return CnfFormula(n, tuple(clauses))


@pytest.mark.parametrize("search", [walksat, gsat, tabu_sampled])
def test_generic_searches_solve_easy_planted(search):
    for seed in range(5):
        f = planted(seed)
        out = search(f, SearchParams(seed=seed, soft_timeout=5))
        assert out.found_model and is_model(f, out.assignment)
        assert out.best_unsat == count_unsat(f, out.assignment) == 0


@pytest.mark.parametrize("search", [walksat, gsat, tabu_sampled])
def test_deterministic_per_seed(search):
    f = planted(3, 60, 4.3)
    p = SearchParams(seed=9, soft_timeout=30, max_flips=500)
    a, b = search(f, p), search(f, p)
    assert (a.assignment, a.flips, a.best_unsat) == (b.assignment, b.flips, b.best_unsat)


def test_flip_budget_respected():
    out = walksat(planted(1, 80, 4.3), SearchParams(seed=0, max_flips=7))
    assert out.flips <= 7
    assert len(out.assignment) == 80


def test_params_validation():
    with pytest.raises(ValueError):
        SearchParams(noise=1.5)
    with pytest.raises(ValueError):
        SearchParams(sample_size=0)


def test_coloring_native():
    rng = random.Random(2)
    g = random_graph(rng, 30, 0.2)
    k = 5
    f, vm = encode_coloring(g, k)
    out = coloring_native_search(g, k, SearchParams(seed=1, soft_timeout=5), vm)
    assert count_unsat(f, out.assignment) == out.best_unsat
    col = degree_greedy_coloring(g, k)
    assert set(col) == set(range(1, g.n + 1))
    assert out.best_unsat <= monochromatic_edges(g, col)


def test_dfvs_degree_search():
    rng = random.Random(4)
    g = random_digraph(rng, 8, 0.25)
    from lsforge.encodings import greedy_fvs_upper_bound
    k = greedy_fvs_upper_bound(g)
    f, vm = encode_dfvs(g, k)
    out = dfvs_degree_search(g, k, SearchParams(seed=0, soft_timeout=5), vm, f)
    assert out.found_model and is_model(f, out.assignment)


def test_bddt_level_search():
    rng = random.Random(6)
    d = random_dataset(rng, 6, 2)
    f, vm = encode_bddt(d, 3)
    out = bddt_level_search(d, 3, vm, SearchParams(seed=0, soft_timeout=5, max_flips=20000), f)
    assert out.best_unsat == count_unsat(f, out.assignment)
    assert "level_moves" in out.extra
