import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsforge.cnf import is_model
from lsforge.encodings import (
    AUX, Dataset, Digraph, Graph, InstanceError, VarMap, VarMapError, decode_bddt, decode_coloring,
    decode_dfvs, dsatur_upper_bound, encode_atmost_k, encode_bddt, encode_coloring, encode_dfvs,
    get_scheme, greedy_depth_upper_bound, greedy_fvs_upper_bound, parse_dataset, parse_graph,
)
from lsforge.encodings.bddt import is_exact, tree_depth
from lsforge.encodings.coloring import coloring_to_assignment, is_proper_coloring
from lsforge.encodings.graphs import dsatur
from lsforge.solver import SAT, mini_solve
from oracles import colorable, has_cycle, min_fvs, projected_models, tree_exists


def random_graph(rng, n, p):
    return Graph(n, frozenset((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p))


def random_digraph(rng, n, p):
    return Digraph(n, frozenset((u, v) for u in range(1, n + 1) for v in range(1, n + 1)
                                if u != v and rng.random() < p))


def random_dataset(rng, rows, feats, classes=2):
    seen = {}
    rows = min(rows, 4 ** feats)
    while len(seen) < rows:
        seen.setdefault(tuple(float(rng.randint(0, 3)) for _ in range(feats)), rng.randrange(classes))
    keys = list(seen)
    return Dataset(tuple(keys), tuple(seen[k] for k in keys))


graphs = st.integers(1, 7).flatmap(lambda n: st.sets(
    st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda e: e[0] < e[1])).map(lambda es: Graph(n, frozenset(es))))
digraphs = st.integers(1, 5).flatmap(lambda n: st.sets(
    st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda e: e[0] != e[1])).map(lambda es: Digraph(n, frozenset(es))))


class TestParsing:
    def test_graph_roundtrip(self):
        g = parse_graph("c x\np 3 2 u\n1 2\n3 2\n")
        assert isinstance(g, Graph) and g.edges == {(1, 2), (2, 3)}
        assert parse_graph(g.to_text()) == g

    def test_digraph(self):
        g = parse_graph(b"p 2 2 d\n1 2\n2 1\n")
        assert isinstance(g, Digraph) and g.arcs == {(1, 2), (2, 1)}

    @pytest.mark.parametrize("text", [
        "p 2 1 u\n1 1\n", "p 2 1 u\n1 3\n", "p 2 2 u\n1 2\n", "1 2\n", "p 2 x u\n",
        "p 2 2 u\n1 2\n2 1\n", "",
    ])
    def test_bad_graphs(self, text):
        with pytest.raises(InstanceError):
            parse_graph(text)

    def test_dataset_header_and_labels(self):
        d = parse_dataset("x,y,label\n1,2,b\n3,4,a\n")
        assert d.rows == ((1.0, 2.0), (3.0, 4.0))
        assert d.labels == (1, 0) and d.class_names == ("a", "b")
        assert parse_dataset(d.to_csv()) == d

    def test_dataset_conflicting_rows(self):
        with pytest.raises(InstanceError):
            parse_dataset("1,a\n1,b\n")


class TestColoring:
    def test_triangle(self):
        g = Graph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
        assert mini_solve(encode_coloring(g, 2)[0]).status == "UNSAT"
        f, vm = encode_coloring(g, 3)
        out = mini_solve(f)
        assert out.status == SAT
        assert is_proper_coloring(g, decode_coloring(out.model, vm), 3)

    @given(graphs, st.integers(1, 4))
    def test_clause_count(self, g, k):
        f, vm = encode_coloring(g, k)
        assert len(f.clauses) == g.n + k * len(g.edges)
        assert f.num_vars == g.n * k
        vm.validate(f.num_vars)

    @given(graphs, st.integers(1, 3))
    def test_satisfiable_iff_colorable(self, g, k):
        f, vm = encode_coloring(g, k)
        out = mini_solve(f)
        assert (out.status == SAT) == colorable(g.n, g.edges, k)
        if out.status == SAT:
            assert is_proper_coloring(g, decode_coloring(out.model, vm), k)

    @given(graphs)
    def test_dsatur_is_proper(self, g):
        col = dsatur(g)
        assert is_proper_coloring(g, col)
        k = dsatur_upper_bound(g)
        assert colorable(g.n, g.edges, k)
        f, vm = encode_coloring(g, max(k, 1))
        assert is_model(f, coloring_to_assignment(col, vm))


class TestCardinality:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_projection_equals_atmost_set(self, n):
        for k in range(0, n + 1):
            clauses, aux = encode_atmost_k(list(range(1, n + 1)), k, n + 1)
            projected = projected_models(clauses, n, n + len(aux))
            expected = {bits for bits in itertools.product((False, True), repeat=n) if sum(bits) <= k}
            assert projected == expected, (n, k)

    def test_aux_numbering(self):
        clauses, aux = encode_atmost_k([1, 2, 3], 1, 10)
        assert sorted(aux.values()) == [10, 11]

    def test_bad_k(self):
        with pytest.raises(ValueError):
            encode_atmost_k([1, 2], 3, 3)


class TestDfvs:
    @given(digraphs, st.integers(0, 5))
    def test_satisfiable_iff_small_fvs(self, g, k):
        f, vm = encode_dfvs(g, k)
        vm.validate(f.num_vars)
        out = mini_solve(f)
        assert (out.status == SAT) == (min_fvs(g.n, g.arcs) <= k)
        if out.status == SAT:
            removed = decode_dfvs(out.model, vm)
            assert len(removed) <= k and not has_cycle(g.n, g.arcs, removed)

    @given(digraphs)
    def test_greedy_bound_is_feasible(self, g):
        k = greedy_fvs_upper_bound(g)
        assert k >= min_fvs(g.n, g.arcs)
        assert mini_solve(encode_dfvs(g, k)[0]).status == SAT

    def test_aux_after_semantic(self):
        g = Digraph(3, frozenset({(1, 2), (2, 3), (3, 1)}))
        f, vm = encode_dfvs(g, 1)
        assert vm.family(AUX) and min(vm.family(AUX).values()) > max(vm.decision_vars())


class TestBddt:
    def test_xor_needs_depth_two(self):
        d = Dataset(((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)), (0, 1, 1, 0))
        assert mini_solve(encode_bddt(d, 1)[0]).status == "UNSAT"
        f, vm = encode_bddt(d, 2)
        out = mini_solve(f)
        assert out.status == SAT
        tree = decode_bddt(out.model, vm)
        assert tree_depth(tree) <= 2 and is_exact(tree, d)

    def test_random_against_oracle(self):
        rng = random.Random(3)
        for _ in range(25):
            d = random_dataset(rng, rng.randint(2, 6), rng.randint(1, 2))
            for depth in (1, 2):
                f, vm = encode_bddt(d, depth)
                vm.validate(f.num_vars)
                out = mini_solve(f)
                assert (out.status == SAT) == tree_exists(d.rows, d.labels, depth)
                if out.status == SAT:
                    assert is_exact(decode_bddt(out.model, vm), d)

    def test_greedy_depth_bound_feasible(self):
        rng = random.Random(9)
        for _ in range(10):
            d = random_dataset(rng, 6, 2)
            depth = greedy_depth_upper_bound(d)
            assert tree_exists(d.rows, d.labels, depth)


class TestVarMap:
    def test_roundtrip_and_reverse(self):
        vm = VarMap({"k": 2})
        assert vm.new("x", 1, 1) == 1 and vm.new("x", 1, 2) == 2 and vm.new(AUX, 0) == 3
        assert VarMap.from_json(vm.to_json()) == vm
        assert vm.reverse()[2] == ("x", (1, 2))
        assert vm.decision_vars() == [1, 2]
        vm.validate(3)

    def test_errors(self):
        vm = VarMap()
        vm.new("x", 1)
        with pytest.raises(VarMapError):
            vm.new("x", 1)
        with pytest.raises(VarMapError):
            vm.validate(2)
        with pytest.raises(KeyError):
            vm.var("y", 1)
        bad = VarMap()
        bad.new(AUX, 0)
        bad.new("x", 1)
        with pytest.raises(VarMapError):
            bad.validate()


class TestSchemes:
    def test_encode_uses_upper_bound(self):
        f, vm, k = get_scheme("coloring").encode("p 3 3 u\n1 2\n2 3\n1 3\n")
        assert k == 3 and vm.meta["k"] == 3

    def test_wrong_kind(self):
        with pytest.raises(InstanceError):
            get_scheme("dfvs").encode("p 2 1 u\n1 2\n")

    def test_unknown(self):
        with pytest.raises(KeyError):
            get_scheme("nope")

    @pytest.mark.parametrize("name", ["coloring", "dfvs", "bddt"])
    def test_source_text_has_no_deny_terms(self, name):
        s = get_scheme(name)
        text = s.source_text.lower() + s.instance_format.lower()
        assert "def encode" in text
        for term in s.deny_terms:
            assert term not in text
