"""The encoder listings shown to the model must build the same formulas as the package."""

import random
import sys
import types
from itertools import count

import pytest

from lsforge.encodings import encode_atmost_k, encode_bddt, encode_coloring, encode_dfvs, get_scheme
from test_encodings import random_dataset, random_digraph, random_graph


class _IDPool:
    def __init__(self):
        self.ids, self._c = {}, count(1)

    def id(self, key):
        if key not in self.ids:
            self.ids[key] = next(self._c)
        return self.ids[key]

    @property
    def top(self):
        return len(self.ids)


class _CNF:
    def __init__(self):
        self.clauses = []

    def append(self, c):
        self.clauses.append(list(c))

    def extend(self, cs):
        self.clauses.extend(list(c) for c in cs)


class _CardEnc:
    @staticmethod
    def atmost(lits, bound, vpool, encoding):
        clauses, aux = encode_atmost_k(lits, bound, vpool.top + 1)
        for key in sorted(aux, key=aux.get):
            vpool.id(("card",) + key)
        return types.SimpleNamespace(clauses=clauses)


@pytest.fixture
def stub_pysat(monkeypatch):
    pysat = types.ModuleType("pysat")
    formula = types.ModuleType("pysat.formula")
    formula.CNF, formula.IDPool = _CNF, _IDPool
    card = types.ModuleType("pysat.card")
    card.CardEnc, card.EncType = _CardEnc, types.SimpleNamespace(seqcounter=1)
    for name, mod in {"pysat": pysat, "pysat.formula": formula, "pysat.card": card}.items():
        monkeypatch.setitem(sys.modules, name, mod)


def load(name):
    ns = {}
    exec(compile(get_scheme(name).source_text, f"<{name}>", "exec"), ns)
    return ns["encode"]


def test_coloring_listing(stub_pysat):
    enc, rng = load("coloring"), random.Random(1)
    for _ in range(20):
        g, k = random_graph(rng, rng.randint(1, 8), 0.4), rng.randint(1, 4)
        cnf, _ = enc(g.n, sorted(g.edges), k)
        assert [tuple(c) for c in cnf.clauses] == list(encode_coloring(g, k)[0].clauses)


def test_dfvs_listing(stub_pysat):
    enc, rng = load("dfvs"), random.Random(2)
    for _ in range(20):
        g, k = random_digraph(rng, rng.randint(1, 6), 0.3), rng.randint(0, 4)
        cnf, _ = enc(g.n, sorted(g.arcs), k)
        assert [tuple(c) for c in cnf.clauses] == list(encode_dfvs(g, k)[0].clauses)


def test_bddt_listing(stub_pysat):
    enc, rng = load("bddt"), random.Random(3)
    for _ in range(10):
        d, depth = random_dataset(rng, rng.randint(2, 6), 2), rng.randint(1, 2)
        cnf, _ = enc([list(r) for r in d.rows], list(d.labels), d.num_classes, depth)
        assert [tuple(c) for c in cnf.clauses] == list(encode_bddt(d, depth)[0].clauses)


def test_listings_under_real_pysat():
    pytest.importorskip("pysat")
    from lsforge.cnf import CnfFormula
    from lsforge.solver import mini_solve

    rng = random.Random(4)
    enc = load("coloring")
    for _ in range(10):
        g, k = random_graph(rng, rng.randint(1, 8), 0.4), rng.randint(1, 4)
        cnf, _ = enc(g.n, sorted(g.edges), k)
        assert [tuple(c) for c in cnf.clauses] == list(encode_coloring(g, k)[0].clauses)
    # the library's own counter may shortcut small bounds, so only satisfiability must agree
    enc = load("dfvs")
    for _ in range(30):
        g, k = random_digraph(rng, rng.randint(1, 6), 0.3), rng.randint(0, 4)
        cnf, pool = enc(g.n, sorted(g.arcs), k)
        lib = CnfFormula.from_clauses(cnf.clauses, max(pool.top, 1))
        assert mini_solve(lib).status == mini_solve(encode_dfvs(g, k)[0]).status
