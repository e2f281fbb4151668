"""Acceptance criteria, one test each, at their stated tolerances.

A line per criterion is printed in the terminal summary.
"""

import filecmp
import json
import random
import time
from importlib import resources
from pathlib import Path

import pytest

from lsforge import cli
from lsforge.cnf import CnfFormula, conflict_score, parse_dimacs, write_dimacs
from lsforge.encodings import encode_atmost_k, encode_bddt, encode_coloring, encode_dfvs
from lsforge.evaluation import Evaluator, Limits
from lsforge.localsearch import SearchParams, walksat
from lsforge.runner import HARD_TIMEOUT, SOFT_TIMEOUT_OK, run
from lsforge.scoring import BETTER, NO_CHANGE, rank, relative_score, significance
from lsforge.solver import SAT, mini_solve
from helpers import bundle, ranking_fixture, sleeper, spec
from oracles import (
    colorable, min_fvs, planted_3cnf, projected_models, random_formula, tree_exists, unsat_count,
)
from test_encodings import random_dataset, random_digraph, random_graph

criterion = pytest.mark.criterion

# Pinned at first measurement; see the decisions ledger.
HANDOFF_SEEDS = [0, 4, 6, 10, 14, 26, 28, 32, 35, 39, 41, 46, 48, 53, 57, 61, 62, 67, 74, 83]
HANDOFF_DECISIONS = [(6, 6), (4, 4), (6, 9), (7, 7), (7, 7), (5, 5), (7, 17), (5, 5), (5, 21), (5, 12),
                     (6, 11), (6, 7), (10, 11), (11, 11), (4, 4), (7, 17), (5, 26), (5, 5), (5, 5), (15, 15)]
WALKSAT_PINNED_RATE = 1.00


def _oracle_instances():
    rng = random.Random(2024)
    col = []
    for _ in range(200):
        n = rng.randint(1, 8)
        col.append((random_graph(rng, n, rng.uniform(0.1, 0.8)), rng.randint(1, 4)))
    dfvs = []
    for _ in range(200):
        n = rng.randint(1, 6)
        dfvs.append((random_digraph(rng, n, rng.uniform(0.1, 0.5)), rng.randint(0, n)))
    bddt = []
    for _ in range(50):
        bddt.append((random_dataset(rng, rng.randint(1, 8), rng.randint(1, 2)), rng.randint(1, 2)))
    return col, dfvs, bddt


@criterion(1, "encoding satisfiability matches brute-force oracles (coloring, DFVS, BDDT) in < 60 s")
def test_c01_encoding_oracles():
    start = time.perf_counter()
    col, dfvs, bddt = _oracle_instances()
    mismatches = []
    for g, k in col:
        if (mini_solve(encode_coloring(g, k)[0]).status == SAT) != colorable(g.n, g.edges, k):
            mismatches.append(("coloring", g, k))
    for g, k in dfvs:
        if (mini_solve(encode_dfvs(g, k)[0]).status == SAT) != (min_fvs(g.n, g.arcs) <= k):
            mismatches.append(("dfvs", g, k))
    for d, k in bddt:
        if (mini_solve(encode_bddt(d, k)[0]).status == SAT) != tree_exists(d.rows, d.labels, k):
            mismatches.append(("bddt", d, k))
    elapsed = time.perf_counter() - start
    assert mismatches == []
    assert elapsed < 60, f"suite took {elapsed:.1f} s"


@criterion(2, "coloring encoding has exactly n + k*|E| clauses")
def test_c02_clause_count():
    rng = random.Random(7)
    for _ in range(100):
        g, k = random_graph(rng, rng.randint(1, 30), rng.random()), rng.randint(1, 6)
        assert len(encode_coloring(g, k)[0].clauses) == g.n + k * len(g.edges)


@criterion(3, "conflict score equals the brute-force unsat-count difference")
def test_c03_conflict_score():
    rng = random.Random(3)
    for _ in range(500):
        n = rng.randint(1, 12)
        f = CnfFormula(n, tuple(random_formula(rng, n, rng.randint(1, 40), 4)))
        a = {v: rng.random() < 0.5 for v in range(1, n + 1)}
        v = rng.randint(1, n)
        b = dict(a)
        b[v] = not b[v]
        assert conflict_score(f, a, v).score == unsat_count(f.clauses, a) - unsat_count(f.clauses, b)


@criterion(4, "sequential counter projects onto exactly the at-most-k assignments (n <= 5)")
def test_c04_cardinality_projection():
    import itertools

    for n in range(0, 6):
        for k in range(0, n + 1):
            clauses, aux = encode_atmost_k(list(range(1, n + 1)), k, n + 1)
            expected = {b for b in itertools.product((False, True), repeat=n) if sum(b) <= k}
            assert projected_models(clauses, n, n + len(aux)) == expected, (n, k)


@criterion(5, "ranking order on the six-record fixture; relative scores 1.0 / 0.5 / 0.0")
def test_c05_ranking():
    records, expected = ranking_fixture()
    assert [r.candidate for r in rank(records)] == expected
    assert relative_score({"a": 10.0, "b": 20.0, "c": None}) == {"a": 1.0, "b": 0.5, "c": 0.0}


@criterion(6, "significance: 100->89 BETTER, 100->95 and 100->90 NO_CHANGE")
def test_c06_significance():
    assert significance(100, 89) == BETTER
    assert significance(100, 95) == NO_CHANGE
    assert significance(100, 90) == NO_CHANGE


@criterion(7, "soft=2 s / hard=4 s: late return counted, hard overrun killed and counted as LS timeout (+-0.5 s)")
def test_c07_timeouts(tmp_path):
    soft, hard = 2.0, 4.0
    b = bundle(tmp_path)
    late = run(spec(sleeper(soft + 1.0)), b, soft, hard)
    assert late.status == SOFT_TIMEOUT_OK and late.returned
    assert abs(late.wall_time - (soft + 1.0)) <= 0.5
    over = run(spec(sleeper(hard + 0.5)), b, soft, hard)
    assert over.status == HARD_TIMEOUT and not over.returned
    assert abs(over.wall_time - hard) <= 0.5
    rec = Evaluator([b], Limits(soft, hard, 5.0)).evaluate(spec(sleeper(hard + 0.5), "overrun"))
    assert rec.ls_timeouts == 1 and not rec.had_runtime_error


def _handoff_instance(seed):
    rng = random.Random(seed)
    clauses, model = planted_3cnf(rng, 40, 8.0)
    f = CnfFormula(40, tuple(clauses))
    order = list(range(1, 41))
    rng.shuffle(order)

    def near(d):
        p = dict(model)
        for v in order[:d]:
            p[v] = not p[v]
        return p

    return f, model, near


@criterion(8, "known model as phases: SAT with 0 conflicts; distance-1 never needs more decisions than distance-5")
def test_c08_phase_handoff():
    rng = random.Random(88)
    for _ in range(100):
        n = rng.randint(10, 60)
        clauses, model = planted_3cnf(rng, n, rng.uniform(2.0, 6.0))
        out = mini_solve(CnfFormula(n, tuple(clauses)), model)
        assert out.status == SAT and out.stats["conflicts"] == 0
    measured = []
    for seed in HANDOFF_SEEDS:
        f, model, near = _handoff_instance(seed)
        blocked = CnfFormula(f.num_vars, f.clauses + (tuple(-v if model[v] else v for v in model),))
        assert mini_solve(blocked).status == "UNSAT", "suite instances must have a unique model"
        measured.append((mini_solve(f, near(1)).stats["decisions"], mini_solve(f, near(5)).stats["decisions"]))
    assert measured == HANDOFF_DECISIONS
    assert all(d1 <= d5 for d1, d5 in measured)


@criterion(9, "WalkSAT on planted 3-CNF (n=50, ratio 3.0, 100 seeds, 10 s) meets the pinned solve rate")
def test_c09_walksat():
    solved = 0
    for seed in range(100):
        clauses, _ = planted_3cnf(random.Random(seed), 50, 3.0)
        f = CnfFormula(50, tuple(clauses))
        out = walksat(f, SearchParams(seed=seed, soft_timeout=10))
        solved += out.found_model
        if seed < 10:
            again = walksat(f, SearchParams(seed=seed, soft_timeout=10))
            assert (again.assignment, again.flips) == (out.assignment, out.flips)
    assert solved / 100 >= WALKSAT_PINNED_RATE


MICRO = Path(str(resources.files("lsforge.assets") / "microsuite"))
COMPARED = ["gather/manifest.json", "refine/manifest.json", "evaluate/manifest.json", "report/manifest.json",
            "report/table1.csv", "report/fig7.csv", "report/table1.txt", "report/fig7.txt"]


@criterion(10, "gather + refine + evaluate + report replay twice byte-identically in < 5 min")
def test_c10_replay(tmp_path):
    start = time.perf_counter()
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        for verb in ("gather", "refine", "evaluate", "report"):
            code = cli.main([verb, "--config", str(MICRO / "config.json"), "--cassette", str(MICRO / "cassettes"),
                             "--out", str(out)])
            assert code == 0, verb
        outs.append(out)
    elapsed = time.perf_counter() - start
    for rel in COMPARED:
        assert filecmp.cmp(outs[0] / rel, outs[1] / rel, shallow=False), rel
    refine = json.loads((outs[0] / "refine" / "manifest.json").read_text())
    assert [c["calls"] for c in refine["chains"]] and all(len(c["versions"]) == 4 for c in refine["chains"])
    table = (outs[0] / "report" / "table1.csv").read_text().splitlines()
    assert table[1].startswith("SAT,solver alone,SAT,")
    assert len(table) > 2
    assert elapsed < 300, f"replay took {elapsed:.0f} s"


@criterion(11, "1000 DIMACS round-trips; every varmap injective and covering 1..num_vars with aux")
def test_c11_roundtrip_and_varmaps():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(0, 30)
        clauses = random_formula(rng, n, rng.randint(0, 50), 5) if n else []
        f = CnfFormula(n, tuple(clauses))
        assert parse_dimacs(write_dimacs(f)) == f
    col, dfvs, bddt = _oracle_instances()
    maps = [encode_coloring(g, k) for g, k in col] + [encode_dfvs(g, k) for g, k in dfvs] + \
           [encode_bddt(d, k) for d, k in bddt]
    for f, vm in maps:
        vm.validate(f.num_vars)
        vars_ = [v for _, _, v in vm.items()]
        assert len(vars_) == len(set(vars_)) == f.num_vars
        assert set(vars_) == set(range(1, f.num_vars + 1))
