import itertools
import json
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsforge.scoring import (
    BETTER, NO_CHANGE, WORSE, EvalRecord, InstanceResult, ResultStore, compare_records,
    mean_relative_scores, rank, relative_score, significance, solved_new_report, split_train_test,
)
from helpers import ranking_fixture


def ok(cid, inst, t, status="SAT"):
    return InstanceResult(cid, inst, "OK", 0.5, status, t)


class TestRanking:
    def test_fixture_order(self):
        records, expected = ranking_fixture()
        assert [r.candidate for r in rank(records)] == expected

    def test_order_independent_of_input_permutation(self):
        records, expected = ranking_fixture()
        for perm in itertools.islice(itertools.permutations(records), 0, 720, 37):
            assert [r.candidate for r in rank(list(perm))] == expected

    def test_errored_always_last(self):
        records, _ = ranking_fixture()
        ranked = rank(records)
        assert ranked[-1].had_runtime_error
        assert not any(r.had_runtime_error for r in ranked[:-1])

    def test_undefined_average(self):
        records, _ = ranking_fixture()
        und = next(r for r in records if r.candidate == "undefined")
        assert und.avg_ok_runtime is None and und.sat_timeouts == 3

    def test_mismatched_instances(self):
        with pytest.raises(ValueError):
            rank([EvalRecord("a", [ok("a", "x", 1)]), EvalRecord("b", [ok("b", "y", 1)])])

    def test_invalid_output_counts_as_error(self):
        r = EvalRecord("a", [InstanceResult("a", "x", "INVALID_OUTPUT", 0.1)])
        assert r.had_runtime_error and r.ls_timeouts == 0

    def test_solver_result_needs_assignment(self):
        with pytest.raises(ValueError):
            InstanceResult("a", "x", "HARD_TIMEOUT", 1.0, "SAT", 1.0)

    def test_work_metric(self):
        r = EvalRecord("a", [InstanceResult("a", "x", "OK", 0.1, "SAT", 9.0, 40),
                             InstanceResult("a", "y", "OK", 0.1, "UNSAT", 9.0, 60)], "work")
        assert r.avg_ok_runtime == 50.0


class TestRelativeScore:
    def test_pinned(self):
        assert relative_score({"a": 10.0, "b": 20.0, "c": None}) == {"a": 1.0, "b": 0.5, "c": 0.0}

    def test_all_timeouts(self):
        assert relative_score({"a": None, "b": None}) == {"a": 0.0, "b": 0.0}

    @given(st.dictionaries(st.text(min_size=1, max_size=3),
                           st.one_of(st.none(), st.floats(0.01, 1e4)), min_size=1))
    def test_bounds(self, times):
        s = relative_score(times)
        assert all(0.0 <= v <= 1.0 for v in s.values())
        if any(t is not None for t in times.values()):
            assert max(s.values()) == 1.0

    def test_mean(self):
        per = {"i1": {"a": 10.0, "b": 20.0}, "i2": {"a": None, "b": 5.0}}
        assert mean_relative_scores(per) == {"a": 0.5, "b": 0.75}


class TestSignificance:
    @pytest.mark.parametrize("prev, new, verdict", [
        (100, 89, BETTER), (100, 95, NO_CHANGE), (100, 90, NO_CHANGE), (100, 110, NO_CHANGE),
        (100, 111, WORSE), (0, 0.4, NO_CHANGE), (0, 0.6, WORSE),
    ])
    def test_rule(self, prev, new, verdict):
        assert significance(prev, new) == verdict

    @given(st.floats(0.01, 1e6), st.floats(0.0, 1e6))
    def test_antisymmetric_outside_band(self, a, b):
        v = significance(a, b)
        if v == BETTER:
            assert b < 0.9 * a
        elif v == WORSE:
            assert b > 1.1 * a
        else:
            assert 0.9 * a <= b <= 1.1 * a or abs(b - a) <= 0.1 * a + 1e-9

    def test_compare_records(self):
        base = EvalRecord("p", [ok("p", "x", 100.0)])
        assert compare_records(base, EvalRecord("n", [ok("n", "x", 80.0)])) == BETTER
        assert compare_records(base, EvalRecord("n", [ok("n", "x", 105.0)])) == NO_CHANGE
        err = EvalRecord("n", [InstanceResult("n", "x", "RUNTIME_ERROR", 0.1)])
        assert compare_records(base, err) == WORSE
        to = EvalRecord("n", [InstanceResult("n", "x", "OK", 0.1, "TIMEOUT", 120.0)])
        assert compare_records(base, to) == WORSE
        assert compare_records(to, base) == BETTER


def test_split():
    s = split_train_test({"a": (True, 5), "b": (True, 10), "c": (True, 60), "d": (True, 61), "e": (False, 120)})
    assert s.train == ["b", "c"] and s.test == ["d", "e"] and s.discarded == ["a"]


def test_solved_new_report():
    recs = [EvalRecord("c", [ok("c", "x", 1), ok("c", "y", 1), ok("c", "z", 1, "UNSAT")])]
    rows = solved_new_report(recs, {"x": "SAT", "y": "TIMEOUT", "z": "UNSAT"})
    assert rows == [{"candidate": "SAT", "solved": 1, "new": None}, {"candidate": "c", "solved": 2, "new": 1}]


class TestStore:
    def test_roundtrip_and_resume(self, tmp_path):
        p = tmp_path / "r.jsonl"
        s = ResultStore(p)
        s.add(ok("a", "x", 1.234))
        s.add(InstanceResult("a", "y", "HARD_TIMEOUT", 120.0))
        s.add(ok("a", "x", 2.0))  # later line wins
        fresh = ResultStore(p)
        assert fresh.get("a", "x").sat_time == 2.0
        rec = fresh.record("a", ["x", "y"])
        assert rec.ls_timeouts == 1 and rec.avg_ok_runtime == 2.0
        assert all(json.loads(l) for l in p.read_text().splitlines())

    def test_concurrent_appends(self, tmp_path):
        s = ResultStore(tmp_path / "r.jsonl")
        threads = [threading.Thread(target=lambda i=i: s.add(ok("a", f"i{i}", i))) for i in range(20)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(ResultStore(tmp_path / "r.jsonl").load()) == 20
