import pytest

from lsforge.evaluation import Evaluator, Limits
from lsforge.runner import CandidateSpec, builtin_entry
from lsforge.scoring import ResultStore
from lsforge.solver import ExternalSolver, SolverError
from helpers import GOOD, bundle, spec


def test_limits_validation():
    with pytest.raises(ValueError):
        Limits(10, 5, 10)
    with pytest.raises(ValueError):
        Limits(0, 5, 10)


def test_evaluate_records_work(tmp_path):
    b = bundle(tmp_path)
    ev = Evaluator([b], Limits(10, 20, 10), "mini", metric="work")
    rec = ev.evaluate(spec(GOOD))
    r = rec.results[0]
    assert r.ls_status == "OK" and r.sat_status == "SAT" and r.sat_work > 0
    assert rec.avg_ok_runtime == r.sat_work


def test_work_metric_needs_stats():
    with pytest.raises(ValueError):
        Evaluator([], Limits(1, 1, 1), ExternalSolver("/bin/true"), metric="work")


def test_failures_skip_solver(tmp_path):
    b = bundle(tmp_path)
    rec = Evaluator([b], Limits(10, 20, 10)).evaluate(spec("boom("))
    assert rec.results[0].sat_status is None and rec.had_runtime_error


def test_solver_error_is_recorded(tmp_path):
    class Broken(ExternalSolver):
        def invoke(self, formula, phases, timeout):
            raise SolverError("crashed")

    b = bundle(tmp_path)
    rec = Evaluator([b], Limits(10, 20, 10), Broken("/bin/true")).evaluate(spec(GOOD))
    assert rec.results[0].sat_status == "ERROR" and rec.sat_timeouts == 1


def test_store_skips_done_pairs(tmp_path):
    b1, b2 = bundle(tmp_path, name="b1"), bundle(tmp_path, name="b2")
    store = ResultStore(tmp_path / "r.jsonl")
    ev = Evaluator([b1, b2], Limits(10, 20, 10), store=store, workers=2)
    first = ev.evaluate(spec(GOOD))
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    again = ev.evaluate(spec(GOOD))
    assert (tmp_path / "r.jsonl").read_text().splitlines() == lines
    assert [r.sat_status for r in again.results] == [r.sat_status for r in first.results]


def test_builtin_and_solver_alone(tmp_path):
    b = bundle(tmp_path)
    ev = Evaluator([b], Limits(5, 10, 10), metric="work")
    c = CandidateSpec("builtin-walksat", entry=builtin_entry("walksat"), origin="builtin")
    assert ev.evaluate(c).results[0].sat_status == "SAT"
    assert ev.solver_alone(b).status == "SAT"
