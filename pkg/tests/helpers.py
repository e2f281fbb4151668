"""Shared fixtures-as-functions for runner and evaluation tests."""

from lsforge.encodings import get_scheme
from lsforge.runner import CandidateSpec, write_bundle

PENTAGON = b"p 5 5 u\n1 2\n2 3\n3 4\n4 5\n1 5\n"

GOOD = '''
def local_search(instance, formula, varmap, timeout):
    """Color vertex v with (v % 3) + 1 on the x grid."""
    n, k = varmap.meta["n"], varmap.meta["k"]
    out = {}
    for v in range(1, n + 1):
        for c in range(1, k + 1):
            out[varmap.var("x", v, c)] = c == (v % 3) + 1
    return out
'''


def sleeper(seconds: float) -> str:
    return f'''
import time

def local_search(instance, formula, varmap, timeout):
    time.sleep({seconds})
    return {{1: True}}
'''


def bundle(tmp_path, text: bytes = PENTAGON, scheme: str = "coloring", name: str = "b"):
    f, vm, _ = get_scheme(scheme).encode(text)
    return write_bundle(tmp_path / name, text, f, vm)


def spec(source: str, cid: str = "c") -> CandidateSpec:
    return CandidateSpec(cid, source)


def ranking_fixture():
    """Six records over instances i1..i3 and the order they must rank in.

    ``errored`` has the best runtime but raised once, so it ranks last;
    ``undefined`` returned on every instance but the solver never finished,
    so its average is undefined.
    """
    from lsforge.scoring import EvalRecord, InstanceResult as R

    def rec(cid, rows):
        return EvalRecord(cid, [R(cid, f"i{j + 1}", *row) for j, row in enumerate(rows)])

    ok = lambda t: ("OK", 1.0, "SAT", t)
    records = [
        rec("errored", [ok(1.0), ("RUNTIME_ERROR", 0.2), ok(1.0)]),
        rec("slow", [ok(30.0), ok(30.0), ok(30.0)]),
        rec("undefined", [("OK", 1.0, "TIMEOUT", 120.0)] * 3),
        rec("fast", [ok(5.0), ok(5.0), ok(5.0)]),
        rec("ls-timeout", [("HARD_TIMEOUT", 120.0), ok(1.0), ok(1.0)]),
        rec("one-sat-timeout", [("OK", 1.0, "TIMEOUT", 120.0), ok(2.0), ok(2.0)]),
    ]
    expected = ["fast", "slow", "one-sat-timeout", "undefined", "ls-timeout", "errored"]
    return records, expected
