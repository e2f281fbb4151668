"""Built-in searches packaged as candidate executables.

Usage::

    python -m lsforge.localsearch.candidate ALGO [--seed S] [--scheme NAME] \
        INSTANCE CNF VARMAP TIMEOUT

Prints the assignment as signed literals followed by a terminating ``0``,
which is the same protocol LLM-generated candidates follow.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..cnf import assignment_to_lits, read_dimacs
from ..encodings import get_scheme
from ..encodings.varmap import VarMap
from .generic import gsat, tabu_sampled, walksat
from .state import SearchParams
from .structured import bddt_level_search, coloring_native_search, degree_greedy_coloring, dfvs_degree_search

ALGORITHMS = ("walksat", "gsat", "tabu", "native")

# interpreter start-up and output are not covered by the search budget
STARTUP_MARGIN = 0.3


def run_builtin(algo: str, scheme: str | None, instance: bytes, formula, vm: VarMap, params: SearchParams):
    if algo == "walksat":
        return walksat(formula, params)
    if algo == "gsat":
        return gsat(formula, params)
    if algo == "tabu":
        init = None
        if scheme == "coloring":
            g = get_scheme("coloring").parse(instance)
            col = degree_greedy_coloring(g, vm.meta["k"])
            init = {var: col[v] == c for (v, c), var in vm.family("x").items()}
        return tabu_sampled(formula, params, vm, init=init)
    if algo == "native":
        if scheme is None:
            raise SystemExit("--scheme is required for the native search")
        inst = get_scheme(scheme).parse(instance)
        if scheme == "coloring":
            return coloring_native_search(inst, vm.meta["k"], params, vm)
        if scheme == "dfvs":
            return dfvs_degree_search(inst, vm.meta["k"], params, vm, formula)
        if scheme == "bddt":
            return bddt_level_search(inst, vm.meta["depth"], vm, params, formula)
    raise SystemExit(f"unknown algorithm {algo!r} for scheme {scheme!r}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lsforge-candidate")
    ap.add_argument("algo", choices=ALGORITHMS)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scheme", default=None)
    ap.add_argument("--noise", type=float, default=0.5)
    ap.add_argument("instance")
    ap.add_argument("cnf")
    ap.add_argument("varmap")
    ap.add_argument("timeout", type=float)
    args = ap.parse_args(argv)

    formula = read_dimacs(args.cnf)
    vm = VarMap.from_json(Path(args.varmap).read_text())
    params = SearchParams(seed=args.seed, noise=args.noise,
                          soft_timeout=max(0.05, args.timeout - STARTUP_MARGIN))
    out = run_builtin(args.algo, args.scheme, Path(args.instance).read_bytes(), formula, vm, params)
    lits = assignment_to_lits(out.assignment)
    sys.stdout.write("\n".join(map(str, lits + [0])) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
