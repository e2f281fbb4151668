"""Process entry point wrapping a generated ``local_search`` function.

Usage::

    python -m lsforge.harness CANDIDATE.py INSTANCE CNF VARMAP TIMEOUT

The candidate module must define::

    def local_search(instance: str, formula: CnfFormula, varmap: VarMap,
                     timeout: float) -> dict[int, bool]

Anything the candidate prints goes to stderr; stdout carries only the
protocol answer (signed literals, then ``0``).
"""

from __future__ import annotations

import contextlib
import importlib.util
import sys
from collections.abc import Mapping
from pathlib import Path

from .cnf import read_dimacs
from .encodings.varmap import VarMap

ENTRY_POINT = "local_search"
EXIT_BAD_RESULT = 3


def normalize_result(result) -> list[int]:
    """Accept a var -> bool mapping or an iterable of signed literals."""
    if isinstance(result, Mapping):
        lits = []
        for var, val in result.items():
            var = int(var)
            if var <= 0:
                raise ValueError(f"variable ids must be positive, got {var}")
            lits.append(var if bool(val) else -var)
        return sorted(lits, key=abs)
    if result is None:
        raise TypeError(f"{ENTRY_POINT} returned None")
    return [int(l) for l in result]


def load_candidate(path: str):
    spec = importlib.util.spec_from_file_location("candidate", path)
    module = importlib.util.module_from_spec(spec)
    sys.modules["candidate"] = module
    spec.loader.exec_module(module)
    return module


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 5:
        print(__doc__, file=sys.stderr)
        return 2
    source, instance, cnf, varmap, timeout = argv
    formula = read_dimacs(cnf)
    vm = VarMap.from_json(Path(varmap).read_text())
    text = Path(instance).read_text()
    with contextlib.redirect_stdout(sys.stderr):
        module = load_candidate(source)
        fn = getattr(module, ENTRY_POINT, None)
        if not callable(fn):
            print(f"AttributeError: candidate does not define {ENTRY_POINT}()", file=sys.stderr)
            return EXIT_BAD_RESULT
        result = fn(text, formula, vm, float(timeout))
    try:
        lits = normalize_result(result)
    except (TypeError, ValueError) as exc:
        print(f"TypeError: invalid return value from {ENTRY_POINT}: {exc}", file=sys.stderr)
        return EXIT_BAD_RESULT
    sys.stdout.write(" ".join(map(str, lits + [0])) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
