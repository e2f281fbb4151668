"""CNF formulas, DIMACS I/O and assignment evaluation.

Literals use the DIMACS convention throughout: a nonzero signed integer,
positive for the variable itself, negative for its negation.  Assignments
are plain ``dict[int, bool]`` keyed by variable id and may be partial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

Assignment = dict[int, bool]

#: Sentinel returned by :func:`unit_propagate` when a clause is falsified.
CONFLICT = None


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FlipScore:
    """Effect of flipping one variable: ``make`` clauses become satisfied,
    ``brk`` clauses become unsatisfied."""

    make: int
    brk: int

    @property
    def score(self) -> int:
        return self.make - self.brk


@dataclass(frozen=True, eq=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for i, c in enumerate(clauses):
            if not c:
                raise ValueError(f"clause {i} is empty")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {i}: literal {lit} out of range 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_clauses(cls, clauses: Iterable[Sequence[int]], num_vars: int | None = None) -> "CnfFormula":
        clauses = [tuple(c) for c in clauses]
        if num_vars is None:
            num_vars = max((abs(l) for c in clauses for l in c), default=0)
        return cls(num_vars, tuple(clauses))

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @cached_property
    def occurrences(self) -> list[list[int]]:
        """``occurrences[v]`` lists the distinct clause indices mentioning var ``v``."""
        occ: list[list[int]] = [[] for _ in range(self.num_vars + 1)]
        for ci, clause in enumerate(self.clauses):
            seen = set()
            for lit in clause:
                v = abs(lit)
                if v not in seen:
                    seen.add(v)
                    occ[v].append(ci)
        return occ


# ---------------------------------------------------------------------------
# DIMACS


def parse_dimacs(data: Union[str, bytes]) -> CnfFormula:
    """Parse DIMACS CNF text.

    Clauses may span lines; every clause must be terminated by ``0``.  The
    header counts are enforced exactly.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    num_vars = num_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(data.splitlines(), start=1):
        last_line = lineno
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError("negative counts in header", lineno)
            continue
        if num_vars is None:
            raise DimacsError("clause data before header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"invalid literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("zero-length clause", lineno)
                clauses.append(tuple(current))
                current = []
                if len(clauses) > num_clauses:
                    raise DimacsError(f"more than {num_clauses} clauses", lineno)
            elif abs(lit) > num_vars:
                raise DimacsError(f"literal {lit} exceeds {num_vars} variables", lineno)
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header", last_line or None)
    if current:
        raise DimacsError("unterminated final clause", last_line)
    if len(clauses) != num_clauses:
        raise DimacsError(f"header declares {num_clauses} clauses, found {len(clauses)}", last_line)
    return CnfFormula(num_vars, tuple(clauses))


def write_dimacs(formula: CnfFormula) -> bytes:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in formula.clauses)
    return ("\n".join(lines) + "\n").encode()


def read_dimacs(path) -> CnfFormula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


# ---------------------------------------------------------------------------
# Assignment helpers


def lit_value(lit: int, a: Mapping[int, bool]) -> bool | None:
    val = a.get(abs(lit))
    if val is None:
        return None
    return val if lit > 0 else not val


def clause_status(clause: Sequence[int], a: Mapping[int, bool]) -> bool | None:
    """True if satisfied, False if every literal is false, None otherwise."""
    undetermined = False
    for lit in clause:
        val = lit_value(lit, a)
        if val:
            return True
        if val is None:
            undetermined = True
    return None if undetermined else False


def count_unsat_partial(formula: CnfFormula, a: Mapping[int, bool]) -> tuple[int, int]:
    """Return ``(unsat, undetermined)`` clause counts under a partial assignment."""
    unsat = undetermined = 0
    for clause in formula.clauses:
        st = clause_status(clause, a)
        if st is False:
            unsat += 1
        elif st is None:
            undetermined += 1
    return unsat, undetermined


def count_unsat(formula: CnfFormula, a: Mapping[int, bool]) -> int:
    """Number of clauses with every literal falsified.

    Clauses with an unassigned literal and no satisfied literal are not
    counted; use :func:`count_unsat_partial` to get both numbers.
    """
    return count_unsat_partial(formula, a)[0]


def is_model(formula: CnfFormula, a: Mapping[int, bool]) -> bool:
    return all(clause_status(c, a) is True for c in formula.clauses)


def conflict_score(formula: CnfFormula, a: Mapping[int, bool], var: int) -> FlipScore:
    """Make/break counts for flipping ``var`` under the total assignment ``a``.

    Only clauses containing ``var`` are inspected; ``a`` is left untouched.
    """
    if var < 1 or var > formula.num_vars:
        raise ValueError(f"variable {var} out of range")
    cur = a[var]
    make = brk = 0
    for ci in formula.occurrences[var]:
        before = after = 0
        for lit in formula.clauses[ci]:
            v = abs(lit)
            val = a[v] if v != var else cur
            if (lit > 0) == val:
                before += 1
            if v == var:
                val = not cur
            if (lit > 0) == val:
                after += 1
        if before == 0 and after > 0:
            make += 1
        elif before > 0 and after == 0:
            brk += 1
    return FlipScore(make, brk)


def unit_propagate(formula: CnfFormula, a: Mapping[int, bool]) -> Assignment | None:
    """Extend ``a`` to the unit-propagation fixpoint.

    Returns the extended assignment (a new dict) or :data:`CONFLICT` if some
    clause becomes falsified.
    """
    out = dict(a)
    occ = formula.occurrences
    queue = list(range(len(formula.clauses)))
    queued = [True] * len(formula.clauses)
    while queue:
        ci = queue.pop()
        queued[ci] = False
        open_lits = set()
        for lit in formula.clauses[ci]:
            val = lit_value(lit, out)
            if val:
                break
            if val is None:
                open_lits.add(lit)
        else:
            if not open_lits:
                return CONFLICT
            if len(open_lits) == 1:
                (unit,) = open_lits
                out[abs(unit)] = unit > 0
                for cj in occ[abs(unit)]:
                    if not queued[cj]:
                        queued[cj] = True
                        queue.append(cj)
    return out


def complete_assignment(formula: CnfFormula, a: Mapping[int, bool], default: bool = False) -> Assignment:
    return {v: a.get(v, default) for v in range(1, formula.num_vars + 1)}


def assignment_to_lits(a: Mapping[int, bool]) -> list[int]:
    return [v if val else -v for v, val in sorted(a.items())]


def lits_to_assignment(lits: Iterable[int]) -> Assignment:
    out: Assignment = {}
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if abs(lit) in out:
            raise ValueError(f"duplicate assignment for var {abs(lit)}")
        out[abs(lit)] = lit > 0
    return out
