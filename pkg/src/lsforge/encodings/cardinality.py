"""Sequential-counter at-most-k constraint."""

from __future__ import annotations

from typing import Sequence


def encode_atmost_k(lits: Sequence[int], k: int, next_free_var: int) -> tuple[list[list[int]], dict[tuple[int, int], int]]:
    """Encode ``sum(lits) <= k`` with a sequential counter.

    Returns the clauses and the auxiliary variables keyed by ``(i, j)``,
    meaning "at least ``j`` of the first ``i`` literals are true".  Aux
    variables are numbered from ``next_free_var`` upward in ``(i, j)`` order.
    """
    n = len(lits)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if k == n:
        return [], {}
    if k == 0:
        return [[-l] for l in lits], {}

    aux: dict[tuple[int, int], int] = {}
    nxt = next_free_var
    for i in range(1, n):
        for j in range(1, k + 1):
            aux[i, j] = nxt
            nxt += 1

    s = aux
    x = [None, *lits]
    clauses: list[list[int]] = [[-x[1], s[1, 1]]]
    clauses += [[-s[1, j]] for j in range(2, k + 1)]
    for i in range(2, n):
        clauses.append([-x[i], s[i, 1]])
        clauses.append([-s[i - 1, 1], s[i, 1]])
        for j in range(2, k + 1):
            clauses.append([-x[i], -s[i - 1, j - 1], s[i, j]])
            clauses.append([-s[i - 1, j], s[i, j]])
        clauses.append([-x[i], -s[i - 1, k]])
    clauses.append([-x[n], -s[n - 1, k]])
    return clauses, aux
