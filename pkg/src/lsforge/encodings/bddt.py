"""Bounded-depth decision tree encoding.

The tree is complete: internal nodes ``t = 1 .. 2**depth - 1`` in heap order
(children ``2t`` and ``2t+1``), leaves ``l = 0 .. 2**depth - 1``.  A row goes
left at a node when its tested feature value is ``<=`` the node threshold.

Families:

``a(t, f)``     node ``t`` tests feature ``f`` (1-based), exactly one per node
``s(t, f, j)``  threshold choice for ``f`` at ``t``; ``j = 0`` is the
                pass-through threshold (every row goes left), ``j >= 1`` is the
                midpoint between the ``j``-th and ``j+1``-th distinct values
``c(l, y)``     leaf ``l`` predicts class ``y``, exactly one per leaf
``d(e, t)``     row ``e`` (0-based) goes left at node ``t``; implied by ``s``
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence, Union

from ..cnf import CnfFormula
from .graphs import InstanceError
from .varmap import VarMap


@dataclass(frozen=True)
class Dataset:
    rows: tuple[tuple[float, ...], ...]
    labels: tuple[int, ...]
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise InstanceError("rows and labels differ in length")
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise InstanceError("rows have different feature counts")
        seen: dict[tuple, int] = {}
        for i, (row, y) in enumerate(zip(self.rows, self.labels)):
            if row in seen and self.labels[seen[row]] != y:
                raise InstanceError(f"rows {seen[row]} and {i} have identical features but different labels")
            seen.setdefault(row, i)
        if not self.class_names:
            names = tuple(str(c) for c in range(max(self.labels, default=-1) + 1))
            object.__setattr__(self, "class_names", names)

    @property
    def feature_count(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def cuts(self, f: int) -> list[float]:
        """Midpoints between consecutive distinct values of feature ``f`` (1-based)."""
        vals = sorted({r[f - 1] for r in self.rows})
        return [(a + b) / 2 for a, b in zip(vals, vals[1:])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row, y in zip(self.rows, self.labels):
            w.writerow([_fmt(x) for x in row] + [self.class_names[y]])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def parse_dataset(data: Union[str, bytes]) -> Dataset:
    """CSV with numeric feature columns and the label in the last column.

    A first line whose feature cells are not numeric is taken as a header.
    Class ids are assigned by sorted label name.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    raw_rows = []
    for lineno, rec in enumerate(csv.reader(io.StringIO(data)), start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) < 2:
            raise InstanceError("need at least one feature and a label", lineno)
        try:
            feats = tuple(float(c) for c in rec[:-1])
        except ValueError:
            if not raw_rows and lineno == 1:
                continue
            raise InstanceError(f"non-numeric feature in {rec!r}", lineno) from None
        raw_rows.append((lineno, feats, rec[-1].strip()))
    names = tuple(sorted({lab for _, _, lab in raw_rows}))
    ids = {name: i for i, name in enumerate(names)}
    width = len(raw_rows[0][1]) if raw_rows else 0
    for lineno, feats, _ in raw_rows:
        if len(feats) != width:
            raise InstanceError(f"expected {width} features, got {len(feats)}", lineno)
    return Dataset(
        tuple(f for _, f, _ in raw_rows),
        tuple(ids[lab] for _, _, lab in raw_rows),
        names,
    )


def _amo(lits: Sequence[int]) -> list[list[int]]:
    return [[-a, -b] for a, b in combinations(lits, 2)]


def leaf_path(depth: int, leaf: int) -> list[tuple[int, bool]]:
    """Internal nodes on the root-to-leaf path with the direction taken
    (True = left)."""
    path = []
    t = 1
    for level in range(depth - 1, -1, -1):
        right = bool((leaf >> level) & 1)
        path.append((t, not right))
        t = 2 * t + int(right)
    return path


def encode_bddt(d: Dataset, depth: int) -> tuple[CnfFormula, VarMap]:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    nf, nc = d.feature_count, max(d.num_classes, 1)
    inner = range(1, 2**depth)
    leaves = range(2**depth)
    cuts = {f: d.cuts(f) for f in range(1, nf + 1)}
    vm = VarMap({
        "depth": depth,
        "features": nf,
        "classes": nc,
        "rows": len(d.rows),
        "cuts": {str(f): c for f, c in cuts.items()},
        "left_rule": "value <= threshold goes left; j=0 sends every row left",
    })
    for t in inner:
        for f in range(1, nf + 1):
            vm.new("a", t, f)
    for t in inner:
        for f in range(1, nf + 1):
            for j in range(len(cuts[f]) + 1):
                vm.new("s", t, f, j)
    for l in leaves:
        for y in range(nc):
            vm.new("c", l, y)
    for e in range(len(d.rows)):
        for t in inner:
            vm.new("d", e, t)
    a, s, c, dd = (vm.families.get(k, {}) for k in "ascd")

    clauses: list[list[int]] = []
    for t in inner:
        feats = [a[t, f] for f in range(1, nf + 1)]
        clauses.append(feats)
        clauses += _amo(feats)
        for f in range(1, nf + 1):
            js = [s[t, f, j] for j in range(len(cuts[f]) + 1)]
            clauses.append([-a[t, f], *js])
            clauses += _amo(js)
            clauses += [[-sj, a[t, f]] for sj in js]
    for l in leaves:
        ys = [c[l, y] for y in range(nc)]
        clauses.append(ys)
        clauses += _amo(ys)
    for t in inner:
        for f in range(1, nf + 1):
            for j in range(len(cuts[f]) + 1):
                for e, row in enumerate(d.rows):
                    left = j == 0 or row[f - 1] <= cuts[f][j - 1]
                    clauses.append([-s[t, f, j], dd[e, t] if left else -dd[e, t]])
    for e, y in enumerate(d.labels):
        for l in leaves:
            path = [-dd[e, t] if go_left else dd[e, t] for t, go_left in leaf_path(depth, l)]
            clauses.append(path + [c[l, y]])
    return CnfFormula(vm.num_vars, tuple(map(tuple, clauses))), vm


# ---------------------------------------------------------------------------
# Trees


@dataclass
class Leaf:
    label: int


@dataclass
class Split:
    feature: int  # 1-based
    threshold: float  # inf for pass-through
    left: "Tree"
    right: "Tree"


Tree = Union[Leaf, Split]


def predict(tree: Tree, row: Sequence[float]) -> int:
    while isinstance(tree, Split):
        tree = tree.left if row[tree.feature - 1] <= tree.threshold else tree.right
    return tree.label


def tree_depth(tree: Tree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.left), tree_depth(tree.right))


def is_exact(tree: Tree, d: Dataset) -> bool:
    return all(predict(tree, r) == y for r, y in zip(d.rows, d.labels))


def decode_bddt(model: Mapping[int, bool], vm: VarMap) -> Tree:
    depth, nf, nc = vm.meta["depth"], vm.meta["features"], vm.meta["classes"]
    cuts = {int(f): c for f, c in vm.meta["cuts"].items()}

    def build(t: int, level: int, leaf_base: int) -> Tree:
        if level == depth:
            ys = [y for y in range(nc) if model.get(vm.var("c", leaf_base, y))]
            return Leaf(ys[0] if ys else 0)
        f = next((f for f in range(1, nf + 1) if model.get(vm.var("a", t, f))), 1)
        j = next((j for j in range(len(cuts[f]) + 1) if model.get(vm.var("s", t, f, j))), 0)
        thr = float("inf") if j == 0 else cuts[f][j - 1]
        half = 2 ** (depth - level - 1)
        return Split(f, thr, build(2 * t, level + 1, leaf_base), build(2 * t + 1, level + 1, leaf_base + half))

    return build(1, 0, 0)


def greedy_depth_upper_bound(d: Dataset) -> int:
    """Depth of a greedily grown exact tree (fewest misclassified rows per split)."""

    def minority(rows):
        counts: dict[int, int] = {}
        for i in rows:
            counts[d.labels[i]] = counts.get(d.labels[i], 0) + 1
        return len(rows) - max(counts.values(), default=0)

    def grow(rows: list[int]) -> int:
        if len({d.labels[i] for i in rows}) <= 1:
            return 0
        best = None
        for f in range(1, d.feature_count + 1):
            vals = sorted({d.rows[i][f - 1] for i in rows})
            for lo, hi in zip(vals, vals[1:]):
                thr = (lo + hi) / 2
                left = [i for i in rows if d.rows[i][f - 1] <= thr]
                right = [i for i in rows if d.rows[i][f - 1] > thr]
                cost = minority(left) + minority(right)
                if best is None or cost < best[0]:
                    best = (cost, left, right)
        _, left, right = best
        return 1 + max(grow(left), grow(right))

    return max(1, grow(list(range(len(d.rows)))))
