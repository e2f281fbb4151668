"""Regenerate the shipped micro-suite: instances, split, config and cassettes.

The cassettes are recorded from a scripted provider whose answers are the
modules in ``scripts/responses``; replaying them needs no model access.

    python scripts/make_microsuite.py
"""

from __future__ import annotations

import json
import random
import re
import shutil
import sys
import tempfile
from pathlib import Path

from lsforge import cli
from lsforge.cnf import complete_assignment
from lsforge.encodings import get_scheme
from lsforge.llm import Completion, Provider, RecordingProvider, ScriptedProvider
from lsforge.solver import mini_solve

ROOT = Path(__file__).resolve().parents[1]
RESP = Path(__file__).resolve().parent / "responses"
SUITE = ROOT / "src" / "lsforge" / "assets" / "microsuite"

# (n, edge probability, generator seed); first three train, last three test
GRAPHS = [("g30-0", 30, 0.2, 0), ("g30-4", 30, 0.2, 4), ("g30-7", 30, 0.2, 7),
          ("g30-2", 30, 0.2, 2), ("g30-1", 30, 0.2, 1), ("g50-1", 50, 0.12, 1)]
TRAIN, TEST = [g[0] for g in GRAPHS[:3]], [g[0] for g in GRAPHS[3:]]

CONFIG = {
    "scheme": "coloring",
    "instances": ["instances"],
    "split_file": "split.json",
    "out": "run",
    "metric": "work",
    "adapter": "mini",
    "seed": 0,
    "timeouts": {"train_soft": 5, "train_hard": 10, "train_sat": 5, "test_soft": 5, "test_hard": 10,
                 "test_sat": 5, "reference_sat": 5, "verify_soft": 5, "verify_hard": 10},
    "gather": {"n": 5, "max_tries": 3},
    "refine": {"iterations": 3, "top_k": 2, "structure_from": 2},
    "baselines": ["walksat", "native"],
}


def fence(src: str, note: str) -> str:
    return f"```python\n{src.rstrip()}\n```\n\n{note}\n"


def graph_text(n: int, p: float, seed: int) -> str:
    r = random.Random(seed * 100 + n)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if r.random() < p]
    return f"p {n} {len(edges)} u\n" + "".join(f"{u} {v}\n" for u, v in edges)


def gather_script() -> list[str]:
    r = {p.stem: p.read_text() for p in RESP.glob("*.py")}
    return [
        fence(r["a_walk"], "A random walk over unsatisfied clauses."),
        fence(r["b_greedy_broken"], "Greedy labels by degree."),
        fence(r["b_greedy"], "Replaced the missing helper with a clash count."),
        "I would start from a greedy assignment and then improve it.",
        fence(r["d_units"], "Satisfies the long clauses directly."),
        fence(r["c_minconf"], "Greedy start plus min-conflicts moves."),
        fence(r["e_lazy"], "A trivial starting point."),
    ]


def variant(src: str, i: int) -> str:
    out = re.sub(r"^SEED = (\d+)$", lambda m: f"SEED = {int(m.group(1)) + i}", src, flags=re.M)
    out = re.sub(r"^NOISE = ([\d.]+)$", lambda m: f"NOISE = {round(float(m.group(1)) * (1 - 0.2 * i), 3)}",
                 out, flags=re.M)
    if i == 2:
        # a starved budget; expected to lose against the accepted version
        out = re.sub(r"^(MAX_FLIPS|MAX_MOVES) = \d+$", r"\1 = 5", out, flags=re.M)
    return out.rstrip() + f"\n\n# revision {i}\n"


def broken(src: str) -> str:
    return src.replace("def local_search(instance, formula, varmap, timeout):\n",
                       "def local_search(instance, formula, varmap, timeout):\n    budget = timeout * scale\n", 1)


class VariantProvider(Provider):
    """Refinement answers derived from the base in the first prompt."""

    name = "scripted"

    def __init__(self):
        self.calls = 0
        self.base = None

    def complete(self, messages, temperature):
        if self.base is None:
            self.base = re.findall(r"```python\n(.*?)```", messages[1].content, re.S)[-1]
        self.calls += 1
        answers = {1: fence(variant(self.base, 1), "Changed the seed."),
                   2: fence(broken(variant(self.base, 2)), "Scaled the time budget."),
                   3: fence(variant(self.base, 2), "Dropped the unused budget line."),
                   4: fence(variant(self.base, 3), "Lowered the noise again.")}
        return Completion(answers[self.calls])


def main() -> int:
    if SUITE.exists():
        for sub in ("instances", "cassettes"):
            shutil.rmtree(SUITE / sub, ignore_errors=True)
    (SUITE / "instances").mkdir(parents=True, exist_ok=True)
    (SUITE / "cassettes").mkdir(parents=True, exist_ok=True)
    costs = {}
    for gid, n, p, seed in GRAPHS:
        text = graph_text(n, p, seed)
        (SUITE / "instances" / f"{gid}.col").write_text(text)
        f, vm, k = get_scheme("coloring").encode(text)
        o = mini_solve(f, complete_assignment(f, {}), CONFIG["timeouts"]["reference_sat"])
        costs[gid] = o.stats["work"] if o.solved else None
        print(gid, k, o.status, o.stats["work"])
    (SUITE / "split.json").write_text(json.dumps(
        {"train": TRAIN, "test": TEST, "discarded": [], "metric": "work",
         "costs": {g: costs[g] for g in TRAIN}}, indent=2, sort_keys=True) + "\n")
    (SUITE / "config.json").write_text(json.dumps(CONFIG, indent=2, sort_keys=True) + "\n")

    cas = SUITE / "cassettes"
    script = gather_script()

    def provider(self, name, cassette_file, calls_done):
        inner = ScriptedProvider(script, "scripted") if cassette_file.startswith("gather") else VariantProvider()
        return RecordingProvider(inner, cas / cassette_file, clock=lambda: 0.0)

    def names(self):
        return ["scripted"]

    cli.Run.provider = provider
    cli.Run.gather_provider_names = names
    with tempfile.TemporaryDirectory() as out:
        base = ["--config", str(SUITE / "config.json"), "--out", out]
        for verb in ("gather", "refine"):
            code = cli.main([verb] + base)
            if code:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
