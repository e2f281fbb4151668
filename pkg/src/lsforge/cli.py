"""Command line: ``lsforge <verb> [options]``.

Verbs: encode, split, baseline, gather, refine, evaluate, report.  Every verb
except ``encode`` reads a JSON run config (``--config``) and works inside its
output directory, so interrupted commands can simply be re-run.

Exit codes: 0 success, 1 pipeline error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from . import runner as rn
from .cnf import DimacsError
from .config import ConfigError, RunConfig, load_config
from .encodings import InstanceError, get_scheme
from .evaluation import Evaluator
from .llm import (
    GatherConfig, GatherState, HttpChatProvider, ProviderConfig, ProviderError, RecordingProvider,
    RefineState, ReplayProvider, TranscriptMismatch, gather, gather_manifest, refine, refine_manifest,
    select_top, template_hashes,
)
from .llm.orchestrator import record_fingerprint
from .runner import Bundle, CandidateSpec, builtin_entry, write_bundle
from .scoring import (
    EvalRecord, InstanceResult, ResultStore, mean_relative_scores, rank, solved_new_report, split_train_test,
)
from .solver import SolverError

log = logging.getLogger("lsforge")

REFERENCE = "SAT"  # pseudo-candidate holding solver-alone runs
PIPELINE_ERRORS = (ProviderError, TranscriptMismatch, SolverError, InstanceError, DimacsError, OSError)


# ---------------------------------------------------------------------------
# Small helpers


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    tmp.replace(path)


def _read_json(path: Path):
    return json.loads(path.read_text())


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in header]] + [["" if v is None else str(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def format_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def _fmt(x: float | None, nd: int = 4) -> str | None:
    return None if x is None else f"{x:.{nd}f}"


# ---------------------------------------------------------------------------
# Run context


class Run:
    """Everything a verb needs: config, bundles, stores, split."""

    def __init__(self, cfg: RunConfig, args):
        self.cfg = cfg
        self.args = args
        self.scheme = cfg.scheme
        self.out = cfg.out
        self.metric = cfg["metric"]
        self.workers = int(cfg["workers"])
        self.seed = int(cfg["seed"])
        self._bundles: dict[str, Bundle] | None = None
        self.train_store = ResultStore(self.out / "results" / "train.jsonl")
        self.test_store = ResultStore(self.out / "results" / "test.jsonl")
        self.reference_store = ResultStore(self.out / "results" / "reference.jsonl")

    # -- instances -------------------------------------------------------
    def instances(self) -> dict[str, Path]:
        found: dict[str, Path] = {}
        for d in self.cfg.instance_dirs:
            for p in sorted(d.iterdir()):
                if p.is_file() and not p.name.startswith("."):
                    iid = p.stem
                    if iid in found:
                        raise ConfigError(f"duplicate instance id {iid!r} ({found[iid]} and {p})")
                    found[iid] = p
        return found

    def bundles(self) -> dict[str, Bundle]:
        """Encode every instance once; re-encode when its bytes change."""
        if self._bundles is None:
            self._bundles = {}
            for iid, path in self.instances().items():
                data = path.read_bytes()
                digest = hashlib.sha256(data).hexdigest()
                bdir = self.out / "bundles" / iid
                man = bdir / "manifest.json"
                if man.is_file() and _read_json(man).get("instance_sha256") == digest:
                    self._bundles[iid] = Bundle(bdir, iid)
                    continue
                try:
                    f, vm, bound = self.scheme.encode(data, self.cfg["bound"])
                except (InstanceError, ValueError) as exc:
                    raise InstanceError(f"{path}: {exc}") from None
                self._bundles[iid] = write_bundle(bdir, data, f, vm, {
                    "scheme": self.scheme.name, "instance": path.name, "instance_sha256": digest,
                    self.scheme.bound_name: bound, "num_vars": f.num_vars, "num_clauses": f.num_clauses,
                    "version": __version__,
                })
                self._bundles[iid].id = iid
        return self._bundles

    def subset(self, ids: Sequence[str]) -> list[Bundle]:
        b = self.bundles()
        missing = [i for i in ids if i not in b]
        if missing:
            raise ConfigError(f"split names unknown instances: {missing}")
        return [b[i] for i in ids]

    # -- split -------------------------------------------------------------
    def split_path(self) -> Path:
        sf = self.cfg["split_file"]
        return self.cfg.path(sf) if sf else self.out / "split.json"

    def split(self) -> dict:
        p = self.split_path()
        if not p.is_file():
            raise ConfigError(f"no split found at {p}; run 'lsforge split' first")
        data = _read_json(p)
        for key in ("train", "test"):
            data.setdefault(key, [])
        return data

    # -- evaluation --------------------------------------------------------
    def adapter_spec(self) -> str:
        return self.cfg["adapter"]

    def evaluator(self, phase: str, ids: Sequence[str], store: ResultStore | None) -> Evaluator:
        return Evaluator(self.subset(ids), self.cfg.limits(phase), self.adapter_spec(), self.metric,
                         self.workers, store)

    def reference(self, ids: Sequence[str]) -> dict[str, InstanceResult]:
        """Solver-alone runs at the reference limit (stored, resumable)."""
        ev = Evaluator(self.subset(ids), self.cfg.limits("reference"), self.adapter_spec(), self.metric)
        out = {}
        todo = [b for b in ev.bundles if self.reference_store.get(REFERENCE, b.id) is None]

        def one(b):
            o = ev.solver_alone(b)
            return InstanceResult(REFERENCE, b.id, rn.OK, 0.0, o.status, o.runtime, o.stats.get("work"))

        if self.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                results = list(pool.map(one, todo))
        else:
            results = [one(b) for b in todo]
        for r in results:
            self.reference_store.add(r)
        for i in ids:
            out[i] = self.reference_store.get(REFERENCE, i)
        return out

    def builtins(self) -> list[CandidateSpec]:
        return [CandidateSpec(f"builtin-{a}", entry=builtin_entry(a, self.scheme.name, self.seed), origin="builtin")
                for a in self.cfg["baselines"]]

    def manifest(self, command: str, **extra) -> dict:
        t = self.cfg["timeouts"]
        return {"command": command, "version": __version__, "config_sha256": self.cfg.hash(),
                "scheme": self.scheme.name, "seed": self.seed, "metric": self.metric,
                "adapter": self.adapter_spec(), "timeouts": {k: t[k] for k in sorted(t)}, **extra}

    # -- providers ---------------------------------------------------------
    def cassette_dir(self) -> Path | None:
        c = getattr(self.args, "cassette", None)
        return Path(c) if c else None

    def recording(self) -> bool:
        return bool(getattr(self.args, "record", False))

    def provider_configs(self) -> dict[str, ProviderConfig]:
        cfgs = {}
        for d in self.cfg["providers"]:
            try:
                pc = ProviderConfig.from_dict(d)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"provider config {d.get('name', '?')}: {exc}") from None
            cfgs[pc.name] = pc
        return cfgs

    def provider(self, name: str | None, cassette_file: str, calls_done: int):
        """Replay from the cassette if one is given (and not recording),
        otherwise the configured provider, optionally recorded."""
        cdir = self.cassette_dir()
        if cdir is not None and not self.recording():
            path = cdir / cassette_file
            if not path.is_file():
                raise ConfigError(f"cassette not found: {path}")
            return ReplayProvider(path, start_index=calls_done, name=name)
        cfgs = self.provider_configs()
        if not cfgs:
            raise ConfigError("no provider configured and no cassette given")
        if name is None or name not in cfgs:
            raise ConfigError(f"provider {name!r} is not configured")
        live = HttpChatProvider(cfgs[name])
        if cdir is not None:
            return RecordingProvider(live, cdir / cassette_file, keep=calls_done)
        return live

    def gather_provider_names(self) -> list[str]:
        cdir = self.cassette_dir()
        if cdir is not None and not self.recording():
            if not cdir.is_dir():
                raise ConfigError(f"cassette directory not found: {cdir}")
            names = sorted(p.stem[len("gather-"):] for p in cdir.glob("gather-*.jsonl"))
            if not names:
                raise ConfigError(f"no gather-*.jsonl cassettes in {cdir}")
            return names
        names = sorted(self.provider_configs())
        if not names:
            raise ConfigError("no provider configured and no cassette given")
        return names

    def easy_bundle(self, split: dict) -> Bundle:
        """The training instance the solver alone finished fastest."""
        train = split["train"]
        if not train:
            raise ConfigError("the split has no training instances")
        costs = split.get("costs") or {}
        known = [i for i in train if costs.get(i) is not None]
        iid = min(known, key=lambda i: (costs[i], i)) if known else train[0]
        return self.bundles()[iid]

    # -- candidates ----------------------------------------------------------
    def gather_states(self) -> dict[str, GatherState]:
        out = {}
        for p in sorted((self.out / "gather").glob("state-*.json")):
            st = GatherState.from_dict(_read_json(p))
            out[st.provider] = st
        return out

    def refine_states(self) -> dict[str, RefineState]:
        out = {}
        for p in sorted((self.out / "refine").glob("*/state.json")):
            st = RefineState.from_dict(_read_json(p))
            out[st.base_id] = st
        return out


# ---------------------------------------------------------------------------
# Verbs


def cmd_encode(args) -> int:
    scheme = get_scheme(args.scheme)
    inst = Path(args.instance)
    if not inst.is_file():
        raise ConfigError(f"instance file not found: {inst}")
    data = inst.read_bytes()
    try:
        f, vm, bound = scheme.encode(data, args.bound)
    except (InstanceError, ValueError) as exc:
        print(f"lsforge: {inst}: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out) if args.out else inst.with_suffix(".bundle")
    write_bundle(out, data, f, vm, {
        "scheme": scheme.name, "instance": inst.name, "instance_sha256": hashlib.sha256(data).hexdigest(),
        scheme.bound_name: bound, "bound_source": "given" if args.bound is not None else "upper-bound heuristic",
        "num_vars": f.num_vars, "num_clauses": f.num_clauses, "version": __version__,
    })
    how = "" if args.bound is not None else " (upper-bound heuristic)"
    print(f"{scheme.bound_name}={bound}{how}: {f.num_vars} variables, {f.num_clauses} clauses -> {out}")
    return 0


def cmd_split(run: Run, args) -> int:
    ids = sorted(run.bundles())
    ref = run.reference(ids)
    outcomes = {i: (r.sat_ok, r.cost(run.metric) if r.sat_ok else float("inf")) for i, r in ref.items()}
    sp = run.cfg["split"]
    split = split_train_test(outcomes, float(sp["train_min"]), float(sp["train_max"]))
    data = {"train": split.train, "test": split.test, "discarded": split.discarded, "metric": run.metric,
            "thresholds": {"train_min": sp["train_min"], "train_max": sp["train_max"]},
            "costs": {i: (r.cost(run.metric)) for i, r in sorted(ref.items())},
            "status": {i: r.sat_status for i, r in sorted(ref.items())}}
    _write_json(run.out / "split.json", data)
    _write_json(run.out / "split.manifest.json", run.manifest("split", instances=ids))
    print(f"train {len(split.train)}  test {len(split.test)}  discarded {len(split.discarded)}")
    return 0


def _ranking_rows(records: Sequence[EvalRecord]):
    rows = []
    for r in rank(records):
        avg = r.avg_ok_runtime
        rows.append([r.candidate, "yes" if r.had_runtime_error else "no", r.ls_timeouts, r.sat_timeouts,
                     _fmt(avg, 2)])
    return ["candidate", "error", "ls_timeouts", "sat_timeouts", f"avg_{run_unit(records)}"], rows


def run_unit(records) -> str:
    return "work" if records and records[0].metric == "work" else "seconds"


def cmd_baseline(run: Run, args) -> int:
    split = run.split()
    phase = args.set
    ids = split[phase]
    store = run.train_store if phase == "train" else run.test_store
    ev = run.evaluator(phase, ids, store)
    records = ev.evaluate_many(run.builtins())
    header, rows = _ranking_rows(records)
    print(format_table(header, rows), end="")
    _write_json(run.out / "baseline" / f"manifest-{phase}.json",
                run.manifest("baseline", set=phase, instances=ids,
                             ranking=[{"id": r.candidate, **record_fingerprint(r)} for r in rank(records)]))
    return 0


def cmd_gather(run: Run, args) -> int:
    split = run.split()
    easy = run.easy_bundle(split)
    vl = run.cfg.limits("verify")
    g = run.cfg["gather"]
    gcfg = GatherConfig(n=int(args.n or g["n"]), max_tries=int(g["max_tries"]), temp_lo=float(g["temp_lo"]),
                        temp_hi=float(g["temp_hi"]), context_chars=int(g["context_chars"]))

    def verify(c: CandidateSpec):
        return rn.verify(c, easy, vl.soft, vl.hard)

    gdir = run.out / "gather"
    providers_manifest = []
    all_specs: list[CandidateSpec] = []
    for name in run.gather_provider_names():
        state_path = gdir / f"state-{name}.json"
        state = GatherState.from_dict(_read_json(state_path)) if state_path.is_file() else None
        provider = run.provider(name, f"gather-{name}.jsonl", state.calls if state else 0)
        if state is None:
            state = GatherState(provider.name)

        def save(st, _p=state_path):
            _write_json(_p, st.to_dict())

        state = gather(run.scheme, provider, verify, gcfg, state, save)
        save(state)
        providers_manifest.append({**gather_manifest(state), "config": provider.manifest()})
        all_specs.extend(state.specs())
    ev = run.evaluator("train", split["train"], run.train_store)
    records = ev.evaluate_many(all_specs)
    header, rows = _ranking_rows(records)
    print(format_table(header, rows), end="")
    _write_json(gdir / "manifest.json", run.manifest(
        "gather", n=gcfg.n, max_tries=gcfg.max_tries, temperatures=[gcfg.temp_lo, gcfg.temp_hi],
        easy_instance=easy.id, train=split["train"], templates=template_hashes(), providers=providers_manifest,
        ranking=[{"id": r.candidate, **record_fingerprint(r)} for r in rank(records)]))
    return 0


def _selected_bases(run: Run, split: dict, k: int) -> list[CandidateSpec]:
    states = run.gather_states()
    if not states:
        raise ConfigError("no gathered candidates; run 'lsforge gather' first")
    by_provider: dict[str, list[EvalRecord]] = {}
    specs: dict[str, CandidateSpec] = {}
    ev = run.evaluator("train", split["train"], run.train_store)
    for name, st in states.items():
        cands = st.specs()
        specs.update({c.id: c for c in cands})
        by_provider[name] = ev.evaluate_many(cands) if cands else []
    return [specs[i] for i in select_top(by_provider, k)]


def cmd_refine(run: Run, args) -> int:
    split = run.split()
    easy = run.easy_bundle(split)
    vl = run.cfg.limits("verify")
    rc = run.cfg["refine"]
    iterations = int(args.iterations if args.iterations is not None else rc["iterations"])
    k = int(rc["top_k"])
    bases = _selected_bases(run, split, k)
    provider_of = {c["id"]: name for name, st in run.gather_states().items() for c in st.candidates}
    ev = run.evaluator("train", split["train"], run.train_store)

    def verify(c):
        return rn.verify(c, easy, vl.soft, vl.hard)

    def chain(base: CandidateSpec) -> dict:
        cdir = run.out / "refine" / base.id
        state_path = cdir / "state.json"
        state = RefineState.from_dict(_read_json(state_path)) if state_path.is_file() else None
        provider = run.provider(provider_of[base.id], f"refine-{base.id}.jsonl", state.calls if state else 0)

        def save(st):
            _write_json(state_path, st.to_dict())

        state = refine(run.scheme, base, ev.evaluate(base), provider, verify, ev.evaluate, iterations,
                       int(run.cfg["gather"]["max_tries"]), int(rc["structure_from"]), float(rc["temperature"]),
                       state, save)
        save(state)
        return {**refine_manifest(state), "provider": provider_of[base.id]}

    if run.workers > 1 and len(bases) > 1:
        with ThreadPoolExecutor(min(run.workers, len(bases))) as pool:
            chains = list(pool.map(chain, bases))
    else:
        chains = [chain(b) for b in bases]
    for ch in chains:
        print(f"{ch['base']}: {len(ch['versions'])} versions, accepted v{ch['accepted_version']}")
    _write_json(run.out / "refine" / "manifest.json", run.manifest(
        "refine", iterations=iterations, top_k=k, structure_from=int(rc["structure_from"]),
        selected=[b.id for b in bases], templates=template_hashes(), chains=chains))
    return 0


def _classes(run: Run, split: dict) -> list[dict]:
    """Candidates that represent each provider x class on the test set:
    the best-ranked (on training) clean candidate of the class."""
    states = run.refine_states()
    gstates = run.gather_states()
    provider_of = {c["id"]: name for name, st in gstates.items() for c in st.candidates}
    groups: dict[tuple[str, str], list[CandidateSpec]] = {}
    for base_id, st in sorted(states.items()):
        prov = provider_of.get(base_id, "?")
        for e in st.entries:
            if e.candidate is None:
                continue
            spec = CandidateSpec.from_dict(e.candidate)
            groups.setdefault((prov, e.tag), []).append(spec)
    if not states:
        # no refinement yet: the gathered candidates form the Base class
        for name, st in gstates.items():
            groups[(name, "Base")] = st.specs()
    ev = run.evaluator("train", split["train"], run.train_store)
    chosen = []
    order = {"Base": 0, "Refined": 1, "Structure": 2}
    for (prov, tag), specs in sorted(groups.items(), key=lambda kv: (kv[0][0], order[kv[0][1]])):
        recs = [r for r in rank(ev.evaluate_many(specs)) if not r.had_runtime_error]
        if recs:
            best = next(s for s in specs if s.id == recs[0].candidate)
            chosen.append({"method": prov, "class": tag, "candidate": best.to_dict()})
    return chosen


def cmd_evaluate(run: Run, args) -> int:
    split = run.split()
    selection = _classes(run, split)
    builtins = run.builtins()
    for b in builtins:
        selection.append({"method": "builtin", "class": "baseline", "candidate": b.to_dict()})
    specs = [CandidateSpec.from_dict(s["candidate"]) for s in selection]
    # training records for every selected candidate (used by the train/test plot)
    run.evaluator("train", split["train"], run.train_store).evaluate_many(specs)
    records = run.evaluator("test", split["test"], run.test_store).evaluate_many(specs)
    run.reference(split["test"])
    _write_json(run.out / "evaluate" / "selection.json",
                [{"method": s["method"], "class": s["class"], "candidate": s["candidate"]["id"]} for s in selection])
    _write_json(run.out / "evaluate" / "manifest.json", run.manifest(
        "evaluate", test=split["test"],
        selection=[{"method": s["method"], "class": s["class"], "id": s["candidate"]["id"],
                    "source_sha256": hashlib.sha256(s["candidate"]["source"].encode()).hexdigest()}
                   for s in selection],
        results=[{"id": r.candidate, **record_fingerprint(r)} for r in records]))
    header, rows = _ranking_rows(records)
    print(format_table(header, rows), end="")
    return 0


def build_report(run: Run) -> dict[str, tuple[list[str], list[list]]]:
    sel_path = run.out / "evaluate" / "selection.json"
    selection = _read_json(sel_path) if sel_path.is_file() else []
    split = run.split() if run.split_path().is_file() else {"train": [], "test": []}
    test_ids, train_ids = split["test"], split["train"]

    baseline = {}
    for i in test_ids:
        r = run.reference_store.get(REFERENCE, i)
        baseline[i] = r.sat_status if r else None
    test_recs = [run.test_store.record(s["candidate"], test_ids, run.metric) for s in selection]
    rows_t1 = []
    report = solved_new_report(test_recs, baseline)
    rows_t1.append(["SAT", "solver alone", REFERENCE, report[0]["solved"], None])
    for s, row in zip(selection, report[1:]):
        rows_t1.append([s["method"], s["class"], s["candidate"], row["solved"], row["new"]])

    def mean_scores(store, ids):
        per = {}
        for i in ids:
            times = {}
            for s in selection:
                r = store.get(s["candidate"], i)
                times[s["candidate"]] = r.cost(run.metric) if r else None
            per[i] = times
        return mean_relative_scores(per) if selection else {}

    tr, te = mean_scores(run.train_store, train_ids), mean_scores(run.test_store, test_ids)
    rows_f7 = [[s["method"], s["class"], s["candidate"], _fmt(tr.get(s["candidate"])), _fmt(te.get(s["candidate"]))]
               for s in selection]
    return {
        "table1": (["method", "class", "candidate", "solved", "new"], rows_t1),
        "fig7": (["method", "class", "candidate", "train_score", "test_score"], rows_f7),
    }


def cmd_report(run: Run, args) -> int:
    tables = build_report(run)
    rdir = run.out / "report"
    rdir.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in tables.items():
        (rdir / f"{name}.txt").write_text(format_table(header, rows))
        (rdir / f"{name}.csv").write_text(format_csv(header, rows))
    print(format_table(*tables["table1"]), end="")
    print()
    print(format_table(*tables["fig7"]), end="")
    _write_json(rdir / "manifest.json", run.manifest("report"))
    return 0


# ---------------------------------------------------------------------------
# Entry point


def _common(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="JSON run configuration")
    parser.add_argument("--workers", type=int, default=s, help="parallel candidate/solver runs")
    parser.add_argument("--seed", type=int, default=s, help="seed for the builtin searches")
    parser.add_argument("--cassette", default=s, help="cassette directory (replayed unless --record)")
    parser.add_argument("--record", action="store_true", default=s, help="record provider calls into --cassette")
    parser.add_argument("--adapter", default=s, help="solver backend: mini | pysat:<name> | external:<path> [args]")
    parser.add_argument("--out", default=s, help="output directory (overrides the config)")
    parser.add_argument("-v", "--verbose", action="count", default=s)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsforge", description="Generate, score and refine local searches "
                                "that seed a SAT solver's phases.")
    p.add_argument("--version", action="version", version=f"lsforge {__version__}")
    _common(p)
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    e = sub.add_parser("encode", help="encode one instance into a bundle")
    _common(e)
    e.add_argument("scheme", choices=["coloring", "dfvs", "bddt"])
    e.add_argument("instance")
    e.add_argument("--bound", type=int, default=None, help="bound (default: upper-bound heuristic)")
    e.set_defaults(func=cmd_encode, needs_run=False)

    for name, fn, helptext in [
        ("split", cmd_split, "solver-alone reference runs and the train/test split"),
        ("baseline", cmd_baseline, "score the builtin local searches"),
        ("gather", cmd_gather, "generate candidates with the chat model"),
        ("refine", cmd_refine, "refine the top candidates"),
        ("evaluate", cmd_evaluate, "run the selected candidates on the test set"),
        ("report", cmd_report, "write the Solved/New table and train/test scores"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        _common(sp)
        sp.set_defaults(func=fn, needs_run=True)
        if name == "baseline":
            sp.add_argument("--set", choices=["train", "test"], default="train")
        if name == "gather":
            sp.add_argument("-n", type=int, default=None, help="number of slots (overrides config)")
        if name == "refine":
            sp.add_argument("--iterations", type=int, default=None, help="rounds per chain (overrides config)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    verbose = getattr(args, "verbose", 0) or 0
    logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if not args.needs_run:
            args.out = getattr(args, "out", None)
            return args.func(args)
        if getattr(args, "record", False) and not getattr(args, "cassette", None):
            raise ConfigError("--record needs --cassette")
        overrides = {k: getattr(args, k, None) for k in ("workers", "seed", "adapter", "out")}
        cfg = load_config(getattr(args, "config", None), overrides)
        cfg.validate()
        run = Run(cfg, args)
        return args.func(run, args)
    except ConfigError as exc:
        print(f"lsforge: configuration error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("lsforge: interrupted; completed work is saved, re-run to continue", file=sys.stderr)
        return 1
    except PIPELINE_ERRORS as exc:
        print(f"lsforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
