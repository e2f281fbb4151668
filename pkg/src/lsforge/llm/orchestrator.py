"""Gathering, repair and refinement loops around a chat provider."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

from ..encodings import EncodingScheme
from ..runner import HARD_TIMEOUT, INVALID_OUTPUT, RUNTIME_ERROR, CandidateSpec, RunResult
from ..scoring import BETTER, NO_CHANGE, WORSE, EvalRecord, compare_records, rank
from .extract import ExtractionError, extract_code, summarize
from .prompts import (
    check_hygiene, gather_prompt, redact, refine_start_prompt, render, repair_prompt, template,
)
from .provider import ChatMessage, Provider

log = logging.getLogger(__name__)

GIVE_UP = "GIVE_UP"
FAILED = "FAILED"
MAX_VERSION = 20

VerifyFn = Callable[[CandidateSpec], RunResult]
EvaluateFn = Callable[[CandidateSpec], EvalRecord]


def sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def temperature_schedule(i: int, n: int, lo: float = 0.7, hi: float = 1.2) -> float:
    """Linear ramp from ``lo`` (first slot) to ``hi`` (last slot)."""
    if n <= 1:
        return round(lo, 6)
    return round(lo + (hi - lo) * i / (n - 1), 6)


def version_tag(version: int, structure_from: int = 11) -> str:
    if version == 1:
        return "Base"
    return "Structure" if version - 1 >= structure_from else "Refined"


def record_fingerprint(rec: EvalRecord | None) -> dict | None:
    """Deterministic part of a record: counts always, the average only when
    it is a work counter (wall seconds vary between runs)."""
    if rec is None:
        return None
    out = {"had_runtime_error": rec.had_runtime_error, "ls_timeouts": rec.ls_timeouts,
           "sat_timeouts": rec.sat_timeouts}
    if rec.metric == "work":
        out["avg_ok_work"] = None if rec.avg_ok_runtime is None else round(rec.avg_ok_runtime, 2)
    return out


class Conversation:
    """One chat thread; counts provider calls."""

    def __init__(self, system: str, messages: Sequence[ChatMessage] | None = None):
        self.messages: list[ChatMessage] = list(messages) if messages else [ChatMessage("system", system)]
        self.calls = 0

    def ask(self, provider: Provider, text: str, temperature: float) -> str:
        self.messages.append(ChatMessage("user", text))
        try:
            out = provider.complete(self.messages, temperature)
        except BaseException:
            self.messages.pop()
            raise
        self.calls += 1
        self.messages.append(ChatMessage("assistant", out.text))
        return out.text

    def to_list(self) -> list[dict]:
        return [m.to_dict() for m in self.messages]


def failure_message(r: RunResult) -> str:
    if r.status == HARD_TIMEOUT:
        return "the function did not return within the time limit and was killed"
    if r.status == INVALID_OUTPUT:
        return f"invalid return value: {r.message}"
    return r.message or "the program failed without an error message"


def _hygiene(scheme: EncodingScheme | None, prompt: str, model_text: Sequence[str]) -> None:
    # model-written sources and summaries are the model's own words; only the
    # text this package contributes is checked
    if scheme is None:
        return
    for s in sorted(model_text, key=len, reverse=True):
        if s:
            prompt = prompt.replace(s, "")
    check_hygiene(prompt, scheme)


@dataclass
class RepairResult:
    outcome: CandidateSpec | str  # GIVE_UP when no try verified
    tries: int
    last: RunResult | None

    @property
    def gave_up(self) -> bool:
        return self.outcome == GIVE_UP


def _spec_from(text: str, template_spec: CandidateSpec) -> CandidateSpec:
    src = extract_code(text)
    return CandidateSpec(template_spec.id, src, template_spec.entry, template_spec.origin,
                         template_spec.version, template_spec.lineage)


def repair_loop(c: CandidateSpec, failure: RunResult, provider: Provider, conv: Conversation,
                verify: VerifyFn, max_tries: int = 10, temperature: float = 0.7,
                scheme: EncodingScheme | None = None) -> RepairResult:
    """Send the error (and line) back until a fix verifies or ``max_tries`` runs out."""
    if failure.returned:
        raise ValueError(f"repair_loop needs a failed run, got {failure.status}")
    last = failure
    message, line = failure_message(failure), failure.line
    for attempt in range(1, max_tries + 1):
        prompt = repair_prompt(redact(message, scheme) if scheme else message, line)
        _hygiene(scheme, prompt, [])
        reply = conv.ask(provider, prompt, temperature)
        try:
            fixed = _spec_from(reply, c)
        except ExtractionError as exc:
            message, line = str(exc), None
            continue
        last = verify(fixed)
        if last.returned:
            return RepairResult(fixed, attempt, last)
        message, line = failure_message(last), last.line
    return RepairResult(GIVE_UP, max_tries, last)


def _attempt(c: CandidateSpec, reply: str, provider, conv, verify, max_tries, temperature, scheme):
    """Extract, verify and if needed repair one fresh reply.  Returns
    (spec or None, repair rounds)."""
    try:
        spec = _spec_from(reply, c)
        result = verify(spec)
    except ExtractionError as exc:
        spec, result = c, RunResult(RUNTIME_ERROR, 0.0, message=str(exc))
    if result.returned:
        return spec, 0
    rep = repair_loop(spec, result, provider, conv, verify, max_tries, temperature, scheme)
    return (None if rep.gave_up else rep.outcome), rep.tries


# ---------------------------------------------------------------------------
# Gathering


@dataclass
class GatherConfig:
    n: int = 50
    max_tries: int = 10
    temp_lo: float = 0.7
    temp_hi: float = 1.2
    context_chars: int = 60000
    id_prefix: str = "g"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass
class GatherState:
    provider: str
    slot: int = 0
    calls: int = 0
    candidates: list[dict] = field(default_factory=list)
    slots: list[dict] = field(default_factory=list)
    prompts: list[str] = field(default_factory=list)  # hashes of prompts sent, in order

    def specs(self) -> list[CandidateSpec]:
        return [CandidateSpec.from_dict(d) for d in self.candidates]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GatherState":
        return cls(**d)


def previous_context(specs: Sequence[CandidateSpec], limit: int) -> tuple[list[str], list[str]]:
    """Entries describing earlier candidates, and the model-written text in
    them.  Oldest bodies collapse to one-line summaries first when the total
    exceeds ``limit`` characters."""
    full = [f"\n### {c.id}\n```python\n{c.source.rstrip()}\n```" for c in specs]
    short = [f"- {c.id}: {summarize(c.source)}" for c in specs]
    entries = list(full)
    i = 0
    while sum(map(len, entries)) > limit and i < len(entries):
        entries[i] = short[i]
        i += 1
    model_text = [c.source.rstrip() for c in specs] + [summarize(c.source) for c in specs]
    return entries, model_text


def gather(scheme: EncodingScheme, provider: Provider, verify: VerifyFn, cfg: GatherConfig,
           state: GatherState | None = None, checkpoint: Callable[[GatherState], None] | None = None,
           entry: tuple[str, ...] | None = None) -> GatherState:
    """Fill ``cfg.n`` slots.  Each slot is a fresh conversation whose prompt
    holds the encoder source, the contract and every accepted candidate so
    far; a failing reply enters the repair loop, and a slot whose repairs give
    up yields no candidate."""
    state = state or GatherState(provider.name)
    system = template("system")
    while state.slot < cfg.n:
        i = state.slot
        temp = temperature_schedule(i, cfg.n, cfg.temp_lo, cfg.temp_hi)
        cid = f"{provider.name}-{cfg.id_prefix}{i + 1:02d}"
        stub = CandidateSpec(cid, origin="base") if entry is None else CandidateSpec(cid, entry=entry, origin="base")
        entries, model_text = previous_context(state.specs(), cfg.context_chars)
        prompt = gather_prompt(scheme, entries)
        _hygiene(scheme, prompt, model_text)
        conv = Conversation(system)
        reply = conv.ask(provider, prompt, temp)
        spec, repairs = _attempt(stub, reply, provider, conv, verify, cfg.max_tries, temp, scheme)
        state.prompts.extend(sha(m.content)[:16] for m in conv.messages if m.role == "user")
        state.calls += conv.calls
        state.slots.append({"slot": i + 1, "temperature": temp, "candidate": spec.id if spec else None,
                            "repair_rounds": repairs, "calls": conv.calls})
        if spec is not None:
            state.candidates.append(spec.to_dict())
        else:
            log.warning("slot %d: repairs gave up", i + 1)
        state.slot += 1
        if checkpoint:
            checkpoint(state)
    return state


def gather_manifest(state: GatherState) -> dict:
    return {
        "provider": state.provider,
        "calls": state.calls,
        "slots": state.slots,
        "candidates": [{"id": d["id"], "source_sha256": sha(d["source"])} for d in state.candidates],
        "prompt_sha": state.prompts,
    }


# ---------------------------------------------------------------------------
# Refinement


@dataclass
class VersionEntry:
    version: int
    tag: str
    parent: int | None
    candidate: dict | None  # None when repairs gave up
    verdict: str | None  # BETTER | WORSE | NO_CHANGE | FAILED; None for the base
    accepted: bool
    repair_rounds: int = 0
    record: dict | None = None

    @property
    def reverted(self) -> bool:
        return not self.accepted


@dataclass
class RefineState:
    base_id: str
    entries: list[VersionEntry] = field(default_factory=list)
    messages: list[dict] = field(default_factory=list)
    accepted_version: int = 1
    calls: int = 0
    pending_feedback: str | None = None

    @property
    def round(self) -> int:
        return len(self.entries) - 1

    def entry(self, version: int) -> VersionEntry:
        return self.entries[version - 1]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RefineState":
        d = dict(d)
        d["entries"] = [VersionEntry(**e) for e in d.get("entries", [])]
        return cls(**d)


def _feedback(verdict: str, version: int, parent: int, parent_source: str) -> str:
    """Prompt for the next round; ``parent`` is the version ``version`` was
    compared with (and reverted to when it lost)."""
    if verdict == BETTER:
        return render("feedback_better", version=version, accepted=parent)
    if verdict == NO_CHANGE:
        return render("feedback_nochange", version=version, accepted=parent)
    name = "feedback_worse" if verdict == WORSE else "feedback_failed"
    return render(name, version=version, accepted=parent, source=parent_source.rstrip())


def refine(scheme: EncodingScheme, base: CandidateSpec, base_record: EvalRecord, provider: Provider,
           verify: VerifyFn, evaluate: EvaluateFn, iterations: int = 19, max_tries: int = 10,
           structure_from: int = 11, temperature: float = 0.7, state: RefineState | None = None,
           checkpoint: Callable[[RefineState], None] | None = None,
           records: dict[int, EvalRecord] | None = None) -> RefineState:
    """Ask for variations of ``base`` one round at a time.

    Each new version is compared with the last accepted one (errors and
    timeout counts first, then the 10% runtime rule).  WORSE and FAILED
    versions are kept in the lineage but not accepted; the next prompt tells
    the model to revert and shows the accepted source again.  From round
    ``structure_from`` on, the structure reminder is appended.
    """
    if iterations < 0 or 1 + iterations > MAX_VERSION:
        raise ValueError(f"iterations must be in 0..{MAX_VERSION - 1}")
    records = {} if records is None else records
    if state is None:
        state = RefineState(base.id)
        state.entries.append(VersionEntry(1, "Base", None, base.to_dict(), None, True, 0,
                                          record_fingerprint(base_record)))
    records.setdefault(1, base_record)
    conv = Conversation(template("system"), [ChatMessage.from_dict(m) for m in state.messages] or None)
    while state.round < iterations:
        r = state.round + 1
        version = r + 1
        accepted = state.entry(state.accepted_version)
        acc_spec = CandidateSpec.from_dict(accepted.candidate)
        if r == 1:
            prompt = refine_start_prompt(scheme, base.source, 1)
            model_text = [base.source.rstrip()]
        else:
            prompt = state.pending_feedback
            model_text = [acc_spec.source.rstrip()]
        if r >= structure_from:
            prompt = prompt.rstrip("\n") + "\n\n" + template("structure")
        _hygiene(scheme, prompt, model_text)
        calls_before = conv.calls
        reply = conv.ask(provider, prompt, temperature)
        stub = CandidateSpec(f"{base.id}-v{version:02d}", entry=base.entry, origin="refined",
                             version=version, lineage=base.id)
        spec, repairs = _attempt(stub, reply, provider, conv, verify, max_tries, temperature, scheme)
        parent = state.accepted_version
        if spec is None:
            verdict, rec = FAILED, None
        else:
            rec = evaluate(spec)
            records[version] = rec
            verdict = compare_records(records[parent], rec)
        ok = verdict in (BETTER, NO_CHANGE)
        state.entries.append(VersionEntry(version, version_tag(version, structure_from), parent,
                                          spec.to_dict() if spec else None, verdict, ok, repairs,
                                          record_fingerprint(rec)))
        if ok:
            state.accepted_version = version
        state.pending_feedback = _feedback(verdict, version, parent, acc_spec.source)
        state.calls += conv.calls - calls_before
        state.messages = conv.to_list()
        if checkpoint:
            checkpoint(state)
    return state


def refine_manifest(state: RefineState) -> dict:
    return {
        "base": state.base_id,
        "calls": state.calls,
        "accepted_version": state.accepted_version,
        "versions": [{
            "version": e.version, "tag": e.tag, "parent": e.parent, "verdict": e.verdict,
            "accepted": e.accepted, "repair_rounds": e.repair_rounds, "record": e.record,
            "source_sha256": sha(e.candidate["source"]) if e.candidate else None,
        } for e in state.entries],
        "prompt_sha": [sha(m["content"])[:16] for m in state.messages if m["role"] == "user"],
    }


# ---------------------------------------------------------------------------
# Selection


def select_top(records_by_provider: Mapping[str, Sequence[EvalRecord]], k: int = 5) -> list[str]:
    """The ``k`` best clean candidates of each provider group."""
    chosen: list[str] = []
    for prov in sorted(records_by_provider):
        ranked = [r for r in rank(list(records_by_provider[prov])) if not r.had_runtime_error]
        if len(ranked) < k:
            log.warning("provider %s has only %d clean candidates (wanted %d)", prov, len(ranked), k)
        chosen.extend(r.candidate for r in ranked[:k])
    return chosen
