"""Record/replay of provider conversations as JSON-lines cassettes.

Each line holds one call: the request (messages and temperature), its
SHA-256, the response text and token counts.  Replay serves responses by
index and refuses requests that differ from the recorded ones.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path
from typing import Sequence

from .provider import ChatMessage, Completion, Provider, ProviderError


class TranscriptMismatch(RuntimeError):
    """A replayed request differs from the recorded one (or the cassette ran out)."""


def request_payload(messages: Sequence[ChatMessage], temperature: float) -> dict:
    return {"messages": [m.to_dict() for m in messages], "temperature": round(float(temperature), 6)}


def request_sha(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode()
    return hashlib.sha256(blob).hexdigest()


def load_cassette(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    return [json.loads(l) for l in path.read_text().splitlines() if l.strip()]


class RecordingProvider(Provider):
    """Passes calls to ``inner`` and appends them to ``path``."""

    def __init__(self, inner: Provider, path, clock=time.time, keep: int | None = None):
        self.inner = inner
        self.name = inner.name
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        entries = load_cassette(self.path)
        if keep is not None and keep < len(entries):
            # drop calls of an interrupted step; they are asked again on resume
            entries = entries[:keep]
            self.path.write_text("".join(json.dumps(e, sort_keys=True, ensure_ascii=False) + "\n"
                                         for e in entries))
        self.index = len(entries)
        self._lock = threading.Lock()
        self._clock = clock

    def manifest(self) -> dict:
        return self.inner.manifest()

    def complete(self, messages, temperature):
        payload = request_payload(messages, temperature)
        entry = {"provider": self.name, "request_sha": request_sha(payload), "request": payload}
        try:
            out = self.inner.complete(messages, temperature)
        except ProviderError as exc:
            entry.update(error=str(exc))
            self._append(entry)
            raise
        entry.update(response=out.text, prompt_tokens=out.prompt_tokens,
                     completion_tokens=out.completion_tokens)
        self._append(entry)
        return out

    def _append(self, entry: dict) -> None:
        with self._lock:
            entry = {"index": self.index, "timestamp": round(self._clock(), 3), **entry}
            with open(self.path, "a") as fh:
                fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")
            self.index += 1


class ReplayProvider(Provider):
    """Serves a cassette; ``start_index`` skips calls already consumed by an
    interrupted run."""

    def __init__(self, path, start_index: int = 0, name: str | None = None):
        self.path = Path(path)
        self.entries = load_cassette(self.path)
        if not self.entries and not self.path.exists():
            raise FileNotFoundError(f"cassette not found: {self.path}")
        self.name = name or (self.entries[0].get("provider", "replay") if self.entries else "replay")
        self.index = start_index
        self._lock = threading.Lock()

    def manifest(self) -> dict:
        return {"name": self.name, "replay": True}

    @property
    def exhausted(self) -> bool:
        return self.index >= len(self.entries)

    def complete(self, messages, temperature):
        payload = request_payload(messages, temperature)
        with self._lock:
            i = self.index
            if i >= len(self.entries):
                raise TranscriptMismatch(f"{self.path.name}: no recorded call at index {i}")
            entry = self.entries[i]
            if entry["request_sha"] != request_sha(payload):
                raise TranscriptMismatch(f"{self.path.name}: request {i} differs from the recording"
                                         f" ({_first_difference(entry['request'], payload)})")
            self.index += 1
        if "error" in entry:
            raise ProviderError(entry["error"])
        return Completion(entry["response"], entry.get("prompt_tokens", 0), entry.get("completion_tokens", 0))


def _first_difference(recorded: dict, actual: dict) -> str:
    if recorded.get("temperature") != actual["temperature"]:
        return f"temperature {recorded.get('temperature')} != {actual['temperature']}"
    a, b = recorded.get("messages", []), actual["messages"]
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return f"message {i} ({y['role']}) differs"
    return f"{len(b)} messages, recorded {len(a)}"
