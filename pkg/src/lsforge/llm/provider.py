"""Chat providers: an HTTP chat-completions client and a scripted stand-in."""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import httpx

log = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")


class ProviderError(RuntimeError):
    """The provider could not produce a completion (after retries)."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}

    @classmethod
    def from_dict(cls, d: dict) -> "ChatMessage":
        return cls(d["role"], d["content"])


def check_alternation(messages: Sequence[ChatMessage]) -> None:
    """Optional system message, then strictly alternating user/assistant
    turns starting with user."""
    rest = list(messages)
    if rest and rest[0].role == "system":
        rest = rest[1:]
    for i, m in enumerate(rest):
        want = "user" if i % 2 == 0 else "assistant"
        if m.role != want:
            raise ValueError(f"message {i} has role {m.role!r}, expected {want!r}")


@dataclass(frozen=True)
class Completion:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    model: str
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    temperature: float = 0.7
    max_tokens: int = 4096
    api_key_env: str = "OPENAI_API_KEY"
    retries: int = 3
    backoff: float = 2.0
    request_timeout: float = 300.0
    min_interval: float = 0.0  # seconds between requests, per provider
    #: models that reject a temperature parameter
    fixed_temperature: bool = False

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")

    def manifest(self) -> dict:
        """Serializable view; never contains the key itself."""
        return {"name": self.name, "model": self.model, "endpoint": self.endpoint,
                "max_tokens": self.max_tokens, "api_key_env": self.api_key_env,
                "fixed_temperature": self.fixed_temperature}

    @classmethod
    def from_dict(cls, d: dict) -> "ProviderConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


class Provider:
    """Interface: ``complete(messages, temperature) -> Completion``."""

    name = "provider"

    def complete(self, messages: Sequence[ChatMessage], temperature: float) -> Completion:
        raise NotImplementedError

    def manifest(self) -> dict:
        return {"name": self.name}


_RETRYABLE = {408, 409, 429, 500, 502, 503, 504}


class HttpChatProvider(Provider):
    """Chat-completions style JSON API.  Thread-safe; requests to one
    provider are spaced by ``min_interval``."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None,
                 sleep=time.sleep):
        self.config = config
        self.name = config.name
        self._client = httpx.Client(transport=transport, timeout=config.request_timeout)
        self._lock = threading.Lock()
        self._last = 0.0
        self._sleep = sleep

    def manifest(self) -> dict:
        return self.config.manifest()

    def _headers(self) -> dict:
        key = os.environ.get(self.config.api_key_env)
        if not key:
            raise ProviderError(f"environment variable {self.config.api_key_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def _throttle(self) -> None:
        with self._lock:
            wait = self._last + self.config.min_interval - time.monotonic()
            if wait > 0:
                self._sleep(wait)
            self._last = time.monotonic()

    def complete(self, messages, temperature):
        check_alternation(messages)
        body = {"model": self.config.model, "messages": [m.to_dict() for m in messages],
                "max_tokens": self.config.max_tokens}
        if not self.config.fixed_temperature:
            body["temperature"] = temperature
        headers = self._headers()
        last_error = "no attempt made"
        for attempt in range(self.config.retries + 1):
            if attempt:
                self._sleep(self.config.backoff * 2 ** (attempt - 1))
            self._throttle()
            try:
                resp = self._client.post(self.config.endpoint, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                log.warning("%s: request failed (%s), attempt %d", self.name, last_error, attempt + 1)
                continue
            if resp.status_code in _RETRYABLE:
                last_error = f"HTTP {resp.status_code}"
                log.warning("%s: %s, attempt %d", self.name, last_error, attempt + 1)
                continue
            if resp.status_code != 200:
                raise ProviderError(f"{self.name}: HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProviderError(f"{self.name}: malformed response ({exc})") from None
            usage = data.get("usage") or {}
            return Completion(text or "", usage.get("prompt_tokens", 0), usage.get("completion_tokens", 0))
        raise ProviderError(f"{self.name}: giving up after {self.config.retries + 1} attempts ({last_error})")


class ScriptedProvider(Provider):
    """Returns canned responses in order; ``Exception`` items are raised."""

    def __init__(self, responses: Iterable[str | Exception], name: str = "scripted"):
        self.responses = list(responses)
        self.name = name
        self.calls: list[list[ChatMessage]] = []
        self._lock = threading.Lock()

    def complete(self, messages, temperature):
        check_alternation(messages)
        with self._lock:
            self.calls.append(list(messages))
            if len(self.calls) > len(self.responses):
                raise ProviderError(f"{self.name}: script exhausted after {len(self.responses)} responses")
            item = self.responses[len(self.calls) - 1]
        if isinstance(item, Exception):
            raise item
        return Completion(item)
