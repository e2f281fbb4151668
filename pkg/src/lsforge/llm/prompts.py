"""Prompt templates (text assets under ``lsforge/assets/prompts``)."""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from importlib import resources
from string import Template

from ..encodings import EncodingScheme

TEMPLATE_NAMES = (
    "system", "contract", "gather", "previous", "repair", "refine_start",
    "feedback_better", "feedback_worse", "feedback_nochange", "feedback_failed", "structure",
)


class HygieneError(ValueError):
    """A prompt would reveal the problem behind the encoding."""


@lru_cache(maxsize=None)
def template(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise KeyError(f"unknown prompt template {name!r}")
    return resources.files("lsforge.assets.prompts").joinpath(f"{name}.txt").read_text()


def render(name: str, **values) -> str:
    return Template(template(name)).substitute(**values)


def template_hashes() -> dict[str, str]:
    return {n: hashlib.sha256(template(n).encode()).hexdigest()[:16] for n in TEMPLATE_NAMES}


def deny_pattern(terms) -> re.Pattern:
    alts = "|".join(re.escape(t) for t in sorted(terms, key=len, reverse=True))
    return re.compile(rf"(?<![A-Za-z])(?:{alts})(?![A-Za-z])", re.IGNORECASE)


def check_hygiene(text: str, scheme: EncodingScheme, forbidden: tuple[str, ...] = ()) -> None:
    """Raise :class:`HygieneError` if ``text`` names the problem or contains
    any of the ``forbidden`` snippets (e.g. instance contents)."""
    m = deny_pattern(scheme.deny_terms + (scheme.name,)).search(text)
    if m:
        raise HygieneError(f"prompt mentions {m.group(0)!r}")
    for snippet in forbidden:
        if snippet and snippet in text:
            raise HygieneError("prompt contains instance data")


def redact(text: str, scheme: EncodingScheme) -> str:
    """Mask problem-identifying words in text that did not come from the model
    (error messages can carry file paths)."""
    return deny_pattern(scheme.deny_terms + (scheme.name,)).sub("<redacted>", text)


def gather_prompt(scheme: EncodingScheme, previous: list[str]) -> str:
    prev = render("previous", entries="\n".join(previous)) if previous else ""
    return render("gather", encoder_source=scheme.source_text.rstrip(), instance_format=scheme.instance_format,
                  contract=template("contract"), previous=prev)


def refine_start_prompt(scheme: EncodingScheme, source: str, version: int = 1) -> str:
    return render("refine_start", encoder_source=scheme.source_text.rstrip(),
                  instance_format=scheme.instance_format, contract=template("contract"),
                  source=source.rstrip(), version=version)


def repair_prompt(message: str, line: int | None) -> str:
    line_info = f"The error was raised at line {line} of your module.\n" if line is not None else ""
    return render("repair", message=message, line_info=line_info)
