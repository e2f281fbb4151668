"""Generation of candidate local searches with a chat model."""

from .extract import ExtractionError, extract_code, summarize
from .orchestrator import (
    FAILED, GIVE_UP, Conversation, GatherConfig, GatherState, RefineState, RepairResult, VersionEntry,
    gather, gather_manifest, refine, refine_manifest, repair_loop, select_top, temperature_schedule,
    version_tag,
)
from .prompts import HygieneError, check_hygiene, template_hashes
from .provider import (
    ChatMessage, Completion, HttpChatProvider, Provider, ProviderConfig, ProviderError, ScriptedProvider,
)
from .transcript import RecordingProvider, ReplayProvider, TranscriptMismatch

__all__ = [
    "ChatMessage", "Completion", "Conversation", "ExtractionError", "FAILED", "GIVE_UP", "GatherConfig",
    "GatherState", "HttpChatProvider", "HygieneError", "Provider", "ProviderConfig", "ProviderError",
    "RecordingProvider", "RefineState", "RepairResult", "ReplayProvider", "ScriptedProvider",
    "TranscriptMismatch", "VersionEntry", "check_hygiene", "extract_code", "gather", "gather_manifest",
    "refine", "refine_manifest", "repair_loop", "select_top", "summarize", "template_hashes",
    "temperature_schedule", "version_tag",
]
