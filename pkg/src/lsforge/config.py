"""Run configuration: JSON file with ``${VAR}`` interpolation, flags on top."""

from __future__ import annotations

import copy
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .encodings import get_scheme
from .evaluation import Limits


class ConfigError(ValueError):
    """Unusable configuration (exit code 2)."""


DEFAULT_TIMEOUTS = {
    "train_soft": 60.0, "train_hard": 120.0, "train_sat": 120.0,
    "test_soft": 900.0, "test_hard": 1800.0, "test_sat": 3600.0,
    "reference_sat": 3600.0,
    "verify_soft": 30.0, "verify_hard": 60.0,
}

DEFAULTS: dict[str, Any] = {
    "scheme": None,
    "instances": [],
    "out": "lsforge-run",
    "bound": None,
    "providers": [],
    "timeouts": DEFAULT_TIMEOUTS,
    "split": {"train_min": 10.0, "train_max": 60.0},
    "split_file": None,
    "metric": "wall",
    "adapter": "mini",
    "workers": 1,
    "seed": 0,
    "gather": {"n": 50, "max_tries": 10, "temp_lo": 0.7, "temp_hi": 1.2, "context_chars": 60000},
    "refine": {"iterations": 19, "top_k": 5, "structure_from": 11, "temperature": 0.7},
    "baselines": ["walksat", "gsat", "tabu", "native"],
}

_VAR = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


def interpolate(value, env=None):
    """Replace ``${NAME}`` in every string with the environment value."""
    env = os.environ if env is None else env
    if isinstance(value, str):
        def sub(m):
            if m.group(1) not in env:
                raise ConfigError(f"environment variable {m.group(1)} is not set")
            return env[m.group(1)]
        return _VAR.sub(sub, value)
    if isinstance(value, list):
        return [interpolate(v, env) for v in value]
    if isinstance(value, dict):
        return {k: interpolate(v, env) for k, v in value.items()}
    return value


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


@dataclass
class RunConfig:
    data: dict
    base_dir: Path
    raw_sha256: str = ""
    overrides: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.data[key]

    @property
    def scheme(self):
        if not self.data["scheme"]:
            raise ConfigError("config does not name a scheme")
        try:
            return get_scheme(self.data["scheme"])
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None

    def path(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else (self.base_dir / p)

    @property
    def out(self) -> Path:
        return self.path(self.data["out"])

    @property
    def instance_dirs(self) -> list[Path]:
        return [self.path(p) for p in self.data["instances"]]

    def limits(self, phase: str) -> Limits:
        t = self.data["timeouts"]
        try:
            if phase == "reference":
                return Limits(t["reference_sat"], t["reference_sat"], t["reference_sat"])
            if phase == "verify":
                return Limits(t["verify_soft"], t["verify_hard"], t["verify_hard"])
            return Limits(t[f"{phase}_soft"], t[f"{phase}_hard"], t[f"{phase}_sat"])
        except ValueError as exc:
            raise ConfigError(f"{phase} timeouts: {exc}") from None

    def hash(self) -> str:
        """Digest of the effective settings (file plus flags), never the
        interpolated secrets."""
        # where results go and how many workers run them do not change them
        kept = {k: v for k, v in self.overrides.items() if k not in ("out", "workers")}
        blob = json.dumps({"file": self.raw_sha256, "overrides": kept}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def validate(self) -> None:
        self.scheme
        for phase in ("train", "test", "reference", "verify"):
            self.limits(phase)
        for d in self.instance_dirs:
            if not d.is_dir():
                raise ConfigError(f"instance directory not found: {d}")
        if self.data["split_file"] and not self.path(self.data["split_file"]).is_file():
            raise ConfigError(f"split file not found: {self.path(self.data['split_file'])}")
        if self.data["metric"] not in ("wall", "work"):
            raise ConfigError(f"metric must be 'wall' or 'work', got {self.data['metric']!r}")
        if int(self.data["workers"]) < 1:
            raise ConfigError("workers must be >= 1")


def load_config(path: str | os.PathLike | None, overrides: dict | None = None, env=None) -> RunConfig:
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if path is None:
        raw, base_dir, text = {}, Path.cwd(), ""
    else:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        text = p.read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}:{exc.lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{p}: top level must be an object")
        base_dir = p.resolve().parent
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data = _merge(DEFAULTS, interpolate(raw, env))
    data = _merge(data, overrides)
    return RunConfig(data, base_dir, hashlib.sha256(text.encode()).hexdigest(), overrides)
