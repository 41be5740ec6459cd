"""Run configuration: JSON config file, .env file and environment overrides"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.errors import ConfigurationError

load_dotenv()

DEFAULT_ABBREVIATIONS = (
    "mr.", "mrs.", "ms.", "dr.", "inc.", "corp.", "co.", "ltd.", "no.", "vs.", "rev.",
    "approx.", "e.g.", "i.e.", "u.s.", "fig.", "est.", "avg.", "yr.", "q.",
)

# provider section -> environment variable prefix
ENV_PREFIXES = {"llm": "DOCTAB_LLM", "embedder": "DOCTAB_EMBED", "rewriter": "DOCTAB_REWRITE"}


class ProviderConfig(BaseModel):
    """One backend. Modes: live (HTTP), replay, record (live + append to transcript),
    plus the offline modes hashing (embedder), identity and chat (rewriter)."""

    mode: str
    url: Optional[str] = None
    api_key: Optional[str] = None
    model: Optional[str] = None
    transcript: Optional[Path] = None
    timeout: float = 60.0
    max_retries: int = 3
    max_in_flight: int = 4
    requests_per_second: Optional[float] = None
    dim: int = 4096
    temperature: float = 0.0
    max_tokens: int = 2048


class RunConfig(BaseModel):
    k: int = 30
    recall_ks: list[int] = Field(default_factory=lambda: [10, 20, 30, 40, 50, 60])
    merge: Literal["round_robin", "max_score"] = "round_robin"
    retriever: Literal["embedding", "llm"] = "embedding"
    generation_mode: Literal["tabtalk", "direct", "oneshot"] = "tabtalk"
    fill_batch_size: Optional[int] = None
    max_retries: int = 1
    workers: int = 4
    seed: int = 0
    out_dir: Path = Path("out")
    exemplar: Optional[Path] = None
    abbreviations: list[str] = Field(default_factory=lambda: list(DEFAULT_ABBREVIATIONS))
    llm: ProviderConfig = Field(default_factory=lambda: ProviderConfig(mode="replay"))
    embedder: ProviderConfig = Field(default_factory=lambda: ProviderConfig(mode="hashing"))
    rewriter: ProviderConfig = Field(default_factory=lambda: ProviderConfig(mode="identity"))

    # pipeline inputs
    docs: Optional[Path] = None
    questions: Optional[Path] = None

    @field_validator("k", "workers")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("fill_batch_size")
    @classmethod
    def _batch(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("must be >= 1 when set")
        return value

    @field_validator("max_retries")
    @classmethod
    def _retries(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be >= 0")
        return value


def apply_env_overrides(config: RunConfig) -> RunConfig:
    for section, prefix in ENV_PREFIXES.items():
        provider: ProviderConfig = getattr(config, section)
        for field in ("url", "api_key", "model"):
            value = os.environ.get(f"{prefix}_{field.upper()}")
            if value:
                setattr(provider, field, value)
    return config


def load_config(path: Path | str | None = None, **overrides) -> RunConfig:
    """Read the JSON config (if any), apply keyword overrides, then environment overrides.

    Relative paths inside the file are resolved against the file's directory.
    """
    data: dict = {}
    base = Path(".")
    if path:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config {path}: {e}") from e
        base = path.parent
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e

    for name in ("out_dir", "exemplar", "docs", "questions"):
        value = getattr(config, name)
        if value is not None and not value.is_absolute() and path:
            setattr(config, name, base / value)
    for section in ENV_PREFIXES:
        provider = getattr(config, section)
        if provider.transcript is not None and not provider.transcript.is_absolute() and path:
            provider.transcript = base / provider.transcript
    return apply_env_overrides(config)
