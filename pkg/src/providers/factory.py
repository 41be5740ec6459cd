"""Build providers from configuration"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from src.config import ProviderConfig, RunConfig
from src.errors import ConfigurationError
from src.providers.chat import ChatProvider
from src.providers.embedding import Embedder, HashingEmbedder, TransportEmbedder
from src.providers.http import HttpTransport
from src.providers.rewrite import ChatRewriter, IdentityRewriter, Rewriter, TransportRewriter
from src.providers.transcript import RecordingTransport, ReplayTransport, Transcript, Transport

logger = logging.getLogger(__name__)


@dataclass
class Providers:
    llm: ChatProvider | None
    embedder: Embedder
    rewriter: Rewriter


def _transcript(name: str, cfg: ProviderConfig, must_exist: bool) -> Transcript:
    if cfg.transcript is None:
        raise ConfigurationError(f"{name} provider in {cfg.mode} mode needs a transcript path")
    path = Path(cfg.transcript)
    if path.exists():
        return Transcript.load(path, provider=name)
    if must_exist:
        raise ConfigurationError(f"{name} transcript {path} does not exist")
    return Transcript(name, path)


def build_transport(name: str, cfg: ProviderConfig) -> Transport:
    """live -> HTTP, replay -> transcript lookup, record -> HTTP + transcript append."""
    if cfg.mode == "replay":
        return ReplayTransport(_transcript(name, cfg, must_exist=True))
    if cfg.mode not in ("live", "record"):
        raise ConfigurationError(f"unknown {name} provider mode {cfg.mode!r}")
    live = HttpTransport(
        cfg.url,
        api_key=cfg.api_key,
        timeout=cfg.timeout,
        max_retries=cfg.max_retries,
        max_in_flight=cfg.max_in_flight,
        requests_per_second=cfg.requests_per_second,
    )
    if cfg.mode == "record":
        logger.info("recording %s exchanges to %s", name, cfg.transcript)
        return RecordingTransport(live, _transcript(name, cfg, must_exist=False))
    return live


def build_llm(cfg: ProviderConfig) -> ChatProvider:
    return ChatProvider(build_transport("llm", cfg), model=cfg.model)


def build_embedder(cfg: ProviderConfig) -> Embedder:
    if cfg.mode == "hashing":
        return HashingEmbedder(dim=cfg.dim)
    return TransportEmbedder(build_transport("embedder", cfg), model=cfg.model)


def build_rewriter(cfg: ProviderConfig, llm: ChatProvider | None = None) -> Rewriter:
    if cfg.mode == "identity":
        return IdentityRewriter()
    if cfg.mode == "chat":
        if llm is None:
            raise ConfigurationError("the chat rewriter needs an llm provider")
        return ChatRewriter(llm)
    return TransportRewriter(build_transport("rewriter", cfg))


def build_providers(config: RunConfig, need_llm: bool = True) -> Providers:
    llm = build_llm(config.llm) if need_llm or config.rewriter.mode == "chat" else None
    return Providers(
        llm=llm,
        embedder=build_embedder(config.embedder),
        rewriter=build_rewriter(config.rewriter, llm),
    )
