"""Chat-completion provider over a pluggable transport"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

from src.errors import ProviderError
from src.providers.transcript import Transport

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 2048


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS

    @classmethod
    def from_prompt(cls, prompt: str, system: str | None = None, **kwargs) -> ChatRequest:
        messages = []
        if system:
            messages.append(ChatMessage("system", system))
        messages.append(ChatMessage("user", prompt))
        return cls(tuple(messages), **kwargs)

    def followed_by(self, *messages: ChatMessage) -> ChatRequest:
        return ChatRequest(self.messages + tuple(messages), self.temperature, self.max_tokens)


@dataclass
class ChatProvider:
    transport: Transport
    model: str | None = None
    calls: int = field(default=0, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def payload(self, request: ChatRequest) -> dict:
        payload = {
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if self.model:
            payload["model"] = self.model
        return payload

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.calls += 1
        logger.debug("chat request: %d message(s), max_tokens=%d", len(request.messages), request.max_tokens)
        response = self.transport(self.payload(request))
        content = response.get("content")
        if content is None and response.get("choices"):
            # OpenAI-compatible servers nest the message
            content = response["choices"][0].get("message", {}).get("content")
        if not isinstance(content, str):
            raise ProviderError("chat response carries no content")
        return content
