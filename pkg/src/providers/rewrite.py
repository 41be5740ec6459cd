"""Rewrite providers: question decomposition and data-subject sentence rewriting"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Literal, Protocol

from src.errors import ProviderError
from src.providers.chat import ChatProvider, ChatRequest
from src.providers.transcript import Transport

RewriteMode = Literal["question", "sentence"]

QUESTION_PROMPT = """Decompose the question into the smallest set of self-contained sub-questions,
one per entity and metric it asks about. Keep numbers, periods and units exactly as written.
Answer with a JSON list of strings only.

Question: {text}"""

SENTENCE_PROMPT = """Rewrite the sentence so that the specific data it reports (the number, amount or
value) is the grammatical subject, keeping every figure, unit and period unchanged.
Answer with the rewritten sentence only.

Sentence: {text}"""


class Rewriter(Protocol):
    def rewrite(self, mode: RewriteMode, text: str) -> list[str]: ...


class IdentityRewriter:
    def rewrite(self, mode: RewriteMode, text: str) -> list[str]:
        return [text]


@dataclass
class TransportRewriter:
    """Wire contract {mode, text} -> {outputs: [...]}."""

    transport: Transport

    def rewrite(self, mode: RewriteMode, text: str) -> list[str]:
        response = self.transport({"mode": mode, "text": text})
        outputs = response.get("outputs")
        if not isinstance(outputs, list):
            raise ProviderError("rewrite response carries no outputs list")
        return [str(o) for o in outputs]


@dataclass
class ChatRewriter:
    """Rewriting through a general chat model instead of a dedicated rewrite endpoint."""

    llm: ChatProvider
    max_tokens: int = 512

    def rewrite(self, mode: RewriteMode, text: str) -> list[str]:
        template = QUESTION_PROMPT if mode == "question" else SENTENCE_PROMPT
        content = self.llm.complete(
            ChatRequest.from_prompt(template.format(text=text), max_tokens=self.max_tokens)
        ).strip()
        if mode == "sentence":
            return [content] if content else []
        match = re.search(r"\[.*\]", content, re.DOTALL)
        if match:
            try:
                items = json.loads(match.group(0))
                return [str(item) for item in items if str(item).strip()]
            except json.JSONDecodeError:
                pass
        return [line.lstrip("-*0123456789. ").strip() for line in content.splitlines() if line.strip()]
