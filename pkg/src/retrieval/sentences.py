"""Rule-based sentence segmentation"""

from __future__ import annotations

import re
from typing import Iterable

from src.config import DEFAULT_ABBREVIATIONS

# sentence-final punctuation, optional closing quotes/brackets, whitespace, then a capital or digit
BOUNDARY_RE = re.compile(r"[.!?][\"'”’)\]]*(\s+)(?=[\"'“‘(\[]?[A-Z0-9])")
TOKEN_RE = re.compile(r"(\S+)$")


def split_sentences(document_text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    text = document_text or ""
    abbreviations = {a.lower() for a in abbreviations}
    sentences = []
    start = 0
    for match in BOUNDARY_RE.finditer(text):
        end = match.start(1)
        candidate = text[start:end]
        token = TOKEN_RE.search(text[:match.start() + 1])
        if token and token.group(1).lower().lstrip("(\"'") in abbreviations:
            continue
        if candidate.count("(") > candidate.count(")"):
            continue
        sentence = candidate.strip()
        if sentence:
            sentences.append(sentence)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
