"""Baseline retriever: ask the chat model to score each sentence's relevance"""

from __future__ import annotations

import json
import logging
import re

from src.errors import ResponseParseError
from src.providers.chat import ChatProvider, ChatRequest
from src.retrieval.search import DEFAULT_K, RankedSentence, RetrievalRecord
from src.retrieval.store import DocumentStore

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 20

RELEVANCE_PROMPT = """Rate how useful each numbered sentence is for answering the question,
from 0 (irrelevant) to 10 (states data the answer needs).
Answer with a JSON object mapping every sentence number to its score, e.g. {{"1": 7, "2": 0}}.

Question: {question}

Sentences:
{sentences}"""


def build_relevance_prompt(question: str, sentences: list[str]) -> str:
    numbered = "\n".join(f"{i}. {text}" for i, text in enumerate(sentences, start=1))
    return RELEVANCE_PROMPT.format(question=question, sentences=numbered)


def parse_relevance_response(response: str, n_sentences: int) -> dict[int, float]:
    """Map 1-based sentence numbers to scores clamped to [0, 10]; numbers out of range are ignored."""
    match = re.search(r"\{.*\}", response or "", re.DOTALL)
    if not match:
        raise ResponseParseError("relevance response has no JSON object")
    try:
        data = json.loads(match.group(0))
    except json.JSONDecodeError as e:
        raise ResponseParseError(f"relevance response is not valid JSON: {e}") from e
    scores = {}
    for key, value in data.items():
        try:
            number, score = int(key), float(value)
        except (TypeError, ValueError):
            continue
        if 1 <= number <= n_sentences:
            scores[number] = min(10.0, max(0.0, score))
    return scores


def rank_by_llm_relevance(
    store: DocumentStore,
    question: str,
    llm: ChatProvider,
    k: int = DEFAULT_K,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> RetrievalRecord:
    record = RetrievalRecord(doc_id=store.doc_id, question=question, sub_questions=[question], k=k, merge="llm")
    if not store.sentences:
        logger.warning("document %s has no sentences; nothing to retrieve", store.doc_id)
        return record

    scores: dict[int, float] = {}
    for start in range(0, len(store.sentences), batch_size):
        batch = store.sentences[start:start + batch_size]
        prompt = build_relevance_prompt(question, [s.text for s in batch])
        try:
            parsed = parse_relevance_response(
                llm.complete(ChatRequest.from_prompt(prompt, max_tokens=512)), len(batch)
            )
        except ResponseParseError as e:
            logger.warning("relevance batch at sentence %d unparseable, scored 0: %s", start, e)
            parsed = {}
        for offset, sentence in enumerate(batch, start=1):
            scores[sentence.sentence_id] = parsed.get(offset, 0.0)

    ordered = sorted(scores.items(), key=lambda pair: (-pair[1], pair[0]))[:k]
    # scores rescaled to [0, 1] so they sit on the same range as cosine
    ranking = [RankedSentence(sentence_id=i, score=s / 10.0) for i, s in ordered]
    record.rankings = [ranking]
    record.merged = list(ranking)
    return record
