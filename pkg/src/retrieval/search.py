"""Exact cosine top-K retrieval over rewritten sentences"""

from __future__ import annotations

import logging
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.errors import ConfigurationError
from src.providers.embedding import Embedder
from src.retrieval.store import DocumentStore, embed_store

logger = logging.getLogger(__name__)

DEFAULT_K = 30
# cosine scores are compared at this precision; closer scores tie
SCORE_DECIMALS = 10

MergeStrategy = Literal["round_robin", "max_score"]


class RankedSentence(BaseModel):
    sentence_id: int
    score: float


class RetrievalRecord(BaseModel):
    id: str = ""
    doc_id: str = ""
    question: str
    sub_questions: list[str]
    rankings: list[list[RankedSentence]] = Field(default_factory=list)
    merged: list[RankedSentence] = Field(default_factory=list)
    k: int = DEFAULT_K
    merge: str = "round_robin"
    degraded: bool = False

    @property
    def ranked_ids(self) -> list[int]:
        return [r.sentence_id for r in self.merged]


def rank_by_cosine(query: np.ndarray, matrix: np.ndarray, k: int) -> list[RankedSentence]:
    """Scores are non-increasing; ties keep document order."""
    scores = np.round(matrix @ query, SCORE_DECIMALS)
    order = np.argsort(-scores, kind="stable")[:k]
    return [RankedSentence(sentence_id=int(i), score=float(np.clip(scores[i], -1.0, 1.0))) for i in order]


def merge_round_robin(rankings: Sequence[Sequence[RankedSentence]], k: int) -> list[RankedSentence]:
    merged: list[RankedSentence] = []
    seen: set[int] = set()
    depth = max((len(r) for r in rankings), default=0)
    for position in range(depth):
        for ranking in rankings:
            if position >= len(ranking):
                continue
            item = ranking[position]
            if item.sentence_id in seen:
                continue
            seen.add(item.sentence_id)
            merged.append(item)
            if len(merged) == k:
                return merged
    return merged


def merge_max_score(rankings: Sequence[Sequence[RankedSentence]], k: int) -> list[RankedSentence]:
    best: dict[int, float] = {}
    for ranking in rankings:
        for item in ranking:
            if item.sentence_id not in best or item.score > best[item.sentence_id]:
                best[item.sentence_id] = item.score
    ordered = sorted(best.items(), key=lambda pair: (-pair[1], pair[0]))[:k]
    return [RankedSentence(sentence_id=i, score=s) for i, s in ordered]


def retrieve_top_k(
    store: DocumentStore,
    sub_questions: Sequence[str],
    embedder: Embedder,
    k: int = DEFAULT_K,
    merge: MergeStrategy = "round_robin",
    question: str | None = None,
) -> RetrievalRecord:
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    question = question or (sub_questions[0] if sub_questions else "")
    record = RetrievalRecord(
        doc_id=store.doc_id, question=question, sub_questions=list(sub_questions), k=k, merge=merge
    )
    if not store.sentences:
        logger.warning("document %s has no sentences; nothing to retrieve", store.doc_id)
        return record
    if not sub_questions:
        raise ValueError("retrieval needs at least one sub-question")

    if not store.has_embeddings:
        store = embed_store(store, embedder)
    matrix = store.embedding_matrix()
    queries = embedder.embed(list(sub_questions))
    if queries.shape[1] != matrix.shape[1]:
        raise ConfigurationError(
            f"embedding dimension mismatch: questions {queries.shape[1]}, sentences {matrix.shape[1]}"
        )

    record.rankings = [rank_by_cosine(query, matrix, k) for query in queries]
    if merge == "round_robin":
        record.merged = merge_round_robin(record.rankings, k)
    elif merge == "max_score":
        record.merged = merge_max_score(record.rankings, k)
    else:
        raise ConfigurationError(f"unknown merge strategy {merge!r}")
    return record
