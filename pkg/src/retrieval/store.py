"""Sentence-segmented document with optional rewrites and embeddings"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from src.config import DEFAULT_ABBREVIATIONS
from src.errors import ConfigurationError
from src.providers.embedding import Embedder
from src.retrieval.sentences import split_sentences


@dataclass(frozen=True)
class Sentence:
    sentence_id: int
    text: str
    rewritten: Optional[str] = None
    embedding: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def search_text(self) -> str:
        """Retrieval scores the rewritten form; the raw text is what gets cited."""
        return self.rewritten if self.rewritten else self.text


@dataclass(frozen=True)
class DocumentStore:
    doc_id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for expected, sentence in enumerate(self.sentences):
            if sentence.sentence_id != expected:
                raise ValueError(
                    f"sentence ids must be dense in document order; expected {expected}, got {sentence.sentence_id}"
                )

    @classmethod
    def from_sentences(cls, doc_id: str, sentences: Sequence[str]) -> DocumentStore:
        return cls(doc_id, tuple(Sentence(i, text) for i, text in enumerate(sentences)))

    @classmethod
    def from_text(
        cls, doc_id: str, text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
    ) -> DocumentStore:
        return cls.from_sentences(doc_id, split_sentences(text, abbreviations))

    def __len__(self) -> int:
        return len(self.sentences)

    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]

    def with_rewrites(self, rewrites: Sequence[Optional[str]]) -> DocumentStore:
        return DocumentStore(
            self.doc_id,
            tuple(replace(s, rewritten=r, embedding=None) for s, r in zip(self.sentences, rewrites)),
        )

    @property
    def has_embeddings(self) -> bool:
        return bool(self.sentences) and all(s.embedding is not None for s in self.sentences)

    def embedding_matrix(self) -> np.ndarray:
        return np.vstack([s.embedding for s in self.sentences])


def embed_store(store: DocumentStore, embedder: Embedder) -> DocumentStore:
    """Attach embeddings of the search text; all vectors share one dimension and unit (or zero) norm."""
    if not store.sentences:
        return store
    vectors = embedder.embed([s.search_text for s in store.sentences])
    if vectors.shape[0] != len(store.sentences):
        raise ConfigurationError(
            f"embedder returned {vectors.shape[0]} vectors for {len(store.sentences)} sentences"
        )
    return DocumentStore(
        store.doc_id,
        tuple(replace(s, embedding=vectors[i]) for i, s in enumerate(store.sentences)),
    )
