"""Embedding providers: deterministic character 3-gram hashing and transport-backed"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from src.errors import ProviderError
from src.providers.transcript import Transport

HASH_DIM = 4096


class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """L2-normalize each row; all-zero rows stay zero."""
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


@dataclass(frozen=True)
class HashingEmbedder:
    """Character 3-grams of the padded, case-folded text hashed into a fixed number of buckets.

    Empty text maps to the zero vector, whose cosine with anything is 0.
    """

    dim: int = HASH_DIM
    n: int = 3

    def _bucket(self, gram: str) -> int:
        digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            normalized = " ".join((text or "").casefold().split())
            if not normalized:
                continue
            padded = f" {normalized} "
            for i in range(len(padded) - self.n + 1):
                vectors[row, self._bucket(padded[i:i + self.n])] += 1.0
        return normalize_rows(vectors)


@dataclass
class TransportEmbedder:
    """Wire contract {texts: [...]} -> {vectors: [[...]]}."""

    transport: Transport
    model: str | None = None

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, 0))
        payload = {"texts": list(texts)}
        if self.model:
            payload["model"] = self.model
        response = self.transport(payload)
        vectors = response.get("vectors")
        if vectors is None and "data" in response:
            vectors = [item["embedding"] for item in response["data"]]
        if not vectors or len(vectors) != len(texts):
            raise ProviderError(f"embedding response has {len(vectors or [])} vectors for {len(texts)} texts")
        dims = {len(v) for v in vectors}
        if len(dims) != 1:
            raise ProviderError(f"embedding dimension drifts within a batch: {sorted(dims)}")
        return normalize_rows(np.asarray(vectors, dtype=np.float64))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)
