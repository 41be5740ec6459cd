"""Top-K retrieval recall"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from src.errors import UndefinedMetricError


def recall_at_k(ranked: Sequence[int], relevant: Iterable[int], k: int) -> float:
    relevant = set(relevant)
    if not relevant:
        raise UndefinedMetricError("recall@k is undefined for an empty relevant set")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return len(relevant.intersection(ranked[:k])) / len(relevant)


def mean_recall_at_k(
    rankings: Mapping[str, Sequence[int]],
    relevant: Mapping[str, Iterable[int]],
    ks: Sequence[int],
) -> dict[int, float]:
    """Macro-average over questions; questions without relevant sentences are skipped."""
    totals = {k: 0.0 for k in ks}
    counted = 0
    for item_id, ranked in rankings.items():
        gold = set(relevant.get(item_id, ()))
        if not gold:
            continue
        counted += 1
        for k in ks:
            totals[k] += recall_at_k(ranked, gold, k)
    if not counted:
        raise UndefinedMetricError("no question has relevant sentences")
    return {k: totals[k] / counted for k in ks}
