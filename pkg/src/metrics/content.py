"""Content similarity over key-value triples and header-path similarity"""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

from src.errors import ConfigurationError
from src.metrics.chrf import chrf, chrf_similarity
from src.tables.markdown import KEY_SEPARATOR
from src.tables.model import HierarchicalTable, KeyValueTriple, flatten_to_kv

ValueScorer = Callable[[str, str], float]

KEY_MATCH_THRESHOLD = 0.5


@dataclass(frozen=True)
class PairScore:
    groundtruth_key: tuple[tuple[str, ...], tuple[str, ...]]
    generated_key: tuple[tuple[str, ...], tuple[str, ...]] | None
    score: float


@dataclass
class ContentReport:
    pairs: list[PairScore] = field(default_factory=list)
    n_generated: int = 0
    n_groundtruth: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def joined_key(triple: KeyValueTriple) -> str:
    return KEY_SEPARATOR.join(triple.left_key) + " | " + KEY_SEPARATOR.join(triple.top_key)


def greedy_align(
    generated: Sequence[str], groundtruth: Sequence[str], threshold: float
) -> dict[int, tuple[int, float]]:
    """Match ground-truth items to generated items: exact matches first, then by
    descending chrF similarity (ties in document order). Returns gt index -> (gen index, similarity)."""
    matches: dict[int, tuple[int, float]] = {}
    used: set[int] = set()
    for gi, gt in enumerate(groundtruth):
        for ci, gen in enumerate(generated):
            if ci not in used and gen == gt:
                matches[gi] = (ci, 1.0)
                used.add(ci)
                break

    candidates = []
    for gi, gt in enumerate(groundtruth):
        if gi in matches:
            continue
        for ci, gen in enumerate(generated):
            if ci in used:
                continue
            similarity = chrf(gen, gt) / 100.0
            if similarity >= threshold and similarity > 0:
                candidates.append((-similarity, gi, ci))
    for neg_similarity, gi, ci in sorted(candidates):
        if gi in matches or ci in used:
            continue
        matches[gi] = (ci, -neg_similarity)
        used.add(ci)
    return matches


def content_similarity(
    generated: HierarchicalTable,
    groundtruth: HierarchicalTable,
    value_scorer: ValueScorer = chrf_similarity,
) -> ContentReport:
    gen_triples = flatten_to_kv(generated)
    gt_triples = flatten_to_kv(groundtruth)
    matches = greedy_align(
        [joined_key(t) for t in gen_triples], [joined_key(t) for t in gt_triples], KEY_MATCH_THRESHOLD
    )

    report = ContentReport(n_generated=len(gen_triples), n_groundtruth=len(gt_triples))
    total = 0.0
    for gi, gt in enumerate(gt_triples):
        key = (gt.left_key, gt.top_key)
        if gi not in matches:
            report.pairs.append(PairScore(key, None, 0.0))
            continue
        gen = gen_triples[matches[gi][0]]
        score = min(1.0, max(0.0, float(value_scorer(gen.value, gt.value))))
        total += score
        report.pairs.append(PairScore(key, (gen.left_key, gen.top_key), score))

    report.precision = total / len(gen_triples) if gen_triples else 0.0
    report.recall = total / len(gt_triples) if gt_triples else 0.0
    report.f1 = _f1(report.precision, report.recall)
    return report


@dataclass(frozen=True)
class HeaderReport:
    precision: float
    recall: float
    f1: float


def header_similarity(generated: HierarchicalTable, groundtruth: HierarchicalTable, region: str) -> HeaderReport:
    """chrF over aligned leaf key paths of the row ("left") or column ("top") header."""
    if region not in ("left", "top"):
        raise ValueError(f"region must be 'left' or 'top', got {region!r}")
    gen_paths = [KEY_SEPARATOR.join(p) for p in getattr(generated, region).leaf_paths()]
    gt_paths = [KEY_SEPARATOR.join(p) for p in getattr(groundtruth, region).leaf_paths()]
    matches = greedy_align(gen_paths, gt_paths, threshold=0.0)
    total = sum(similarity for _, similarity in matches.values())
    precision = total / len(gen_paths)
    recall = total / len(gt_paths)
    return HeaderReport(precision, recall, _f1(precision, recall))


def load_value_scorer(spec: str | None) -> ValueScorer:
    """Resolve "module:function" to an external scorer such as a BERTScore wrapper."""
    if not spec:
        return chrf_similarity
    module_name, _, attr = spec.partition(":")
    if not attr:
        raise ConfigurationError(f"value scorer must look like 'module:function', got {spec!r}")
    try:
        scorer = getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as e:
        raise ConfigurationError(f"cannot load value scorer {spec!r}: {e}") from e
    if not callable(scorer):
        raise ConfigurationError(f"value scorer {spec!r} is not callable")
    return scorer
