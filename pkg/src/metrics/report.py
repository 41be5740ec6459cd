"""Per-item and corpus evaluation reports"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field

from src.metrics.chrf import chrf_similarity
from src.metrics.content import ValueScorer, content_similarity, header_similarity
from src.metrics.tree_edit import teds
from src.tables.model import HierarchicalTable

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = {
    "teds": "TEDS",
    "content_precision": "Body P",
    "content_recall": "Body R",
    "content_f1": "Body Chrf",
    "left_header_f1": "R Header Chrf",
    "top_header_f1": "C Header Chrf",
    "judge_content": "Judge Body",
    "judge_structure": "Judge Struct",
}


class ItemScores(BaseModel):
    id: str
    status: str = "ok"
    teds: float = 0.0
    content_precision: float = 0.0
    content_recall: float = 0.0
    content_f1: float = 0.0
    left_header_f1: float = 0.0
    top_header_f1: float = 0.0
    judge_content: Optional[float] = None
    judge_structure: Optional[float] = None


class EvaluationReport(BaseModel):
    items: list[ItemScores] = Field(default_factory=list)
    teds: float = 0.0
    content_precision: float = 0.0
    content_recall: float = 0.0
    content_f1: float = 0.0
    left_header_f1: float = 0.0
    top_header_f1: float = 0.0
    header_f1: dict[str, float] = Field(default_factory=dict)
    recall_at_k: dict[str, float] = Field(default_factory=dict)
    judge_content: Optional[float] = None
    judge_structure: Optional[float] = None
    n_items: int = 0
    n_failed: int = 0


def evaluate_pair(
    item_id: str,
    generated: HierarchicalTable | None,
    groundtruth: HierarchicalTable,
    value_scorer: ValueScorer = chrf_similarity,
) -> ItemScores:
    if generated is None:
        return ItemScores(id=item_id, status="missing")
    content = content_similarity(generated, groundtruth, value_scorer)
    return ItemScores(
        id=item_id,
        teds=teds(generated, groundtruth),
        content_precision=content.precision,
        content_recall=content.recall,
        content_f1=content.f1,
        left_header_f1=header_similarity(generated, groundtruth, "left").f1,
        top_header_f1=header_similarity(generated, groundtruth, "top").f1,
    )


def evaluate_corpus(
    items: Sequence[tuple[str, HierarchicalTable | None, HierarchicalTable]],
    value_scorer: ValueScorer = chrf_similarity,
    workers: int = 1,
) -> EvaluationReport:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        scores = list(pool.map(lambda item: evaluate_pair(*item, value_scorer=value_scorer), items))
    return aggregate(scores)


def aggregate(scores: Sequence[ItemScores], recall: dict[int, float] | None = None) -> EvaluationReport:
    report = EvaluationReport(items=list(scores), n_items=len(scores))
    report.n_failed = sum(1 for s in scores if s.status != "ok")
    if scores:
        frame = pd.DataFrame([s.model_dump() for s in scores])
        means = frame.drop(columns=["id", "status"]).mean(numeric_only=True)
        for name in ("teds", "content_precision", "content_recall", "content_f1", "left_header_f1", "top_header_f1"):
            setattr(report, name, float(means[name]))
        for name in ("judge_content", "judge_structure"):
            value = means.get(name)
            if value is not None and not pd.isna(value):
                setattr(report, name, float(value))
    report.header_f1 = {"left": report.left_header_f1, "top": report.top_header_f1}
    if recall:
        report.recall_at_k = {str(k): v for k, v in sorted(recall.items())}
    if report.n_failed:
        logger.warning("%d of %d items had no usable generated table", report.n_failed, report.n_items)
    return report


def summary_table(report: EvaluationReport) -> str:
    """Aligned one-row text table of the corpus scores; judge scores stay on their 0-10 scale, the rest in %."""
    row = {}
    for field, column in SUMMARY_COLUMNS.items():
        value = getattr(report, field)
        if value is None:
            continue
        row[column] = value if field.startswith("judge") else 100.0 * value
    for k, value in report.recall_at_k.items():
        row[f"R@{k}"] = 100.0 * value
    frame = pd.DataFrame([row])
    return frame.to_string(index=False, float_format=lambda x: f"{x:.2f}")
