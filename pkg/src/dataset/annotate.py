"""Annotation run: match cells, apply reviews, filter, assemble triples"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from src.dataset.filtering import Candidate, filter_tables
from src.dataset.matching import CellMatch, apply_review, match_cells_to_sentences
from src.dataset.questions import build_question_prompt
from src.dataset.records import (
    DocumentRecord,
    ExclusionEntry,
    QaTriple,
    QuestionPromptRecord,
    ReviewEntry,
    TableRecord,
)
from src.errors import DocTabError
from src.retrieval.store import DocumentStore
from src.tables.html_io import parse_html_table, serialize_html

logger = logging.getLogger(__name__)


@dataclass
class AnnotationResult:
    triples: list[QaTriple] = field(default_factory=list)
    excluded: list[ExclusionEntry] = field(default_factory=list)
    question_prompts: list[QuestionPromptRecord] = field(default_factory=list)
    matches: dict[str, list[CellMatch]] = field(default_factory=dict)


def relevant_sentence_ids(matches: Sequence[CellMatch]) -> list[int]:
    return sorted({sid for m in matches if m.counts for sid in m.sentence_ids})


def _decisions(reviews: Sequence[ReviewEntry]) -> dict[str, dict[str, str]]:
    by_table: dict[str, dict[str, str]] = {}
    for review in reviews:
        by_table.setdefault(review.table_id, {})[review.match_id] = review.status
    return by_table


def annotate_corpus(
    documents: Mapping[str, DocumentRecord],
    tables: Sequence[TableRecord],
    reviews: Sequence[ReviewEntry] = (),
    workers: int = 4,
) -> AnnotationResult:
    decisions = _decisions(reviews)
    result = AnnotationResult()

    def candidate_for(record: TableRecord) -> Candidate | ExclusionEntry:
        doc = documents.get(record.doc_id)
        if doc is None:
            return ExclusionEntry(table_id=record.id, doc_id=record.doc_id, body_cells=0,
                                  covered_cells=0, coverage=0.0, reason="unknown document")
        try:
            table = parse_html_table(record.table_html)
        except DocTabError as e:
            logger.warning("table %s does not parse: %s", record.id, e)
            return ExclusionEntry(table_id=record.id, doc_id=record.doc_id, body_cells=0,
                                  covered_cells=0, coverage=0.0, reason=f"unparseable: {e}")
        store = DocumentStore.from_sentences(doc.doc_id, doc.sentences)
        matches = apply_review(match_cells_to_sentences(table, store), decisions.get(record.id, {}))
        return Candidate(record.id, record.doc_id, table, matches)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(candidate_for, tables))

    candidates = []
    for outcome in outcomes:
        if isinstance(outcome, ExclusionEntry):
            result.excluded.append(outcome)
        else:
            candidates.append(outcome)
            result.matches[outcome.table_id] = list(outcome.matches)

    filtered = filter_tables(candidates)
    result.excluded.extend(filtered.excluded)
    questions = {t.id: t.question for t in tables}
    for candidate in filtered.retained:
        question = (questions.get(candidate.table_id) or "").strip()
        if not question:
            result.question_prompts.append(
                QuestionPromptRecord(
                    table_id=candidate.table_id,
                    doc_id=candidate.doc_id,
                    prompt=build_question_prompt(candidate.table),
                )
            )
            continue
        result.triples.append(
            QaTriple(
                id=candidate.table_id,
                doc_id=candidate.doc_id,
                question=question,
                table_html=serialize_html(candidate.table),
                relevant_sentence_ids=relevant_sentence_ids(candidate.matches),
            )
        )
    logger.info(
        "annotated %d tables: %d triples, %d excluded, %d awaiting questions",
        len(tables), len(result.triples), len(result.excluded), len(result.question_prompts),
    )
    return result
