"""Question decomposition and sentence rewriting with graceful fallback"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from src.errors import ProviderError, TranscriptMissError
from src.providers.rewrite import Rewriter
from src.retrieval.store import DocumentStore
from src.tables.model import normalize_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuestionRewrite:
    question: str
    sub_questions: tuple[str, ...]
    degraded: bool = False


def rewrite_question(question: str, rewriter: Rewriter) -> QuestionRewrite:
    question = normalize_text(question)
    if not question:
        raise ValueError("cannot rewrite an empty question")
    try:
        outputs = rewriter.rewrite("question", question)
    except TranscriptMissError:
        raise
    except ProviderError as e:
        logger.warning("question rewrite failed, using the original question: %s", e)
        return QuestionRewrite(question, (question,), degraded=True)

    sub_questions = []
    for output in outputs:
        text = normalize_text(output)
        if text and text not in sub_questions:
            sub_questions.append(text)
    if not sub_questions:
        logger.warning("question rewrite returned nothing, using the original question")
        return QuestionRewrite(question, (question,), degraded=True)
    return QuestionRewrite(question, tuple(sub_questions))


def rewrite_sentences(store: DocumentStore, rewriter: Rewriter, workers: int = 4) -> DocumentStore:
    """Rewrite every sentence; a failed sentence keeps only its raw text and the batch carries on."""

    def rewrite_one(text: str) -> Optional[str]:
        try:
            outputs = rewriter.rewrite("sentence", text)
        except TranscriptMissError:
            raise
        except ProviderError as e:
            logger.debug("sentence rewrite failed: %s", e)
            return None
        rewritten = normalize_text(" ".join(outputs))
        return rewritten or None

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rewrites = list(pool.map(rewrite_one, store.texts()))
    failures = sum(1 for r in rewrites if r is None)
    if failures:
        logger.warning("%d of %d sentences in %s kept their raw text", failures, len(rewrites), store.doc_id)
    return store.with_rewrites(rewrites)
