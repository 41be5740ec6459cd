"""TabTalk prompt chain (structure, then fill) and the single-prompt baselines"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple, Optional, Sequence, TypeVar

from src.config import RunConfig
from src.errors import ResponseParseError, StageFailure
from src.generation.assemble import assemble_table
from src.generation.parsing import parse_fill_response, parse_structure_response, parse_table_response
from src.generation.plan import CellRef, FillTrace, StructurePlan
from src.generation.prompts import (
    SYSTEM_PROMPT,
    Exemplar,
    build_fill_prompt,
    build_structure_prompt,
    build_table_prompt,
    correction_message,
)
from src.providers.chat import ChatMessage, ChatProvider, ChatRequest
from src.retrieval.store import Sentence
from src.tables.model import HierarchicalTable

logger = logging.getLogger(__name__)

T = TypeVar("T")


class TabTalkResult(NamedTuple):
    table: HierarchicalTable
    trace: Optional[FillTrace]
    plan: StructurePlan
    retries: int


def complete_with_retry(
    llm: ChatProvider,
    request: ChatRequest,
    parse: Callable[[str], T],
    stage: str,
    max_retries: int,
    partial: Optional[dict] = None,
) -> tuple[T, int]:
    """Ask, parse, and on a retryable parse error re-ask with the error appended to the conversation."""
    retries = 0
    while True:
        response = llm.complete(request)
        try:
            return parse(response), retries
        except ResponseParseError as e:
            if retries >= max_retries:
                raise StageFailure(stage, e, retries, {**(partial or {}), "response": response}) from e
            retries += 1
            logger.warning("%s response rejected (attempt %d): %s", stage, retries, e)
            request = request.followed_by(
                ChatMessage("assistant", response), ChatMessage("user", correction_message(e))
            )


def _settings(config: Optional[RunConfig]) -> RunConfig:
    return config if config is not None else RunConfig()


def _request(prompt: str, llm_config) -> ChatRequest:
    return ChatRequest.from_prompt(
        prompt, system=SYSTEM_PROMPT, temperature=llm_config.temperature, max_tokens=llm_config.max_tokens
    )


def run_tabtalk(
    question: str,
    sentences: Sequence[Sentence],
    llm: ChatProvider,
    config: Optional[RunConfig] = None,
    exemplar: Optional[Exemplar] = None,
) -> TabTalkResult:
    config = _settings(config)
    texts = [s.text for s in sentences]
    ids = [s.sentence_id for s in sentences]

    plan, structure_retries = complete_with_retry(
        llm,
        _request(build_structure_prompt(question, texts, exemplar), config.llm),
        parse_structure_response,
        "structure",
        config.max_retries,
    )
    logger.info("planned a %dx%d table", plan.rows, plan.cols)

    def fill(batch: list[CellRef]) -> FillTrace:
        fragment, retries = complete_with_retry(
            llm,
            _request(build_fill_prompt(plan, question, texts, batch), config.llm),
            lambda response: parse_fill_response(response, plan, batch, ids),
            "fill",
            config.max_retries,
            partial={"plan": plan, "batch": [c.cell_id for c in batch]},
        )
        fragment.retries = retries
        return fragment

    batches = plan.batches(config.fill_batch_size)
    fragments: list[FillTrace] = []
    failure: Optional[StageFailure] = None
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(fill, batch) for batch in batches]
        # submission order, not completion order
        for future in futures:
            try:
                fragments.append(future.result())
            except StageFailure as e:
                failure = failure or e
    if failure is not None:
        completed = FillTrace.merge(fragments)
        raise StageFailure(
            "fill",
            failure.cause,
            failure.retries,
            {**failure.partial, "trace": completed},
        )

    trace = FillTrace.merge(fragments)
    trace.retries += structure_retries
    table = assemble_table(plan, trace)
    return TabTalkResult(table, trace, plan, trace.retries)


def _run_single_prompt(
    question: str,
    sentences: Sequence[Sentence],
    llm: ChatProvider,
    config: Optional[RunConfig],
    exemplar: Optional[Exemplar],
    whole_document: bool,
    stage: str,
) -> TabTalkResult:
    config = _settings(config)
    prompt = build_table_prompt(question, [s.text for s in sentences], exemplar, whole_document)
    table, retries = complete_with_retry(
        llm, _request(prompt, config.llm), parse_table_response, stage, config.max_retries
    )
    return TabTalkResult(table, None, StructurePlan.from_table(table), retries)


def run_direct(
    question: str,
    sentences: Sequence[Sentence],
    llm: ChatProvider,
    config: Optional[RunConfig] = None,
    exemplar: Optional[Exemplar] = None,
) -> TabTalkResult:
    """One prompt over the retrieved sentences."""
    return _run_single_prompt(question, sentences, llm, config, exemplar, False, "direct")


def run_oneshot(
    question: str,
    document: Sequence[Sentence],
    llm: ChatProvider,
    config: Optional[RunConfig] = None,
    exemplar: Optional[Exemplar] = None,
) -> TabTalkResult:
    """One prompt over the whole document, no retrieval."""
    return _run_single_prompt(question, document, llm, config, exemplar, True, "oneshot")
