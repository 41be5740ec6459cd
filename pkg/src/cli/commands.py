"""Command implementations: each reads the on-disk formats, runs a stage, writes its artifacts.

Commands return a status dict; failures surface as DocTabError and are turned into an
error status by the entry point.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from src.config import RunConfig
from src.dataset.annotate import annotate_corpus
from src.dataset.records import (
    DocumentRecord,
    GeneratedRecord,
    QaTriple,
    ReviewEntry,
    TableRecord,
    read_jsonl,
    write_json,
    write_jsonl,
    write_text,
)
from src.dataset.stats import corpus_stats
from src.errors import AssemblyError, ConfigurationError, DocTabError, ResponseParseError, StageFailure
from src.generation.plan import FillTrace
from src.generation.prompts import Exemplar
from src.generation.tabtalk import run_direct, run_oneshot, run_tabtalk
from src.metrics.content import load_value_scorer
from src.metrics.judge import build_judge_prompt, parse_judge_response
from src.metrics.recall import mean_recall_at_k
from src.metrics.report import aggregate, evaluate_pair, summary_table
from src.providers.chat import ChatProvider, ChatRequest
from src.providers.factory import Providers, build_providers
from src.retrieval.llm_ranker import rank_by_llm_relevance
from src.retrieval.rewrite import rewrite_question, rewrite_sentences
from src.retrieval.search import RetrievalRecord, retrieve_top_k
from src.retrieval.store import DocumentStore
from src.tables.html_io import parse_html_table, serialize_html

logger = logging.getLogger(__name__)


class TableItem(BaseModel):
    """Any JSONL line carrying an id and a table: triples and generated records both qualify."""

    id: str
    table_html: Optional[str] = None
    status: str = "ok"


def load_stores(path: Path | str) -> dict[str, DocumentStore]:
    return {
        doc.doc_id: DocumentStore.from_sentences(doc.doc_id, doc.sentences)
        for doc in read_jsonl(path, DocumentRecord)
    }


def load_exemplar(path: Optional[Path]) -> Optional[Exemplar]:
    """Exemplar file: JSON {"question": ..., "table_html": ...}."""
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return data["question"], parse_html_table(data["table_html"])
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read exemplar {path}: {e}") from e


def _store_for(stores: dict[str, DocumentStore], doc_id: str) -> DocumentStore:
    try:
        return stores[doc_id]
    except KeyError:
        raise ConfigurationError(f"no document {doc_id!r} in the documents file") from None


def cmd_annotate(
    docs: Path, tables: Path, out: Path, reviews: Optional[Path] = None, workers: int = 4
) -> dict:
    documents = {d.doc_id: d for d in read_jsonl(docs, DocumentRecord)}
    table_records = read_jsonl(tables, TableRecord)
    review_entries = read_jsonl(reviews, ReviewEntry) if reviews else []
    print(f"Annotating {len(table_records)} tables against {len(documents)} documents...")

    result = annotate_corpus(documents, table_records, review_entries, workers)
    out = Path(out)
    write_jsonl(out / "triples.jsonl", result.triples)
    write_jsonl(out / "exclusions.jsonl", result.excluded)
    write_jsonl(out / "question_prompts.jsonl", result.question_prompts)
    write_jsonl(
        out / "matches.jsonl",
        [
            {
                "table_id": table_id,
                "match_id": m.match_id,
                "sentence_ids": list(m.sentence_ids),
                "kind": m.kind,
                "status": m.status,
                "matched_token": m.matched_token,
                "sign_flips": list(m.sign_flips),
            }
            for table_id, matches in result.matches.items()
            for m in matches
        ],
    )
    print(f"✓ Wrote {len(result.triples)} triples, excluded {len(result.excluded)} tables")
    if result.question_prompts:
        print(f"  {len(result.question_prompts)} retained tables still need a question")
    return {
        "status": "success",
        "triples": len(result.triples),
        "excluded": len(result.excluded),
        "awaiting_questions": len(result.question_prompts),
    }


def retrieve_records(
    stores: dict[str, DocumentStore], triples: list[QaTriple], config: RunConfig, providers: Providers
) -> list[RetrievalRecord]:
    depth = max([config.k, *config.recall_ks])

    if config.retriever == "llm":
        if providers.llm is None:
            raise ConfigurationError("the llm retriever needs an llm provider")

        def rank(triple: QaTriple) -> RetrievalRecord:
            record = rank_by_llm_relevance(_store_for(stores, triple.doc_id), triple.question, providers.llm, depth)
            record.id = triple.id
            return record
    else:
        needed = sorted({t.doc_id for t in triples})
        rewritten = {
            doc_id: rewrite_sentences(_store_for(stores, doc_id), providers.rewriter, config.workers)
            for doc_id in needed
        }

        def rank(triple: QaTriple) -> RetrievalRecord:
            rewrite = rewrite_question(triple.question, providers.rewriter)
            record = retrieve_top_k(
                rewritten[triple.doc_id], rewrite.sub_questions, providers.embedder,
                k=depth, merge=config.merge, question=triple.question,
            )
            record.id = triple.id
            record.degraded = rewrite.degraded
            return record

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(rank, triples))


def truncate_record(record: RetrievalRecord, k: int) -> RetrievalRecord:
    """Keep the top k of a record ranked deeper for recall scoring."""
    return record.model_copy(
        update={"k": k, "merged": record.merged[:k], "rankings": [ranking[:k] for ranking in record.rankings]}
    )


def recall_report(records: list[RetrievalRecord], triples: list[QaTriple], ks: list[int]) -> dict[int, float]:
    return mean_recall_at_k(
        {r.id: r.ranked_ids for r in records},
        {t.id: t.relevant_sentence_ids for t in triples},
        ks,
    )


def cmd_retrieve(
    docs: Path, triples: Path, out: Path, config: RunConfig, providers: Optional[Providers] = None
) -> dict:
    stores = load_stores(docs)
    items = read_jsonl(triples, QaTriple)
    providers = providers or build_providers(config, need_llm=config.retriever == "llm")
    print(f"Retrieving top-{config.k} sentences for {len(items)} questions...")

    records = retrieve_records(stores, items, config, providers)
    recall = recall_report(records, items, config.recall_ks)
    out = Path(out)
    write_jsonl(out / "retrieval.jsonl", [truncate_record(r, config.k) for r in records])
    write_json(
        out / "recall.json",
        {
            "recall_at_k": {str(k): v for k, v in sorted(recall.items())},
            "questions": len(records),
            "degraded_rewrites": sum(1 for r in records if r.degraded),
        },
    )
    print("✓ " + "  ".join(f"R@{k}={100 * v:.2f}" for k, v in sorted(recall.items())))
    return {"status": "success", "questions": len(records), "recall_at_k": {str(k): v for k, v in recall.items()}}


def generate_records(
    stores: dict[str, DocumentStore],
    triples: list[QaTriple],
    retrieval: dict[str, RetrievalRecord],
    config: RunConfig,
    llm: ChatProvider,
    exemplar: Optional[Exemplar] = None,
) -> list[GeneratedRecord]:
    mode = config.generation_mode

    def generate(triple: QaTriple) -> GeneratedRecord:
        base = {"id": triple.id, "doc_id": triple.doc_id, "question": triple.question, "mode": mode}
        store = _store_for(stores, triple.doc_id)
        if mode == "oneshot":
            sentences = list(store.sentences)
        else:
            record = retrieval.get(triple.id)
            if record is None:
                return GeneratedRecord(**base, status="failed", stage="retrieval", error="no retrieval record")
            ranked = record.ranked_ids[:config.k]
            outside = [i for i in ranked if not 0 <= i < len(store.sentences)]
            if outside:
                return GeneratedRecord(
                    **base, status="failed", stage="retrieval",
                    error=f"sentence ids {outside} are outside document {triple.doc_id!r} ({len(store.sentences)} sentences)",
                )
            sentences = [store.sentences[i] for i in ranked]
        if not sentences:
            return GeneratedRecord(**base, status="failed", stage="retrieval", error="no sentences to generate from")

        runner = {"tabtalk": run_tabtalk, "direct": run_direct, "oneshot": run_oneshot}[mode]
        try:
            result = runner(triple.question, sentences, llm, config, exemplar)
        except StageFailure as e:
            logger.warning("item %s failed at the %s stage: %s", triple.id, e.stage, e)
            partial = e.partial.get("trace")
            return GeneratedRecord(
                **base, status="failed", stage=e.stage, error=str(e), retries=e.retries,
                trace=partial.to_dicts() if isinstance(partial, FillTrace) else [],
            )
        except AssemblyError as e:
            logger.warning("item %s failed at assembly: %s", triple.id, e)
            return GeneratedRecord(**base, status="failed", stage="assembly", error=str(e))
        return GeneratedRecord(
            **base,
            table_html=serialize_html(result.table),
            retries=result.retries,
            trace=result.trace.to_dicts() if result.trace is not None else [],
        )

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(generate, triples))


def cmd_generate(
    docs: Path,
    triples: Path,
    out: Path,
    config: RunConfig,
    retrieval: Optional[Path] = None,
    providers: Optional[Providers] = None,
) -> dict:
    stores = load_stores(docs)
    items = read_jsonl(triples, QaTriple)
    if config.generation_mode != "oneshot" and retrieval is None:
        raise ConfigurationError(f"{config.generation_mode} generation needs --retrieval records")
    records = {r.id: r for r in read_jsonl(retrieval, RetrievalRecord)} if retrieval else {}
    providers = providers or build_providers(config)
    print(f"Generating {len(items)} tables ({config.generation_mode})...")

    generated = generate_records(stores, items, records, config, providers.llm, load_exemplar(config.exemplar))
    write_jsonl(Path(out) / "generated.jsonl", generated)
    failed = sum(1 for g in generated if g.status != "ok")
    print(f"✓ Generated {len(generated) - failed} tables, {failed} failed")
    return {"status": "success", "generated": len(generated) - failed, "failed": failed}


def _parse_or_none(item: Optional[TableItem]):
    if item is None or item.status != "ok" or not item.table_html:
        return None
    try:
        return parse_html_table(item.table_html)
    except DocTabError as e:
        logger.warning("generated table %s does not parse: %s", item.id, e)
        return None


def evaluate_items(
    generated: list[TableItem],
    groundtruth: list[TableItem],
    value_scorer_spec: Optional[str] = None,
    judge: Optional[ChatProvider] = None,
    recall: Optional[dict[int, float]] = None,
    workers: int = 4,
):
    scorer = load_value_scorer(value_scorer_spec)
    by_id = {g.id: g for g in generated}

    def score(gt: TableItem):
        reference = parse_html_table(gt.table_html or "")
        candidate = _parse_or_none(by_id.get(gt.id))
        scores = evaluate_pair(gt.id, candidate, reference, scorer)
        if judge is not None and candidate is not None:
            try:
                verdict = parse_judge_response(judge.complete(ChatRequest.from_prompt(build_judge_prompt(candidate, reference))))
                scores.judge_content, scores.judge_structure = verdict.content, verdict.structure
            except ResponseParseError as e:
                logger.warning("judge verdict for %s unusable: %s", gt.id, e)
        return scores

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        items = list(pool.map(score, groundtruth))
    return aggregate(items, recall)


def write_report(out: Path, report) -> str:
    out = Path(out)
    write_jsonl(out / "scores.jsonl", report.items)
    write_json(out / "report.json", report.model_dump(mode="json", exclude={"items"}))
    summary = summary_table(report)
    write_text(out / "summary.txt", summary + "\n")
    return summary


def cmd_evaluate(
    generated: Path,
    groundtruth: Path,
    out: Path,
    value_scorer: Optional[str] = None,
    judge: Optional[ChatProvider] = None,
    workers: int = 4,
) -> dict:
    report = evaluate_items(
        read_jsonl(generated, TableItem), read_jsonl(groundtruth, TableItem), value_scorer, judge, workers=workers
    )
    print(write_report(out, report))
    print(f"✓ Evaluated {report.n_items} items ({report.n_failed} without a usable table)")
    return {"status": "success", "teds": report.teds, "content_f1": report.content_f1, "items": report.n_items}


def cmd_stats(triples: Path, docs: Optional[Path] = None) -> dict:
    documents = {d.doc_id: d for d in read_jsonl(docs, DocumentRecord)} if docs else None
    stats = corpus_stats(read_jsonl(triples, QaTriple), documents)
    print(stats.to_text())
    return {"status": "success", **stats.model_dump()}


def cmd_pipeline(config: RunConfig, providers: Optional[Providers] = None) -> dict:
    """retrieve -> generate -> evaluate over config.docs and config.questions (a triples file)."""
    if config.docs is None or config.questions is None:
        raise ConfigurationError("the pipeline needs 'docs' and 'questions' in the config")
    stores = load_stores(config.docs)
    triples = read_jsonl(config.questions, QaTriple)
    providers = providers or build_providers(config)
    out = Path(config.out_dir)
    print(f"Running {config.generation_mode} pipeline on {len(triples)} questions...")

    recall = None
    records: dict[str, RetrievalRecord] = {}
    if config.generation_mode != "oneshot":
        retrieved = retrieve_records(stores, triples, config, providers)
        recall = recall_report(retrieved, triples, config.recall_ks)
        retrieved = [truncate_record(r, config.k) for r in retrieved]
        write_jsonl(out / "retrieval.jsonl", retrieved)
        records = {r.id: r for r in retrieved}
        print(f"✓ Retrieved sentences for {len(retrieved)} questions")

    generated = generate_records(
        stores, triples, records, config, providers.llm, load_exemplar(config.exemplar)
    )
    write_jsonl(out / "generated.jsonl", generated)
    print(f"✓ Generated {sum(1 for g in generated if g.status == 'ok')} tables")

    report = evaluate_items(
        [TableItem(id=g.id, table_html=g.table_html, status=g.status) for g in generated],
        [TableItem(id=t.id, table_html=t.table_html) for t in triples],
        recall=recall,
        workers=config.workers,
    )
    print(write_report(out, report))
    return {
        "status": "success",
        "teds": report.teds,
        "content_f1": report.content_f1,
        "recall_at_k": report.recall_at_k,
        "failed": report.n_failed,
    }