from pathlib import Path

import pytest
from hypothesis import settings

from src.dataset.records import DocumentRecord, QaTriple, read_jsonl
from src.retrieval.store import DocumentStore
from src.tables.html_io import parse_html_table

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def fig2_html():
    return (FIXTURES / "fig2.html").read_text(encoding="utf-8")


@pytest.fixture
def fig2_table(fig2_html):
    return parse_html_table(fig2_html)


@pytest.fixture
def mini_store():
    (doc,) = read_jsonl(FIXTURES / "minicorpus_docs.jsonl", DocumentRecord)
    return DocumentStore.from_sentences(doc.doc_id, doc.sentences)


@pytest.fixture
def mini_triples():
    return read_jsonl(FIXTURES / "minicorpus_triples.jsonl", QaTriple)


@pytest.fixture
def mini_tables(mini_triples):
    return {t.question: parse_html_table(t.table_html) for t in mini_triples}
