"""Corpus statistics: size, token counts and table shape"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

from src.dataset.records import DocumentRecord, QaTriple
from src.tables.html_io import parse_html_table


class CorpusStats(BaseModel):
    triples: int
    documents: int
    mean_input_tokens: Optional[float] = None
    mean_question_tokens: float
    mean_rows: float
    mean_cols: float
    flat_tables: int
    hierarchical_tables: int

    def to_text(self) -> str:
        frame = pd.DataFrame(
            [
                ("Triples", self.triples),
                ("Documents", self.documents),
                ("Avg input tokens", "-" if self.mean_input_tokens is None else f"{self.mean_input_tokens:.1f}"),
                ("Avg question tokens", f"{self.mean_question_tokens:.1f}"),
                ("Avg rows", f"{self.mean_rows:.1f}"),
                ("Avg columns", f"{self.mean_cols:.1f}"),
                ("Flat tables", self.flat_tables),
                ("Hierarchical tables", self.hierarchical_tables),
            ],
            columns=["Statistic", "Value"],
        )
        return frame.to_string(index=False)


def corpus_stats(
    triples: Sequence[QaTriple], documents: Optional[Mapping[str, DocumentRecord]] = None
) -> CorpusStats:
    """Rows and columns count body cells; tokens are whitespace-separated."""
    rows = []
    for triple in triples:
        table = parse_html_table(triple.table_html)
        doc = documents.get(triple.doc_id) if documents is not None else None
        rows.append(
            {
                "doc_id": triple.doc_id,
                "rows": table.n_rows,
                "cols": table.n_cols,
                "flat": table.is_flat,
                "question_tokens": len(triple.question.split()),
                "input_tokens": sum(len(s.split()) for s in doc.sentences) if doc is not None else None,
            }
        )
    frame = pd.DataFrame(
        rows, columns=["doc_id", "rows", "cols", "flat", "question_tokens", "input_tokens"]
    )
    if frame.empty:
        return CorpusStats(
            triples=0, documents=0, mean_question_tokens=0.0, mean_rows=0.0, mean_cols=0.0,
            flat_tables=0, hierarchical_tables=0,
        )
    input_tokens = frame["input_tokens"].dropna()
    return CorpusStats(
        triples=len(frame),
        documents=int(frame["doc_id"].nunique()),
        mean_input_tokens=float(input_tokens.astype(float).mean()) if len(input_tokens) else None,
        mean_question_tokens=float(frame["question_tokens"].mean()),
        mean_rows=float(frame["rows"].mean()),
        mean_cols=float(frame["cols"].mean()),
        flat_tables=int(frame["flat"].sum()),
        hierarchical_tables=int((~frame["flat"].astype(bool)).sum()),
    )
