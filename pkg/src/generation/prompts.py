"""Prompt builders for the structure and fill stages and the single-prompt baselines.

Prompts are pure functions of their inputs: identical inputs give byte-identical
text, so replay transcripts keyed on the request stay valid across runs.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from src.generation.plan import CellRef, StructurePlan
from src.tables.html_io import table_tag_for
from src.tables.model import HierarchicalTable

Exemplar = tuple[str, HierarchicalTable]

SYSTEM_PROMPT = (
    "You build tables that answer questions about long documents. "
    "You only use facts stated in the sentences you are given."
)

STRUCTURE_INSTRUCTION = """Design the table that answers the question below. Do not fill in any values yet.

Work from the sub-queries to the main query: first list the individual facts the question asks for,
then decide which of them become row headers and which become column headers, grouping related
headers under a shared parent header where the question implies a hierarchy. Produce the row
headers first, then the column headers, then the dimensions of the table body."""

STRUCTURE_SCHEMA = """Answer with exactly one fenced ```html block holding the empty table skeleton:
- a <table data-rows="R" data-cols="C"> element, R = number of leaf row headers, C = number of leaf column headers;
- header cells as <th>, using rowspan/colspan for parent headers, the top-left cell holding the stub header;
- one empty <td></td> per body cell.
You may reason before the block; only the block is read."""

FILL_INSTRUCTION = """Fill the target cells of the table below using only the numbered sentences.
For every target cell:
1. formulate a precise query from the cell's row header path and column header path;
2. find the sentence or sentences that state the value and cite them by number;
3. verify the value digit by digit against the cited sentence;
4. convert units only when the headers require it, and state the conversion you applied.
If no sentence supports a value, give an empty value and no sources."""

FILL_SCHEMA = """Answer with exactly one fenced ```json block: a list with one object per target cell,
{"cell": "<cell id>", "query": "<your query>", "value": "<cell text>", "sources": [<sentence numbers>], "conversion": "<note>" or null}"""

TABLE_INSTRUCTION = """Answer the question with a table built only from facts in the {source}.
Use multi-level row or column headers (rowspan/colspan) where the question implies a hierarchy.
Answer with exactly one fenced ```html block holding the complete table: header cells as <th>,
the top-left cell holding the stub header, body cells as <td>."""

CORRECTION_TEMPLATE = """Your previous answer could not be used: {error}
Answer again, following the output format exactly."""


def _numbered(sentences: Sequence[str]) -> str:
    return "\n".join(f"{i}. {text}" for i, text in enumerate(sentences, start=1))


def fenced(lang: str, body: str) -> str:
    return f"```{lang}\n{body}\n```"


def skeleton_html(plan: StructurePlan) -> str:
    attrs = {"data-rows": str(plan.rows), "data-cols": str(plan.cols)}
    return str(table_tag_for(plan.skeleton(), with_body=False, attrs=attrs))


def build_structure_prompt(
    question: str, sentences: Sequence[str], exemplar: Optional[Exemplar] = None
) -> str:
    if not sentences:
        raise ValueError("the structure prompt needs at least one sentence")
    parts = [STRUCTURE_INSTRUCTION, STRUCTURE_SCHEMA]
    if exemplar is not None:
        example_question, example_table = exemplar
        parts.append(
            "Example\nQuestion: "
            + example_question
            + "\n"
            + fenced("html", skeleton_html(StructurePlan.from_table(example_table)))
        )
    parts.append(f"Question: {question}")
    parts.append("Sentences:\n" + _numbered(sentences))
    return "\n\n".join(parts) + "\n"


def target_cells(plan: StructurePlan, batch: Sequence[CellRef]) -> list[dict]:
    """Validate the batch against the plan and describe each cell by its key paths."""
    targets = []
    for cell in batch:
        located = plan.locate(cell.left_coord, cell.top_coord)
        row, column = plan.key_paths(located)
        targets.append({"cell": located.cell_id, "row": list(row), "column": list(column)})
    return targets


def build_fill_prompt(
    plan: StructurePlan, question: str, sentences: Sequence[str], batch: Sequence[CellRef]
) -> str:
    if not batch:
        raise ValueError("the fill prompt needs at least one target cell")
    targets = target_cells(plan, batch)
    parts = [
        FILL_INSTRUCTION,
        "Table structure:\n" + fenced("html", skeleton_html(plan)),
        "Target cells:\n" + fenced("json", json.dumps(targets, ensure_ascii=False, indent=1)),
        FILL_SCHEMA,
        f"Question: {question}",
        "Sentences:\n" + _numbered(sentences),
    ]
    return "\n\n".join(parts) + "\n"


def build_table_prompt(
    question: str,
    sentences: Sequence[str],
    exemplar: Optional[Exemplar] = None,
    whole_document: bool = False,
) -> str:
    """Single-prompt generation: retrieved sentences (direct) or the whole document (one-shot)."""
    if not sentences:
        raise ValueError("the table prompt needs at least one sentence")
    source = "document below" if whole_document else "numbered sentences below"
    parts = [TABLE_INSTRUCTION.format(source=source)]
    if exemplar is not None:
        example_question, example_table = exemplar
        parts.append(
            "Example\nQuestion: "
            + example_question
            + "\n"
            + fenced("html", str(table_tag_for(example_table)))
        )
    parts.append(f"Question: {question}")
    if whole_document:
        parts.append("Document:\n" + " ".join(sentences))
    else:
        parts.append("Sentences:\n" + _numbered(sentences))
    return "\n\n".join(parts) + "\n"


def correction_message(error: Exception) -> str:
    return CORRECTION_TEMPLATE.format(error=error)
