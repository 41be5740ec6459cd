"""Read model responses back into plans, fill fragments and tables"""

from __future__ import annotations

import json
import logging
import re
from typing import Optional, Sequence

from pydantic import BaseModel, TypeAdapter, ValidationError, field_validator

from src.errors import DocTabError, ResponseParseError
from src.generation.plan import CellRef, FillRecord, FillTrace, StructurePlan
from src.tables.html_io import find_single_table, parse_html_table
from src.tables.model import HierarchicalTable, normalize_text

logger = logging.getLogger(__name__)

FENCE_RE = re.compile(r"```[ \t]*([A-Za-z]*)[ \t]*\n(.*?)```", re.DOTALL)


def extract_fenced_block(response: str, lang: str) -> str:
    """First fenced block tagged `lang`, else the first untagged block."""
    blocks = FENCE_RE.findall(response or "")
    for tag, body in blocks:
        if tag.lower() == lang:
            return body.strip()
    for tag, body in blocks:
        if not tag:
            return body.strip()
    raise ResponseParseError(f"response has no fenced {lang} block")


def _parse_table_block(block: str) -> HierarchicalTable:
    try:
        return parse_html_table(block)
    except DocTabError as e:
        raise ResponseParseError(f"table in the response is not usable: {e}") from e


def _declared(tag, name: str) -> int:
    raw = tag.get(name)
    if raw is None:
        raise ResponseParseError(f"skeleton table has no {name} attribute")
    try:
        return int(str(raw).strip())
    except ValueError:
        raise ResponseParseError(f"{name}={raw!r} is not an integer") from None


def parse_structure_response(response: str) -> StructurePlan:
    block = extract_fenced_block(response, "html")
    try:
        table_tag = find_single_table(block)
    except DocTabError as e:
        raise ResponseParseError(str(e)) from e
    rows = _declared(table_tag, "data-rows")
    cols = _declared(table_tag, "data-cols")
    table = _parse_table_block(block)
    # raises PlanVerificationError on a dimension mismatch
    return StructurePlan(table.left, table.top, table.stub_header, rows, cols)


class FillAnswer(BaseModel):
    cell: str
    query: str = ""
    value: str = ""
    sources: list[int] = []
    conversion: Optional[str] = None

    @field_validator("value", "query", mode="before")
    @classmethod
    def _text(cls, v):
        return "" if v is None else str(v)

    @field_validator("sources", mode="before")
    @classmethod
    def _sources(cls, v):
        return [] if v is None else v


FILL_ANSWERS = TypeAdapter(list[FillAnswer])


def parse_fill_response(
    response: str, plan: StructurePlan, batch: Sequence[CellRef], sentence_ids: Sequence[int]
) -> FillTrace:
    """One record per batch cell. `sentence_ids` are the retrieved ids in prompt order,
    so citation n maps to sentence_ids[n - 1]."""
    block = extract_fenced_block(response, "json")
    try:
        answers = FILL_ANSWERS.validate_python(json.loads(block))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ResponseParseError(f"fill answer list is malformed: {e}") from e

    wanted = {plan.locate(c.left_coord, c.top_coord).cell_id: c for c in batch}
    by_cell: dict[str, FillAnswer] = {}
    for answer in answers:
        if answer.cell not in wanted:
            logger.warning("ignoring answer for cell %s outside the batch", answer.cell)
            continue
        by_cell.setdefault(answer.cell, answer)

    records = []
    for cell_id, cell in wanted.items():
        answer = by_cell.get(cell_id)
        if answer is None:
            logger.warning("cell %s missing from the fill response", cell_id)
            records.append(FillRecord(cell, filled=False, warnings=("no answer in the response",)))
            continue
        cited, warnings = [], []
        for number in answer.sources:
            if 1 <= number <= len(sentence_ids):
                if sentence_ids[number - 1] not in cited:
                    cited.append(sentence_ids[number - 1])
            else:
                warnings.append(f"dropped citation {number}: only {len(sentence_ids)} sentences were given")
        for w in warnings:
            logger.warning("cell %s: %s", cell_id, w)
        records.append(
            FillRecord(
                cell,
                query=normalize_text(answer.query),
                sentence_ids=tuple(cited),
                value=normalize_text(answer.value),
                conversion=answer.conversion or None,
                warnings=tuple(warnings),
            )
        )
    return FillTrace(records)


def parse_table_response(response: str) -> HierarchicalTable:
    return _parse_table_block(extract_fenced_block(response, "html"))
