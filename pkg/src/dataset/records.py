"""On-disk record schemas and JSONL / JSON file I/O"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Literal, Optional, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator

from src.errors import InputFormatError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


class DocumentRecord(BaseModel):
    doc_id: str
    sentences: list[str]


class TableRecord(BaseModel):
    id: str
    doc_id: str
    table_html: str
    question: Optional[str] = None


class QaTriple(BaseModel):
    id: str
    doc_id: str
    question: str
    table_html: str
    relevant_sentence_ids: list[int] = Field(min_length=1)

    @field_validator("question")
    @classmethod
    def _non_blank(cls, question: str) -> str:
        if not question.strip():
            raise ValueError("question must not be blank")
        return question

    @field_validator("relevant_sentence_ids")
    @classmethod
    def _sorted_unique(cls, ids: list[int]) -> list[int]:
        if any(i < 0 for i in ids):
            raise ValueError("sentence ids must be non-negative")
        return sorted(set(ids))


class ReviewEntry(BaseModel):
    table_id: str
    match_id: str
    status: Literal["confirmed", "rejected"]


class ExclusionEntry(BaseModel):
    table_id: str
    doc_id: str = ""
    body_cells: int
    covered_cells: int
    coverage: float
    reason: str = "uncovered"


class QuestionPromptRecord(BaseModel):
    table_id: str
    doc_id: str
    prompt: str


class GeneratedRecord(BaseModel):
    id: str
    doc_id: str
    question: str
    mode: str
    status: Literal["ok", "failed"] = "ok"
    table_html: Optional[str] = None
    retries: int = 0
    trace: list[dict] = Field(default_factory=list)
    stage: Optional[str] = None
    error: Optional[str] = None


def read_jsonl(path: Path | str, model: Type[M]) -> list[M]:
    """Parse one record per non-blank line; errors name the file, the 1-based line and the field."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise InputFormatError(path, 0, "<file>", str(e)) from e
    records = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise InputFormatError(path, number, "<json>", e.msg) from e
        try:
            records.append(model.model_validate(data))
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first["loc"]) or "<record>"
            raise InputFormatError(path, number, field, first["msg"]) from e
    return records


def dumps(data) -> str:
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return json.dumps(data, sort_keys=True, ensure_ascii=False)


def write_text(path: Path | str, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s", path)
    return path


def write_jsonl(path: Path | str, records: Iterable) -> Path:
    return write_text(path, "".join(dumps(r) + "\n" for r in records))


def write_json(path: Path | str, data) -> Path:
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return write_text(path, json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2) + "\n")
