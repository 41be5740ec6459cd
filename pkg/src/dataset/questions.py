"""Question drafting prompts for retained tables"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Literal

from src.errors import ResponseParseError
from src.tables.html_io import serialize_html
from src.tables.markdown import KEY_SEPARATOR
from src.tables.model import HierarchicalTable, normalize_text

QuestionStatus = Literal["generated", "refined", "accepted"]

QUESTION_INSTRUCTION = """Write questions about a long financial document whose complete answer is exactly the table below:
every row header and column header must be needed to answer the question, and nothing outside the table.
Mention the entities, metrics and periods by the names the headers use.
Answer with a JSON list of question strings only."""


@dataclass(frozen=True)
class QuestionDraft:
    text: str
    status: QuestionStatus = "generated"


def build_question_prompt(table: HierarchicalTable) -> str:
    rows = "\n".join(f"- {KEY_SEPARATOR.join(path)}" for path in table.left.leaf_paths())
    columns = "\n".join(f"- {KEY_SEPARATOR.join(path)}" for path in table.top.leaf_paths())
    return (
        f"{QUESTION_INSTRUCTION}\n\n"
        f"Table:\n{serialize_html(table)}\n\n"
        f"Row header paths:\n{rows}\n\n"
        f"Column header paths:\n{columns}\n"
    )


def parse_question_response(response: str) -> list[QuestionDraft]:
    match = re.search(r"\[.*\]", response or "", re.DOTALL)
    if not match:
        raise ResponseParseError("question response has no JSON list")
    try:
        items = json.loads(match.group(0))
    except json.JSONDecodeError as e:
        raise ResponseParseError(f"question list is not valid JSON: {e}") from e
    drafts = []
    for item in items:
        text = normalize_text(str(item))
        if text and text not in {d.text for d in drafts}:
            drafts.append(QuestionDraft(text))
    return drafts
