"""LLM-judge prompt for content and structure similarity on a 0-10 scale"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from src.errors import ResponseParseError
from src.tables.html_io import serialize_html
from src.tables.model import HierarchicalTable

JUDGE_INSTRUCTION = """You are grading a generated table against a reference table.
Score two aspects from 0 (nothing in common) to 10 (identical):
- content: do the body cells carry the same values under the same row and column headers?
- structure: do the row and column header hierarchies match?
Answer with a JSON object only: {"content": <number>, "structure": <number>}"""


@dataclass(frozen=True)
class JudgeScore:
    content: float
    structure: float


def build_judge_prompt(generated: HierarchicalTable, reference: HierarchicalTable) -> str:
    return (
        f"{JUDGE_INSTRUCTION}\n\n"
        f"Reference table:\n{serialize_html(reference)}\n\n"
        f"Generated table:\n{serialize_html(generated)}\n"
    )


def parse_judge_response(response: str) -> JudgeScore:
    match = re.search(r"\{.*?\}", response or "", re.DOTALL)
    if not match:
        raise ResponseParseError("judge response has no JSON object")
    try:
        data = json.loads(match.group(0))
        content = float(data["content"])
        structure = float(data["structure"])
    except (ValueError, KeyError, TypeError) as e:
        raise ResponseParseError(f"judge response is malformed: {e}") from e
    clamp = lambda x: min(10.0, max(0.0, x))
    return JudgeScore(clamp(content), clamp(structure))
