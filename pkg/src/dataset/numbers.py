"""Numeric token normalization for matching table cells against sentences"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Optional

CURRENCY = "$€£¥"
MINUS = "-−–"

# thousands groups separated by "," (optionally followed by one space) or a single space
DIGITS = r"\d{1,3}(?:(?:,\s?|\s)\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?"

NUMBER_RE = re.compile(
    rf"(?P<open>\()?(?:(?<!\w)(?P<minus>[{MINUS}]))?(?:[{CURRENCY}]\s?(?P<minus2>[{MINUS}])?)?"
    rf"(?<![\d.,])(?P<digits>{DIGITS})(?![\d])(?P<pct>\s?%)?(?P<close>\))?"
)
CELL_RE = re.compile(
    rf"^\s*(?P<open>\()?\s*(?P<minus>[{MINUS}])?\s*[{CURRENCY}]?\s*(?P<minus2>[{MINUS}])?\s*"
    rf"(?P<digits>{DIGITS})\s*(?P<pct>%)?\s*(?P<close>\))?\s*$"
)


@dataclass(frozen=True)
class NumericToken:
    magnitude: str
    negative: bool
    text: str


def _magnitude(digits: str) -> Optional[str]:
    try:
        value = Decimal(re.sub(r"[,\s]", "", digits))
    except InvalidOperation:
        return None
    return format(value.normalize(), "f")


def _token(match: re.Match) -> Optional[NumericToken]:
    magnitude = _magnitude(match.group("digits"))
    if magnitude is None:
        return None
    parenthesized = bool(match.group("open")) and bool(match.group("close"))
    negative = parenthesized or bool(match.group("minus") or match.group("minus2"))
    return NumericToken(magnitude, negative and magnitude != "0", match.group(0).strip())


def parse_number(text: str) -> Optional[NumericToken]:
    """A cell is numeric only if the whole of it is one number (sign, currency, % allowed)."""
    match = CELL_RE.match(text or "")
    if not match or bool(match.group("open")) != bool(match.group("close")):
        return None
    return _token(match)


def find_numbers(text: str) -> list[NumericToken]:
    tokens = []
    for match in NUMBER_RE.finditer(text or ""):
        token = _token(match)
        if token is not None:
            tokens.append(token)
    return tokens
