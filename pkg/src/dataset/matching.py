"""Regex matching of table body cells against document sentences, and review decisions"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from typing import Literal, Mapping, Optional, Sequence

from src.dataset.numbers import NumericToken, find_numbers, parse_number
from src.retrieval.store import DocumentStore
from src.tables.model import HierarchicalTable, TreeCoord, normalize_text

logger = logging.getLogger(__name__)

MatchKind = Literal["numeric", "textual"]
ReviewStatus = Literal["auto", "confirmed", "rejected"]


@dataclass(frozen=True)
class CellMatch:
    left_coord: TreeCoord
    top_coord: TreeCoord
    row: int
    col: int
    sentence_ids: tuple[int, ...]
    kind: MatchKind
    status: ReviewStatus = "auto"
    matched_token: Optional[str] = None
    # sentence ids whose number matched only in magnitude
    sign_flips: tuple[int, ...] = ()

    @property
    def match_id(self) -> str:
        return f"r{self.row}c{self.col}"

    @property
    def counts(self) -> bool:
        return self.status != "rejected" and bool(self.sentence_ids)


def _phrase_re(text: str) -> re.Pattern:
    return re.compile(r"(?<!\w)" + re.escape(text.lower()) + r"(?!\w)")


def _numeric_hits(cell: NumericToken, sentences: Sequence[list[NumericToken]]) -> tuple[list[int], list[int]]:
    hits, flips = [], []
    for sid, tokens in enumerate(sentences):
        same = [t for t in tokens if t.magnitude == cell.magnitude]
        if not same:
            continue
        hits.append(sid)
        if all(t.negative != cell.negative for t in same):
            flips.append(sid)
    return hits, flips


def match_cells_to_sentences(table: HierarchicalTable, store: DocumentStore) -> list[CellMatch]:
    """Every body cell with at least one candidate sentence, row-major. All candidates are kept."""
    lowered = [normalize_text(s.text).lower() for s in store.sentences]
    numbers = [find_numbers(s.text) for s in store.sentences]
    n_cols = table.n_cols

    matches = []
    for index, (left_coord, top_coord, text) in enumerate(table.cells()):
        if not text:
            continue
        row, col = divmod(index, n_cols)
        token = parse_number(text)
        if token is not None:
            hits, flips = _numeric_hits(token, numbers)
            if hits:
                matches.append(
                    CellMatch(left_coord, top_coord, row, col, tuple(hits), "numeric",
                              matched_token=token.magnitude, sign_flips=tuple(flips))
                )
            continue
        pattern = _phrase_re(text)
        hits = [sid for sid, sentence in enumerate(lowered) if pattern.search(sentence)]
        if hits:
            matches.append(CellMatch(left_coord, top_coord, row, col, tuple(hits), "textual"))
    return matches


def apply_review(matches: Sequence[CellMatch], decisions: Mapping[str, ReviewStatus]) -> list[CellMatch]:
    """Set review status by match id; decisions for unknown ids are logged and ignored."""
    known = {m.match_id for m in matches}
    for match_id in sorted(set(decisions) - known):
        logger.warning("review decision for unknown match %s ignored", match_id)
    return [replace(m, status=decisions[m.match_id]) if m.match_id in decisions else m for m in matches]
