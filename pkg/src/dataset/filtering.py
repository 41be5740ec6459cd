"""Coverage filter: drop tables whose body is mostly unsupported by the document"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from src.dataset.matching import CellMatch
from src.dataset.records import ExclusionEntry
from src.tables.model import HierarchicalTable

logger = logging.getLogger(__name__)

# a table is excluded when this share of its body cells, or more, has no sentence
MAX_UNCOVERED = Fraction(3, 10)


class Candidate(NamedTuple):
    table_id: str
    doc_id: str
    table: HierarchicalTable
    matches: Sequence[CellMatch]


@dataclass
class FilterResult:
    retained: list[Candidate] = field(default_factory=list)
    excluded: list[ExclusionEntry] = field(default_factory=list)


def covered_cells(matches: Sequence[CellMatch]) -> int:
    return len({(m.row, m.col) for m in matches if m.counts})


def coverage_ratio(table: HierarchicalTable, matches: Sequence[CellMatch]) -> Fraction:
    """Exact share of body cells with an auto or confirmed match; header cells are not counted."""
    body_cells = table.n_rows * table.n_cols
    if body_cells == 0:
        return Fraction(0)
    return Fraction(covered_cells(matches), body_cells)


def is_retained(table: HierarchicalTable, matches: Sequence[CellMatch]) -> bool:
    return 1 - coverage_ratio(table, matches) < MAX_UNCOVERED


def filter_tables(candidates: Sequence[Candidate]) -> FilterResult:
    result = FilterResult()
    for candidate in candidates:
        if is_retained(candidate.table, candidate.matches):
            result.retained.append(candidate)
            continue
        ratio = coverage_ratio(candidate.table, candidate.matches)
        entry = ExclusionEntry(
            table_id=candidate.table_id,
            doc_id=candidate.doc_id,
            body_cells=candidate.table.n_rows * candidate.table.n_cols,
            covered_cells=covered_cells(candidate.matches),
            coverage=float(ratio),
        )
        logger.warning(
            "excluding table %s: %d of %d body cells covered", entry.table_id, entry.covered_cells, entry.body_cells
        )
        result.excluded.append(entry)
    return result
