"""Final assembly and format verification of a generated table"""

from __future__ import annotations

import logging

from src.errors import AssemblyError
from src.generation.plan import FillTrace, StructurePlan
from src.tables.model import HierarchicalTable, validate

logger = logging.getLogger(__name__)


def assemble_table(plan: StructurePlan, trace: FillTrace) -> HierarchicalTable:
    by_cell = {(r.cell.row, r.cell.col): r for r in trace.records}
    missing = [cell for cell in plan.cells() if (cell.row, cell.col) not in by_cell]
    if missing:
        raise AssemblyError(
            "fill trace has no record for " + ", ".join(f"{c.left_coord}/{c.top_coord}" for c in missing),
            missing=[(c.left_coord, c.top_coord) for c in missing],
        )
    body = tuple(
        tuple(by_cell[(r, c)].value for c in range(plan.cols)) for r in range(plan.rows)
    )
    table = HierarchicalTable(plan.stub_header, plan.left, plan.top, body)
    report = validate(table)
    if not report.ok:
        raise AssemblyError("assembled table failed verification: " + "; ".join(report.errors))
    for warning in report.warnings:
        logger.warning("assembled table: %s", warning)
    unfilled = trace.unfilled()
    if unfilled:
        logger.info("%d cell(s) left unfilled: %s", len(unfilled), ", ".join(r.cell.cell_id for r in unfilled))
    return table
