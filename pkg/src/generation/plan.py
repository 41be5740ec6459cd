"""Structure plan from the first TabTalk stage and the per-cell fill trace from the second"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from src.errors import AssemblyError, PlanVerificationError, TableStructureError
from src.tables.model import CoordTree, HierarchicalTable, TreeCoord, leaf_coords, resolve_coord


@dataclass(frozen=True)
class CellRef:
    row: int
    col: int
    left_coord: TreeCoord
    top_coord: TreeCoord

    @property
    def cell_id(self) -> str:
        return f"r{self.row}c{self.col}"


@dataclass(frozen=True)
class StructurePlan:
    left: CoordTree
    top: CoordTree
    stub_header: str
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows != self.left.leaf_count or self.cols != self.top.leaf_count:
            raise PlanVerificationError(self.rows, self.left.leaf_count, self.cols, self.top.leaf_count)

    @classmethod
    def from_table(cls, table: HierarchicalTable) -> StructurePlan:
        return cls(table.left, table.top, table.stub_header, table.left.leaf_count, table.top.leaf_count)

    def skeleton(self) -> HierarchicalTable:
        """The planned table with an empty body."""
        return HierarchicalTable(
            self.stub_header, self.left, self.top, tuple(("",) * self.cols for _ in range(self.rows))
        )

    def cells(self) -> list[CellRef]:
        """Every body cell, row-major."""
        cols = leaf_coords(self.top)
        return [
            CellRef(r, c, left_coord, top_coord)
            for r, left_coord in enumerate(leaf_coords(self.left))
            for c, top_coord in enumerate(cols)
        ]

    def locate(self, left_coord: TreeCoord, top_coord: TreeCoord) -> CellRef:
        resolve_coord(self.left, left_coord)
        resolve_coord(self.top, top_coord)
        rows = leaf_coords(self.left)
        cols = leaf_coords(self.top)
        if left_coord not in rows or top_coord not in cols:
            raise TableStructureError(f"{left_coord}/{top_coord} is not a body cell of the plan")
        return CellRef(rows.index(left_coord), cols.index(top_coord), left_coord, top_coord)

    def batches(self, batch_size: Optional[int] = None) -> list[list[CellRef]]:
        """Whole rows by default, otherwise row-major chunks of batch_size cells."""
        cells = self.cells()
        if batch_size is None:
            return [cells[r * self.cols:(r + 1) * self.cols] for r in range(self.rows)]
        if batch_size < 1:
            raise ValueError("batch size must be >= 1")
        return [cells[i:i + batch_size] for i in range(0, len(cells), batch_size)]

    def key_paths(self, cell: CellRef) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return resolve_coord(self.left, cell.left_coord), resolve_coord(self.top, cell.top_coord)


@dataclass(frozen=True)
class FillRecord:
    cell: CellRef
    query: str = ""
    sentence_ids: tuple[int, ...] = ()
    value: str = ""
    conversion: Optional[str] = None
    filled: bool = True
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "cell": self.cell.cell_id,
            "left": str(self.cell.left_coord),
            "top": str(self.cell.top_coord),
            "query": self.query,
            "sentence_ids": list(self.sentence_ids),
            "value": self.value,
            "conversion": self.conversion,
            "filled": self.filled,
            "warnings": list(self.warnings),
        }


@dataclass
class FillTrace:
    records: list[FillRecord] = field(default_factory=list)
    retries: int = 0

    @classmethod
    def merge(cls, fragments: Iterable[FillTrace]) -> FillTrace:
        """Combine disjoint fragments into one trace ordered row-major."""
        by_cell: dict[tuple[int, int], FillRecord] = {}
        retries = 0
        for fragment in fragments:
            retries += fragment.retries
            for record in fragment.records:
                key = (record.cell.row, record.cell.col)
                if key in by_cell:
                    raise AssemblyError(f"cell {record.cell.cell_id} was filled twice")
                by_cell[key] = record
        return cls([by_cell[key] for key in sorted(by_cell)], retries)

    def unfilled(self) -> list[FillRecord]:
        return [r for r in self.records if not r.filled]

    def warnings(self) -> list[str]:
        return [f"{r.cell.cell_id}: {w}" for r in self.records for w in r.warnings]

    def sentence_ids(self) -> set[int]:
        return {i for r in self.records for i in r.sentence_ids}

    def to_dicts(self) -> list[dict]:
        return [r.to_dict() for r in self.records]
