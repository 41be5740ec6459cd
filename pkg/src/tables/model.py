"""Hierarchical table model: header trees, tree coordinates and key-value flattening"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from src.errors import CoordinateResolutionError, TableStructureError, TableValidationError


def normalize_text(text: str | None) -> str:
    """Strip and collapse internal whitespace; case is preserved."""
    if not text:
        return ""
    return " ".join(str(text).split())


@dataclass(frozen=True)
class HeaderNode:
    label: str
    children: tuple[HeaderNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "label", normalize_text(self.label))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return sum(child.leaf_count() for child in self.children)

    def depth(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + max(child.depth() for child in self.children)

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)


@dataclass(frozen=True)
class TreeCoord:
    """Child-index path from the root level down to a node, 0-based."""

    path: tuple[int, ...]

    def __post_init__(self):
        path = tuple(int(i) for i in self.path)
        if not path:
            raise ValueError("a tree coordinate needs at least one index")
        if any(i < 0 for i in path):
            raise ValueError(f"tree coordinate indices must be non-negative: {path}")
        object.__setattr__(self, "path", path)

    @classmethod
    def of(cls, *indices: int) -> TreeCoord:
        return cls(tuple(indices))

    def __len__(self) -> int:
        return len(self.path)

    def __str__(self) -> str:
        return "<" + ",".join(str(i) for i in self.path) + ">"


@dataclass(frozen=True)
class CoordTree:
    """Ordered forest of header nodes (the row header or the column header)."""

    roots: tuple[HeaderNode, ...]

    def __post_init__(self):
        roots = tuple(self.roots)
        if not roots:
            raise TableStructureError("a header tree needs at least one node")
        object.__setattr__(self, "roots", roots)
        for coord, node in self.walk():
            if not node.label:
                raise TableStructureError(f"empty header label at {coord}")

    @classmethod
    def flat(cls, labels: Sequence[str]) -> CoordTree:
        return cls(tuple(HeaderNode(label) for label in labels))

    def walk(self) -> Iterator[tuple[TreeCoord, HeaderNode]]:
        """Preorder traversal yielding every node with its coordinate."""
        stack = [((i,), node) for i, node in reversed(list(enumerate(self.roots)))]
        while stack:
            path, node = stack.pop()
            yield TreeCoord(path), node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))

    @property
    def leaf_count(self) -> int:
        return sum(root.leaf_count() for root in self.roots)

    @property
    def depth(self) -> int:
        return max(root.depth() for root in self.roots)

    @property
    def size(self) -> int:
        return sum(root.size() for root in self.roots)

    def leaf_paths(self) -> list[tuple[str, ...]]:
        return [resolve_coord(self, coord) for coord in leaf_coords(self)]


def resolve_coord(tree: CoordTree, coord: TreeCoord) -> tuple[str, ...]:
    """Return the label path from the root-level node to the node addressed by coord."""
    labels = []
    level = tree.roots
    for depth, index in enumerate(coord.path):
        if index >= len(level):
            raise CoordinateResolutionError(coord, depth, index, len(level))
        node = level[index]
        labels.append(node.label)
        level = node.children
    return tuple(labels)


def leaf_coords(tree: CoordTree) -> list[TreeCoord]:
    """All leaf coordinates in left-to-right document order."""
    return [coord for coord, node in tree.walk() if node.is_leaf]


@dataclass(frozen=True)
class KeyValueTriple:
    left_key: tuple[str, ...]
    top_key: tuple[str, ...]
    value: str

    def __post_init__(self):
        object.__setattr__(self, "left_key", tuple(normalize_text(k) for k in self.left_key))
        object.__setattr__(self, "top_key", tuple(normalize_text(k) for k in self.top_key))
        object.__setattr__(self, "value", normalize_text(self.value))
        if not self.left_key or not self.top_key:
            raise ValueError("key-value triples need non-empty row and column keys")


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class HierarchicalTable:
    stub_header: str
    left: CoordTree
    top: CoordTree
    body: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "stub_header", normalize_text(self.stub_header))
        object.__setattr__(
            self, "body", tuple(tuple(normalize_text(cell) for cell in row) for row in self.body)
        )

    @classmethod
    def create(cls, stub_header: str, left: CoordTree, top: CoordTree, body) -> HierarchicalTable:
        """Build a table and raise TableValidationError unless validate() passes."""
        table = cls(stub_header, left, top, body)
        report = validate(table)
        if not report.ok:
            raise TableValidationError(report)
        return table

    @property
    def n_rows(self) -> int:
        return len(self.body)

    @property
    def n_cols(self) -> int:
        return len(self.body[0]) if self.body else 0

    @property
    def is_flat(self) -> bool:
        return self.left.depth == 1 and self.top.depth == 1

    def cell(self, left_coord: TreeCoord, top_coord: TreeCoord) -> str:
        resolve_coord(self.left, left_coord)
        resolve_coord(self.top, top_coord)
        rows = leaf_coords(self.left)
        cols = leaf_coords(self.top)
        if left_coord not in rows or top_coord not in cols:
            raise TableStructureError(f"{left_coord}/{top_coord} does not address a body cell")
        return self.body[rows.index(left_coord)][cols.index(top_coord)]

    def cells(self) -> Iterator[tuple[TreeCoord, TreeCoord, str]]:
        """Row-major iteration over (left leaf, top leaf, text)."""
        cols = leaf_coords(self.top)
        for row, left_coord in zip(self.body, leaf_coords(self.left)):
            for text, top_coord in zip(row, cols):
                yield left_coord, top_coord, text


def flatten_to_kv(table: HierarchicalTable) -> list[KeyValueTriple]:
    left_keys = table.left.leaf_paths()
    top_keys = table.top.leaf_paths()
    return [
        KeyValueTriple(left_key, top_key, value)
        for left_key, row in zip(left_keys, table.body)
        for top_key, value in zip(top_keys, row)
    ]


def rebuild_from_kv(
    stub_header: str, left: CoordTree, top: CoordTree, triples: Sequence[KeyValueTriple]
) -> HierarchicalTable:
    """Inverse of flatten_to_kv against the same header trees."""
    left_keys = left.leaf_paths()
    top_keys = top.leaf_paths()
    if len(triples) != len(left_keys) * len(top_keys):
        raise TableStructureError(
            f"expected {len(left_keys) * len(top_keys)} triples, got {len(triples)}"
        )
    body = []
    it = iter(triples)
    for left_key in left_keys:
        row = []
        for top_key in top_keys:
            triple = next(it)
            if triple.left_key != left_key or triple.top_key != top_key:
                raise TableStructureError(
                    f"triple keys {triple.left_key}/{triple.top_key} do not match "
                    f"header paths {left_key}/{top_key}"
                )
            row.append(triple.value)
        body.append(tuple(row))
    return HierarchicalTable.create(stub_header, left, top, tuple(body))


def validate(table: HierarchicalTable) -> ValidationReport:
    report = ValidationReport()
    rows = table.left.leaf_count
    cols = table.top.leaf_count

    if len(table.body) != rows:
        report.errors.append(
            f"dimension mismatch: body has {len(table.body)} rows but the row header has {rows} leaves"
        )
    widths = {len(row) for row in table.body}
    if len(widths) > 1:
        report.errors.append(f"ragged body: row widths {sorted(widths)}")
    for i, row in enumerate(table.body):
        if len(row) != cols:
            report.errors.append(
                f"dimension mismatch: body row {i} has {len(row)} cells but the column header has {cols} leaves"
            )
            break

    for name, tree in (("row", table.left), ("column", table.top)):
        for coord, node in tree.walk():
            if not node.label:
                report.errors.append(f"empty {name} header label at {coord}")
        duplicates = [path for path, n in Counter(tree.leaf_paths()).items() if n > 1]
        for path in duplicates:
            report.warnings.append(f"duplicate {name} key path: {' / '.join(path)}")
    return report
