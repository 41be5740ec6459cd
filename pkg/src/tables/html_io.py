"""Parse HTML tables (rowspan/colspan aware) into hierarchical tables and serialize them back"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from bs4 import BeautifulSoup, Tag

from src.errors import HtmlInputError, TableStructureError
from src.tables.model import CoordTree, HeaderNode, HierarchicalTable, normalize_text

logger = logging.getLogger(__name__)

PARSER = "lxml"

# Leading runs of spaces / nbsp in row headers usually encode an indented hierarchy
INDENT_RE = re.compile(r"^[ \u00a0\t]{2,}\S")


@dataclass(frozen=True)
class GridCell:
    text: str
    row_span: int
    col_span: int
    is_header: bool
    origin: tuple[int, int]
    raw_text: str = ""

    @property
    def row_end(self) -> int:
        return self.origin[0] + self.row_span

    @property
    def col_end(self) -> int:
        return self.origin[1] + self.col_span


def _span(tag: Tag, name: str) -> int:
    try:
        value = int(str(tag.get(name, 1)).strip())
    except ValueError:
        return 1
    return value if value > 0 else 1


def _cell_text(tag: Tag) -> str:
    for br in tag.find_all("br"):
        br.replace_with(" ")
    return tag.get_text()


def find_single_table(html: str) -> Tag:
    soup = BeautifulSoup(html or "", PARSER)
    tables = soup.find_all("table")
    if len(tables) != 1:
        raise HtmlInputError(f"expected exactly one <table>, found {len(tables)}")
    return tables[0]


def expand_grid(table: Tag) -> tuple[list[GridCell], dict[tuple[int, int], GridCell], int, int]:
    """Place every th/td on the expanded grid; every slot must be covered exactly once."""
    rows = table.find_all("tr")
    cells: list[GridCell] = []
    slots: dict[tuple[int, int], GridCell] = {}

    for r, tr in enumerate(rows):
        c = 0
        for tag in tr.find_all(["th", "td"], recursive=False):
            while (r, c) in slots:
                c += 1
            raw = _cell_text(tag)
            cell = GridCell(
                text=normalize_text(raw),
                row_span=_span(tag, "rowspan"),
                col_span=_span(tag, "colspan"),
                is_header=tag.name == "th" or tag.find_parent("thead") is not None,
                origin=(r, c),
                raw_text=raw,
            )
            if cell.row_end > len(rows):
                raise TableStructureError(
                    f"cell at {cell.origin} spans {cell.row_span} rows past the last row"
                )
            for rr in range(r, cell.row_end):
                for cc in range(c, cell.col_end):
                    if (rr, cc) in slots:
                        raise TableStructureError(
                            f"cells at {slots[(rr, cc)].origin} and {cell.origin} overlap at {(rr, cc)}"
                        )
                    slots[(rr, cc)] = cell
            cells.append(cell)
            c = cell.col_end

    n_rows = len(rows)
    widths = [1 + max((c for (rr, c) in slots if rr == r), default=-1) for r in range(n_rows)]
    n_cols = max(widths, default=0)
    holes = [(r, c) for r in range(n_rows) for c in range(n_cols) if (r, c) not in slots]
    if holes:
        raise TableStructureError(f"grid is not rectangular after span expansion; uncovered slots {holes}")
    return cells, slots, n_rows, n_cols


def _header_region(slots, n_rows: int, n_cols: int, has_markup: bool) -> tuple[int, int]:
    if not has_markup:
        return 1, 1
    top = 0
    while top < n_rows and all(slots[(top, c)].is_header for c in range(n_cols)):
        top += 1
    left = 0
    while left < n_cols and top < n_rows and all(slots[(r, left)].is_header for r in range(top, n_rows)):
        left += 1
    return top, left


def _build_tree(cells: list[GridCell], slots, axis: str, level_range, span_range) -> CoordTree:
    """Nest the header cells of one region by span containment.

    For the column header the level runs down the rows and spans run across columns;
    the row header is the transpose.
    """
    level_lo, level_hi = level_range
    span_lo, span_hi = span_range

    def level(cell):
        return (cell.origin[0], cell.row_end) if axis == "top" else (cell.origin[1], cell.col_end)

    def span(cell):
        return (cell.origin[1], cell.col_end) if axis == "top" else (cell.origin[0], cell.row_end)

    def slot(lvl, pos):
        return slots[(lvl, pos)] if axis == "top" else slots[(pos, lvl)]

    region = [
        cell for cell in cells
        if level_lo <= level(cell)[0] < level_hi and span_lo <= span(cell)[0] < span_hi
    ]
    children: dict[int, list[GridCell]] = {id(cell): [] for cell in region}
    roots: list[GridCell] = []
    for cell in region:
        (l0, l1), (s0, s1) = level(cell), span(cell)
        if l1 > level_hi or s1 > span_hi:
            raise TableStructureError(f"header cell at {cell.origin} extends outside its header region")
        if l0 == level_lo:
            roots.append(cell)
            continue
        parent = slot(l0 - 1, s0)
        p0, p1 = span(parent)
        if not (p0 <= s0 and s1 <= p1):
            raise TableStructureError(
                f"header cell at {cell.origin} is not nested under the cell at {parent.origin}"
            )
        children[id(parent)].append(cell)

    def to_nodes(cell: GridCell) -> list[HeaderNode]:
        kids = sorted(children[id(cell)], key=lambda c: span(c)[0])
        if not kids:
            s0, s1 = span(cell)
            if s1 - s0 != 1:
                raise TableStructureError(
                    f"leaf header at {cell.origin} covers {s1 - s0} body {'columns' if axis == 'top' else 'rows'}"
                )
            if not cell.text:
                raise TableStructureError(f"empty header label at {cell.origin}")
            return [HeaderNode(cell.text)]
        nested = [node for kid in kids for node in to_nodes(kid)]
        if not cell.text:
            return nested
        return [HeaderNode(cell.text, tuple(nested))]

    nodes = [node for cell in sorted(roots, key=lambda c: span(c)[0]) for node in to_nodes(cell)]
    if not nodes:
        raise TableStructureError(f"{'column' if axis == 'top' else 'row'} header region is empty")
    return CoordTree(tuple(nodes))


def parse_html_table(html: str) -> HierarchicalTable:
    table_tag = find_single_table(html)
    has_markup = table_tag.find(["th", "thead"]) is not None
    cells, slots, n_rows, n_cols = expand_grid(table_tag)
    if not cells:
        raise TableStructureError("header region is empty: the table has no cells")

    top_rows, left_cols = _header_region(slots, n_rows, n_cols, has_markup)
    if top_rows == 0 or top_rows >= n_rows:
        raise TableStructureError("column header region is empty or leaves no body rows")
    if left_cols == 0 or left_cols >= n_cols:
        raise TableStructureError("row header region is empty or leaves no body columns")

    stub_cells = []
    for cell in cells:
        r, c = cell.origin
        if r < top_rows and c < left_cols:
            if cell.row_end > top_rows or cell.col_end > left_cols:
                raise TableStructureError(f"stub cell at {cell.origin} straddles the header regions")
            if cell.text and cell.text not in stub_cells:
                stub_cells.append(cell.text)

    for cell in cells:
        r, c = cell.origin
        if r >= top_rows and c >= left_cols and (cell.row_span > 1 or cell.col_span > 1):
            raise TableStructureError(f"merged body cell at {cell.origin} is not supported")
        if r >= top_rows and c < left_cols and cell.col_end > left_cols:
            raise TableStructureError(f"row header cell at {cell.origin} extends into the table body")

    top = _build_tree(cells, slots, "top", (0, top_rows), (left_cols, n_cols))
    left = _build_tree(cells, slots, "left", (0, left_cols), (top_rows, n_rows))
    if left.depth == 1:
        indented = [
            cell.origin for cell in cells
            if cell.origin[0] >= top_rows and cell.origin[1] < left_cols and INDENT_RE.match(cell.raw_text)
        ]
        if indented:
            logger.warning(
                "row headers at %s carry leading indentation; indentation hierarchy is not inferred",
                indented,
            )

    body = tuple(
        tuple(slots[(r, c)].text for c in range(left_cols, n_cols)) for r in range(top_rows, n_rows)
    )
    return HierarchicalTable.create(" ".join(stub_cells), left, top, body)


def _span_attrs(row_span: int, col_span: int) -> dict:
    attrs = {}
    if col_span > 1:
        attrs["colspan"] = str(col_span)
    if row_span > 1:
        attrs["rowspan"] = str(row_span)
    return attrs


def table_tag_for(table: HierarchicalTable, with_body: bool = True, attrs: dict | None = None) -> Tag:
    """Canonical HTML for a table; header spans are derived from the trees."""
    soup = BeautifulSoup("", PARSER)
    table_tag = soup.new_tag("table", attrs=attrs or {})
    soup.append(table_tag)
    top_depth = table.top.depth
    left_depth = table.left.depth

    thead = soup.new_tag("thead")
    table_tag.append(thead)
    header_rows = [soup.new_tag("tr") for _ in range(top_depth)]
    for tr in header_rows:
        thead.append(tr)
    stub = soup.new_tag("th", attrs=_span_attrs(top_depth, left_depth))
    stub.string = table.stub_header
    header_rows[0].append(stub)

    def emit_top(node: HeaderNode, depth: int):
        th = soup.new_tag(
            "th", attrs=_span_attrs(top_depth - depth if node.is_leaf else 1, node.leaf_count())
        )
        th.string = node.label
        header_rows[depth].append(th)
        for child in node.children:
            emit_top(child, depth + 1)

    for root in table.top.roots:
        emit_top(root, 0)

    tbody = soup.new_tag("tbody")
    table_tag.append(tbody)
    body_rows = [soup.new_tag("tr") for _ in range(table.left.leaf_count)]
    for tr in body_rows:
        tbody.append(tr)

    def emit_left(node: HeaderNode, depth: int, first_row: int) -> int:
        th = soup.new_tag(
            "th", attrs=_span_attrs(node.leaf_count(), left_depth - depth if node.is_leaf else 1)
        )
        th.string = node.label
        body_rows[first_row].append(th)
        row = first_row
        for child in node.children:
            row = emit_left(child, depth + 1, row)
        return row + 1 if node.is_leaf else row

    row = 0
    for root in table.left.roots:
        row = emit_left(root, 0, row)

    for tr, values in zip(body_rows, table.body):
        for value in values:
            td = soup.new_tag("td")
            td.string = value if with_body else ""
            tr.append(td)
    return table_tag


def serialize_html(table: HierarchicalTable) -> str:
    return str(table_tag_for(table))
