"""Structure similarity: Zhang-Shasha tree edit distance over header trees and TEDS"""

from __future__ import annotations

import zss

from src.tables.model import CoordTree, HeaderNode, HierarchicalTable, normalize_text

ROOT_LABEL = "<table>"
LEFT_LABEL = "<row-header>"
TOP_LABEL = "<column-header>"


def _node(header: HeaderNode) -> zss.Node:
    return zss.Node(normalize_text(header.label), [_node(child) for child in header.children])


def _region(label: str, tree: CoordTree) -> zss.Node:
    return zss.Node(label, [_node(root) for root in tree.roots])


def structure_tree(table: HierarchicalTable) -> zss.Node:
    """Synthetic root over the row-header and column-header trees; body cells are left out."""
    return zss.Node(ROOT_LABEL, [_region(LEFT_LABEL, table.left), _region(TOP_LABEL, table.top)])


def tree_size(node: zss.Node) -> int:
    return 1 + sum(tree_size(child) for child in zss.Node.get_children(node))


def _relabel_cost(a: zss.Node, b: zss.Node) -> int:
    return 0 if normalize_text(a.label) == normalize_text(b.label) else 1


def tree_edit_distance(a: zss.Node, b: zss.Node) -> int:
    """Unit-cost insert/delete/relabel distance between ordered labeled trees."""
    distance = zss.distance(
        a,
        b,
        zss.Node.get_children,
        insert_cost=lambda node: 1,
        remove_cost=lambda node: 1,
        update_cost=_relabel_cost,
    )
    return int(round(distance))


def teds(a: HierarchicalTable, b: HierarchicalTable) -> float:
    sa, sb = structure_tree(a), structure_tree(b)
    return 1.0 - tree_edit_distance(sa, sb) / max(tree_size(sa), tree_size(sb))
