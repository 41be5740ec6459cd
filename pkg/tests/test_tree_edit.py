import itertools

import pytest
import zss
from hypothesis import given, settings
from hypothesis import strategies as st

from src.metrics.tree_edit import structure_tree, teds, tree_edit_distance, tree_size
from src.tables.model import CoordTree, HeaderNode, HierarchicalTable
from tests.helpers import all_trees, flat_table, label_trees, oracle_tree_distance, tables


def to_zss(tree) -> zss.Node:
    label, children = tree
    return zss.Node(label, [to_zss(child) for child in children])


def test_matches_brute_force_on_every_small_pair():
    trees = all_trees(4, "ab")
    assert len(trees) == 102
    for a, b in itertools.product(trees, repeat=2):
        assert tree_edit_distance(to_zss(a), to_zss(b)) == oracle_tree_distance(a, b), (a, b)


SIX_NODE_TREES = all_trees(6, "abc")


def test_six_node_space_is_complete():
    # ordered trees with n nodes: Catalan(n - 1) shapes, 3**n labelings
    assert len(SIX_NODE_TREES) == 3 + 9 + 2 * 27 + 5 * 81 + 14 * 243 + 42 * 729


@settings(max_examples=1000)
@given(st.sampled_from(SIX_NODE_TREES), st.sampled_from(SIX_NODE_TREES))
def test_matches_brute_force_across_six_node_trees(a, b):
    assert tree_edit_distance(to_zss(a), to_zss(b)) == oracle_tree_distance(a, b)


@given(label_trees, label_trees)
def test_matches_brute_force_on_random_pairs(a, b):
    assert tree_edit_distance(to_zss(a), to_zss(b)) == oracle_tree_distance(a, b)


@given(label_trees, label_trees)
def test_distance_is_symmetric_and_bounded(a, b):
    d = tree_edit_distance(to_zss(a), to_zss(b))
    assert d == tree_edit_distance(to_zss(b), to_zss(a))
    assert d <= max(tree_size(to_zss(a)), tree_size(to_zss(b)))


def test_structure_tree_has_a_node_per_header(fig2_table):
    # root, two region nodes, 7 row headers, 7 column headers
    assert tree_size(structure_tree(fig2_table)) == 1 + 2 + 7 + 7


def test_identical_tables_score_one(fig2_table):
    assert teds(fig2_table, fig2_table) == 1.0


def test_body_values_do_not_affect_structure():
    a = flat_table(["a", "b"], ["x", "y"])
    b = flat_table(["a", "b"], ["x", "y"], body=[["9", "9"], ["9", "9"]])
    assert teds(a, b) == 1.0


def test_single_relabel_on_flat_two_by_two():
    a = flat_table(["a", "b"], ["x", "y"])
    b = flat_table(["a", "c"], ["x", "y"])
    assert teds(a, b) == pytest.approx(1 - 1 / 7)


def test_single_relabel_on_flat_three_by_three():
    a = flat_table(["a", "b", "c"], ["x", "y", "z"])
    b = flat_table(["a", "b", "c"], ["x", "y", "w"])
    assert teds(a, b) == pytest.approx(1 - 1 / 9)


def test_label_comparison_ignores_whitespace_runs():
    a = flat_table(["net  income"], ["2021"])
    b = flat_table(["net income"], ["2021"])
    assert teds(a, b) == 1.0


def test_swapping_row_and_column_headers_costs_relabels():
    a = flat_table(["a"], ["x"])
    b = flat_table(["x"], ["a"])
    assert teds(a, b) == pytest.approx(1 - 2 / 5)


def test_extra_hierarchy_level_costs_one_insert():
    flat = flat_table(["a", "b"], ["x"])
    nested = HierarchicalTable.create(
        "",
        CoordTree((HeaderNode("g", (HeaderNode("a"), HeaderNode("b"))),)),
        CoordTree.flat(["x"]),
        (("0-0",), ("1-0",)),
    )
    assert teds(flat, nested) == pytest.approx(1 - 1 / 7)


@settings(max_examples=1000)
@given(tables())
def test_every_table_scores_one_against_itself(table):
    assert teds(table, table) == 1.0


@given(tables(), tables())
def test_teds_is_a_bounded_similarity(a, b):
    score = teds(a, b)
    assert 0.0 <= score <= 1.0
    assert score == pytest.approx(teds(b, a))
    assert teds(a, a) == 1.0
