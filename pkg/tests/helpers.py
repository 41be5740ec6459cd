"""Shared strategies, oracles and scripted backends for the test suite"""

import json
import re
from functools import lru_cache

from hypothesis import strategies as st

from src.generation.parsing import extract_fenced_block
from src.generation.plan import StructurePlan
from src.generation.prompts import skeleton_html
from src.tables.html_io import serialize_html
from src.tables.model import CoordTree, HeaderNode, HierarchicalTable

labels = st.lists(st.text(alphabet="abcdefgh", min_size=1, max_size=4), min_size=1, max_size=2).map(" ".join)
values = st.text(alphabet="0123456789,.% abc-", max_size=6)


def header_nodes(max_depth: int):
    leaf = st.builds(HeaderNode, labels)
    if max_depth <= 1:
        return leaf
    inner = st.builds(
        HeaderNode, labels, st.lists(header_nodes(max_depth - 1), min_size=1, max_size=2).map(tuple)
    )
    return st.one_of(leaf, inner)


def coord_trees(max_depth: int = 3, max_leaves: int = 6):
    return (
        st.lists(header_nodes(max_depth), min_size=1, max_size=3)
        .map(lambda roots: CoordTree(tuple(roots)))
        .filter(lambda tree: tree.leaf_count <= max_leaves)
    )


@st.composite
def tables(draw, max_depth: int = 3):
    left = draw(coord_trees(max_depth))
    top = draw(coord_trees(max_depth))
    stub = draw(st.text(alphabet="abcdefgh ", max_size=6))
    body = tuple(
        tuple(draw(values) for _ in range(top.leaf_count)) for _ in range(left.leaf_count)
    )
    return HierarchicalTable.create(stub, left, top, body)


def flat_table(rows, cols, body=None, stub="") -> HierarchicalTable:
    body = body or [[f"{r}-{c}" for c in range(len(cols))] for r in range(len(rows))]
    return HierarchicalTable.create(stub, CoordTree.flat(rows), CoordTree.flat(cols), tuple(map(tuple, body)))


# Ordered labeled trees as (label, children) tuples for the brute-force oracle


def tree_size(tree) -> int:
    return 1 + sum(tree_size(child) for child in tree[1])


@lru_cache(maxsize=None)
def forest_distance(f, g) -> int:
    """Unit-cost edit distance between ordered forests by rightmost-root recursion."""
    if not f and not g:
        return 0
    if not f:
        return sum(tree_size(t) for t in g)
    if not g:
        return sum(tree_size(t) for t in f)
    v, w = f[-1], g[-1]
    return min(
        forest_distance(f[:-1] + v[1], g) + 1,
        forest_distance(f, g[:-1] + w[1]) + 1,
        forest_distance(v[1], w[1]) + forest_distance(f[:-1], g[:-1]) + (v[0] != w[0]),
    )


def oracle_tree_distance(a, b) -> int:
    return forest_distance((a,), (b,))


def all_trees(max_nodes: int, alphabet: str):
    """Every ordered labeled tree with up to max_nodes nodes."""

    @lru_cache(maxsize=None)
    def forests(n):
        if n == 0:
            return [()]
        result = []
        for first in range(1, n + 1):
            for head in trees(first):
                for rest in forests(n - first):
                    result.append((head,) + rest)
        return result

    @lru_cache(maxsize=None)
    def trees(n):
        return [(label, kids) for label in alphabet for kids in forests(n - 1)]

    return [t for n in range(1, max_nodes + 1) for t in trees(n)]


label_trees = st.recursive(
    st.sampled_from("abc").map(lambda label: (label, ())),
    lambda children: st.tuples(st.sampled_from("abc"), st.lists(children, max_size=3).map(tuple)),
    max_leaves=5,
).filter(lambda tree: tree_size(tree) <= 6)


# Oracle chat backend: answers structure, fill and table prompts from ground-truth tables

QUESTION_RE = re.compile(r"^Question: (.*)$", re.MULTILINE)
CELL_RE = re.compile(r"^r(\d+)c(\d+)$")


def oracle_chat(tables_by_question: dict, wrong_cells: dict | None = None, malformed_first: bool = False):
    """Build a transport function. `wrong_cells` maps (question, cell id) to a substituted value;
    `malformed_first` makes the first structure answer carry no fenced block."""
    wrong_cells = wrong_cells or {}
    state = {"structure_calls": 0}

    def respond(payload: dict) -> dict:
        first_user = next(m["content"] for m in payload["messages"] if m["role"] == "user")
        question = QUESTION_RE.findall(first_user)[-1]
        table = tables_by_question[question]
        if first_user.startswith("Design the table"):
            state["structure_calls"] += 1
            if malformed_first and state["structure_calls"] == 1:
                return {"content": "Rows are the segments and columns are the years."}
            skeleton = skeleton_html(StructurePlan.from_table(table))
            return {"content": f"Plan first, then the skeleton.\n```html\n{skeleton}\n```\n"}
        if first_user.startswith("Fill the target cells"):
            answers = []
            for target in json.loads(extract_fenced_block(first_user, "json")):
                row, col = map(int, CELL_RE.match(target["cell"]).groups())
                value = wrong_cells.get((question, target["cell"]), table.body[row][col])
                answers.append(
                    {"cell": target["cell"], "query": " ".join(target["row"] + target["column"]),
                     "value": value, "sources": [1], "conversion": None}
                )
            return {"content": "```json\n" + json.dumps(answers) + "\n```"}
        return {"content": "```html\n" + serialize_html(table) + "\n```"}

    return respond
