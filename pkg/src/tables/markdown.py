"""Lossy Markdown export: header hierarchies are joined into single header strings"""

from src.tables.model import HierarchicalTable

KEY_SEPARATOR = " / "


def _escape(text: str) -> str:
    return text.replace("|", "\\|")


def serialize_markdown(table: HierarchicalTable) -> str:
    header = [table.stub_header] + [KEY_SEPARATOR.join(path) for path in table.top.leaf_paths()]
    lines = [
        "| " + " | ".join(_escape(h) for h in header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for path, row in zip(table.left.leaf_paths(), table.body):
        cells = [KEY_SEPARATOR.join(path)] + list(row)
        lines.append("| " + " | ".join(_escape(c) for c in cells) + " |")
    return "\n".join(lines) + "\n"
