# Table model and HTML / Markdown serialization
from src.tables.model import (
    CoordTree,
    HeaderNode,
    HierarchicalTable,
    KeyValueTriple,
    TreeCoord,
    ValidationReport,
    flatten_to_kv,
    leaf_coords,
    normalize_text,
    rebuild_from_kv,
    resolve_coord,
    validate,
)
from src.tables.html_io import GridCell, parse_html_table, serialize_html
from src.tables.markdown import serialize_markdown
