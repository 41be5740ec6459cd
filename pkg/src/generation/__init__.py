# Two-stage table generation: structure plan, cell filling, assembly
from src.generation.plan import CellRef, FillRecord, FillTrace, StructurePlan
from src.generation.prompts import build_fill_prompt, build_structure_prompt, build_table_prompt
from src.generation.parsing import (
    extract_fenced_block,
    parse_fill_response,
    parse_structure_response,
    parse_table_response,
)
from src.generation.assemble import assemble_table
from src.generation.tabtalk import TabTalkResult, run_direct, run_oneshot, run_tabtalk
