import json
import logging

import pytest

from src.config import RunConfig
from src.errors import AssemblyError, PlanVerificationError, ResponseParseError, StageFailure, TableStructureError
from src.generation.assemble import assemble_table
from src.generation.parsing import (
    extract_fenced_block,
    parse_fill_response,
    parse_structure_response,
    parse_table_response,
)
from src.generation.plan import FillRecord, FillTrace, StructurePlan
from src.generation.prompts import (
    build_fill_prompt,
    build_structure_prompt,
    build_table_prompt,
    skeleton_html,
)
from src.generation.tabtalk import run_direct, run_oneshot, run_tabtalk
from src.metrics.content import content_similarity
from src.metrics.tree_edit import teds
from src.providers.chat import ChatProvider
from src.providers.transcript import ScriptedTransport
from src.tables.html_io import serialize_html
from src.tables.model import TreeCoord
from tests.helpers import flat_table, oracle_chat

Q1 = "What were Acme's revenue and net income in 2020 and 2021?"
Q1_IDS = [1, 2, 5, 6]


@pytest.fixture
def q1_table(mini_tables):
    return mini_tables[Q1]


@pytest.fixture
def q1_sentences(mini_store):
    return [mini_store.sentences[i] for i in Q1_IDS]


def oracle_llm(mini_tables, **kwargs) -> ChatProvider:
    return ChatProvider(ScriptedTransport(oracle_chat(mini_tables, **kwargs)))


def test_structure_prompt_is_deterministic_and_numbers_every_sentence(mini_store):
    texts = mini_store.texts()[:30]
    prompt = build_structure_prompt(Q1, texts)
    assert prompt == build_structure_prompt(Q1, list(texts))
    assert f"\n30. {texts[29]}\n" in prompt
    assert "\n31. " not in prompt
    assert f"Question: {Q1}\n" in prompt
    assert "Example" not in prompt
    with pytest.raises(ValueError):
        build_structure_prompt(Q1, [])


def test_exemplar_goes_before_the_question(mini_store, fig2_table):
    prompt = build_structure_prompt(Q1, mini_store.texts()[:3], exemplar=("Cancer counts?", fig2_table))
    assert prompt.index("Example\nQuestion: Cancer counts?") < prompt.index(f"Question: {Q1}")
    assert 'data-rows="5"' in prompt
    assert "1,918,030" not in prompt


def test_fill_prompt_lists_targets_row_major(q1_table, mini_store):
    plan = StructurePlan.from_table(q1_table)
    (batch,) = plan.batches(4)
    prompt = build_fill_prompt(plan, Q1, mini_store.texts()[:4], batch)
    targets = json.loads(extract_fenced_block(prompt, "json"))
    assert [t["cell"] for t in targets] == ["r0c0", "r0c1", "r1c0", "r1c1"]
    assert targets[1]["row"] == [plan.left.roots[0].label]
    assert targets[1]["column"] == [plan.top.roots[1].label]
    assert "105.1" not in extract_fenced_block(prompt, "html")
    with pytest.raises(ValueError):
        build_fill_prompt(plan, Q1, mini_store.texts()[:4], [])


def test_structure_prompt_matches_the_committed_text(fixtures_dir, mini_store):
    expected = (fixtures_dir / "golden" / "structure_prompt.txt").read_text(encoding="utf-8")
    assert build_structure_prompt(Q1, mini_store.texts()[:5]) == expected


def test_fill_prompt_matches_the_committed_text(fixtures_dir, q1_table, mini_store):
    plan = StructurePlan.from_table(q1_table)
    first_row = plan.batches()[0]
    expected = (fixtures_dir / "golden" / "fill_prompt.txt").read_text(encoding="utf-8")
    assert build_fill_prompt(plan, Q1, mini_store.texts()[:5], first_row) == expected


def test_plan_batches_default_to_whole_rows(fig2_table):
    plan = StructurePlan.from_table(fig2_table)
    batches = plan.batches()
    assert [len(b) for b in batches] == [5] * 5
    assert [len(b) for b in plan.batches(7)] == [7, 7, 7, 4]
    assert plan.locate(TreeCoord.of(2, 0), TreeCoord.of(2, 1)).cell_id == "r3c4"
    with pytest.raises(TableStructureError):
        plan.locate(TreeCoord.of(1), TreeCoord.of(0))


def test_table_prompt_variants(mini_store):
    texts = mini_store.texts()[:3]
    direct = build_table_prompt(Q1, texts)
    oneshot = build_table_prompt(Q1, texts, whole_document=True)
    assert "numbered sentences below" in direct and "1. " in direct
    assert "Document:\n" + " ".join(texts) in oneshot


def test_parse_structure_ignores_surrounding_prose(q1_table):
    plan = StructurePlan.from_table(q1_table)
    response = f"Rows are the metrics.\n```html\n{skeleton_html(plan)}\n```\nThat is the layout."
    parsed = parse_structure_response(response)
    assert parsed == plan
    assert parsed.skeleton().body == (("", ""), ("", ""))


def test_parse_structure_failures(mini_tables):
    with pytest.raises(ResponseParseError, match="fenced"):
        parse_structure_response("I would put the years in the columns.")

    plan = StructurePlan.from_table(mini_tables["What capital expenditure did Juniper report from 2019 to 2022?"])
    skeleton = skeleton_html(plan)
    with pytest.raises(PlanVerificationError) as info:
        parse_structure_response("```html\n" + skeleton.replace('data-cols="4"', 'data-cols="3"') + "\n```")
    assert "3" in str(info.value) and "4" in str(info.value)
    assert (info.value.declared_cols, info.value.top_leaves) == (3, 4)
    assert isinstance(info.value, ResponseParseError)

    with pytest.raises(ResponseParseError, match="data-rows"):
        parse_structure_response("```html\n<table><tr><th></th><th>x</th></tr><tr><th>a</th><td></td></tr></table>\n```")


def test_parse_fill_marks_missing_cells_and_drops_bad_citations(q1_table, caplog):
    plan = StructurePlan.from_table(q1_table)
    batch = plan.batches()[0]
    response = "```json\n" + json.dumps([
        {"cell": "r0c0", "query": "Acme revenue 2020", "value": " 105.1 ", "sources": [1, 99, 1], "conversion": None},
        {"cell": "r5c5", "value": "stray"},
    ]) + "\n```"
    with caplog.at_level(logging.WARNING):
        trace = parse_fill_response(response, plan, batch, Q1_IDS)
    first, second = trace.records
    assert first.value == "105.1"
    assert first.sentence_ids == (1,)
    assert first.warnings == ("dropped citation 99: only 4 sentences were given",)
    assert not second.filled
    assert second.warnings == ("no answer in the response",)
    assert [r.cell_id for r in (first.cell, second.cell)] == ["r0c0", "r0c1"]
    assert "outside the batch" in caplog.text
    with pytest.raises(ResponseParseError):
        parse_fill_response("```json\n{\"cell\": 1}\n```", plan, batch, Q1_IDS)


def test_assembly_names_missing_coordinates(q1_table):
    plan = StructurePlan.from_table(q1_table)
    cells = plan.cells()
    trace = FillTrace([FillRecord(cell, value="1") for cell in cells[:3]])
    with pytest.raises(AssemblyError) as info:
        assemble_table(plan, trace)
    assert info.value.missing == ((TreeCoord.of(1), TreeCoord.of(1)),)
    assert "<1>/<1>" in str(info.value)


def test_trace_merge_is_row_major_and_rejects_duplicates(q1_table):
    plan = StructurePlan.from_table(q1_table)
    cells = plan.cells()
    merged = FillTrace.merge([FillTrace([FillRecord(cells[3])], 1), FillTrace([FillRecord(cells[0])], 0)])
    assert [r.cell.cell_id for r in merged.records] == ["r0c0", "r1c1"]
    assert merged.retries == 1
    with pytest.raises(AssemblyError):
        FillTrace.merge([FillTrace([FillRecord(cells[0])]), FillTrace([FillRecord(cells[0])])])


def test_tabtalk_reproduces_the_reference_table(mini_tables, q1_table, q1_sentences):
    result = run_tabtalk(Q1, q1_sentences, oracle_llm(mini_tables))
    assert result.table == q1_table
    assert teds(result.table, q1_table) == 1.0
    assert content_similarity(result.table, q1_table).f1 == 1.0
    assert result.retries == 0
    assert result.trace.sentence_ids() == {1}
    assert [r.cell.cell_id for r in result.trace.records] == ["r0c0", "r0c1", "r1c0", "r1c1"]


def test_tabtalk_with_single_cell_batches(mini_tables, q1_table, q1_sentences):
    llm = oracle_llm(mini_tables)
    result = run_tabtalk(Q1, q1_sentences, llm, RunConfig(fill_batch_size=1, workers=4))
    assert result.table == q1_table
    assert llm.calls == 1 + 4


def test_wrong_value_only_costs_content(mini_tables, q1_table, q1_sentences):
    llm = oracle_llm(mini_tables, wrong_cells={(Q1, "r1c1"): "999.9"})
    result = run_tabtalk(Q1, q1_sentences, llm)
    assert teds(result.table, q1_table) == 1.0
    assert content_similarity(result.table, q1_table).f1 < 1.0


def test_malformed_structure_is_retried_once(mini_tables, q1_table, q1_sentences):
    llm = oracle_llm(mini_tables, malformed_first=True)
    result = run_tabtalk(Q1, q1_sentences, llm)
    assert result.retries == 1
    assert result.table == q1_table
    retry = llm.transport.calls[1]["messages"]
    assert [m["role"] for m in retry] == ["system", "user", "assistant", "user"]
    assert retry[-1]["content"].startswith("Your previous answer could not be used")


def test_structure_stage_failure(q1_sentences):
    llm = ChatProvider(ScriptedTransport([{"content": "no table"}, {"content": "still no table"}]))
    with pytest.raises(StageFailure) as info:
        run_tabtalk(Q1, q1_sentences, llm, RunConfig(max_retries=1))
    assert info.value.stage == "structure"
    assert info.value.retries == 1
    assert info.value.partial["response"] == "still no table"


def test_fill_stage_failure_keeps_the_plan(mini_tables, q1_sentences):
    oracle = oracle_chat(mini_tables)

    def respond(payload):
        if payload["messages"][1]["content"].startswith("Design the table"):
            return oracle(payload)
        return {"content": "values are in the document"}

    llm = ChatProvider(ScriptedTransport(respond))
    with pytest.raises(StageFailure) as info:
        run_tabtalk(Q1, q1_sentences, llm, RunConfig(max_retries=0, workers=1))
    assert info.value.stage == "fill"
    assert isinstance(info.value.partial["plan"], StructurePlan)
    assert info.value.partial["trace"].records == []


def test_direct_and_oneshot_baselines(mini_tables, mini_store, q1_table, q1_sentences):
    direct = run_direct(Q1, q1_sentences, oracle_llm(mini_tables))
    assert direct.table == q1_table and direct.trace is None
    assert direct.plan == StructurePlan.from_table(q1_table)

    llm = oracle_llm(mini_tables)
    oneshot = run_oneshot(Q1, mini_store.sentences, llm)
    assert oneshot.table == q1_table
    assert "Document:\n" in llm.transport.calls[0]["messages"][1]["content"]


def test_parse_table_response_wraps_structure_errors():
    table = flat_table(["a"], ["x"])
    assert parse_table_response("```html\n" + serialize_html(table) + "\n```") == table
    with pytest.raises(ResponseParseError):
        parse_table_response("```html\n<table><tr><td rowspan='3'>a</td></tr></table>\n```")
