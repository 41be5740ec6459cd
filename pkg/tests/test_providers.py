import json

import numpy as np
import pytest
import requests

from src.config import ProviderConfig, RunConfig, load_config
from src.errors import ConfigurationError, InputFormatError, ProviderError, TranscriptMissError
from src.providers.chat import ChatMessage, ChatProvider, ChatRequest
from src.providers.embedding import HashingEmbedder, TransportEmbedder, cosine
from src.providers.factory import build_providers, build_transport
from src.providers.http import HttpTransport
from src.providers.rewrite import ChatRewriter, IdentityRewriter, TransportRewriter
from src.providers.transcript import (
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    Transcript,
    fingerprint,
)


def test_fingerprint_ignores_key_order():
    a = {"messages": [{"role": "user", "content": "hi"}], "temperature": 0.0}
    b = {"temperature": 0.0, "messages": [{"content": "hi", "role": "user"}]}
    assert fingerprint(a) == fingerprint(b)
    assert fingerprint(a) != fingerprint({**a, "temperature": 0.5})
    assert len(fingerprint(a)) == 64


def test_record_then_replay(tmp_path):
    path = tmp_path / "llm.jsonl"
    backend = ScriptedTransport(lambda payload: {"content": payload["text"].upper()})
    recorder = RecordingTransport(backend, Transcript("llm", path))
    assert recorder({"text": "abc"}) == {"content": "ABC"}
    assert recorder({"text": "xyz"}) == {"content": "XYZ"}
    recorder({"text": "abc"})

    lines = path.read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[0])["kind"] == "meta"
    assert len(lines) == 3

    replay = ReplayTransport(Transcript.load(path))
    assert replay({"text": "xyz"}) == {"content": "XYZ"}
    assert replay.transcript.provider == "llm"
    with pytest.raises(TranscriptMissError) as info:
        replay({"text": "new"})
    assert info.value.fingerprint == fingerprint({"text": "new"})


def test_transcript_load_reports_the_bad_line(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"kind": "meta", "provider": "llm"}\n{"fingerprint": "x"}\n', encoding="utf-8")
    with pytest.raises(InputFormatError) as info:
        Transcript.load(path)
    assert (info.value.line, info.value.field) == (2, "response")
    path.write_text("not json\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as info:
        Transcript.load(path)
    assert info.value.field == "<json>"


def test_scripted_transport_replays_a_list_and_raises_scripted_errors():
    transport = ScriptedTransport([{"content": "one"}, ProviderError("down")])
    assert transport({"n": 1}) == {"content": "one"}
    with pytest.raises(ProviderError, match="down"):
        transport({"n": 2})
    with pytest.raises(ProviderError, match="ran out"):
        transport({"n": 3})
    assert len(transport.calls) == 3


def test_chat_provider_reads_plain_and_nested_content():
    request = ChatRequest.from_prompt("hello", system="be brief", temperature=0.0, max_tokens=16)
    provider = ChatProvider(ScriptedTransport([{"content": "a"}, {"choices": [{"message": {"content": "b"}}]}, {}]), model="m")
    assert provider.complete(request) == "a"
    assert provider.complete(request) == "b"
    with pytest.raises(ProviderError):
        provider.complete(request)
    payload = provider.transport.calls[0]
    assert payload["model"] == "m"
    assert [m["role"] for m in payload["messages"]] == ["system", "user"]
    longer = request.followed_by(ChatMessage("assistant", "a"), ChatMessage("user", "again"))
    assert len(longer.messages) == 4 and longer.max_tokens == 16


def test_hashing_embedder_properties():
    embedder = HashingEmbedder()
    vectors = embedder.embed(["Revenue was $10.", "revenue  WAS $10.", "abc", "abd", "", "xyz"])
    assert vectors.shape == (6, 4096)
    assert np.allclose(vectors[0], vectors[1])
    assert cosine(vectors[0], vectors[1]) == pytest.approx(1.0)
    assert 0.0 < cosine(vectors[2], vectors[3]) < 1.0
    assert not vectors[4].any()
    assert cosine(vectors[4], vectors[5]) == 0.0
    assert np.allclose(embedder.embed(["abc"])[0], vectors[2])


def test_transport_embedder_checks_shapes():
    embedder = TransportEmbedder(ScriptedTransport([{"vectors": [[3.0, 4.0], [0.0, 2.0]]}]))
    vectors = embedder.embed(["a", "b"])
    assert np.allclose(vectors, [[0.6, 0.8], [0.0, 1.0]])

    drifting = TransportEmbedder(ScriptedTransport([{"vectors": [[1.0, 0.0], [1.0]]}]))
    with pytest.raises(ProviderError, match="drifts"):
        drifting.embed(["a", "b"])
    short = TransportEmbedder(ScriptedTransport([{"data": [{"embedding": [1.0]}]}]))
    with pytest.raises(ProviderError):
        short.embed(["a", "b"])


def test_rewriters():
    assert IdentityRewriter().rewrite("question", "What?") == ["What?"]
    transport = TransportRewriter(ScriptedTransport([{"outputs": ["a?", "b?"]}, {"text": "x"}]))
    assert transport.rewrite("question", "q") == ["a?", "b?"]
    with pytest.raises(ProviderError):
        transport.rewrite("question", "q")

    llm = ChatProvider(ScriptedTransport([
        {"content": 'Sub-questions: ["What was revenue?", "What was net income?"]'},
        {"content": "- What was revenue?\n- What was net income?\n"},
        {"content": " $10 million was the revenue in 2021. "},
    ]))
    chat = ChatRewriter(llm)
    expected = ["What was revenue?", "What was net income?"]
    assert chat.rewrite("question", "q") == expected
    assert chat.rewrite("question", "q") == expected
    assert chat.rewrite("sentence", "s") == ["$10 million was the revenue in 2021."]


class FakeResponse:
    def __init__(self, status_code, body=None):
        self.status_code = status_code
        self.body = body

    def raise_for_status(self):
        if self.status_code >= 400:
            raise requests.HTTPError(f"HTTP {self.status_code}")

    def json(self):
        return self.body


class FakeSession:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.posts = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.posts.append((url, json, headers))
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def test_http_transport_retries_transient_failures():
    session = FakeSession([
        FakeResponse(503),
        requests.ConnectionError("reset"),
        FakeResponse(200, {"content": "ok"}),
    ])
    transport = HttpTransport("http://backend/v1", api_key="k", max_retries=3, backoff=0.0, session=session)
    assert transport({"x": 1}) == {"content": "ok"}
    assert len(session.posts) == 3
    assert session.posts[0][2]["Authorization"] == "Bearer k"


def test_http_transport_gives_up():
    session = FakeSession([FakeResponse(429), FakeResponse(429)])
    transport = HttpTransport("http://backend/v1", max_retries=1, backoff=0.0, session=session)
    with pytest.raises(ProviderError, match="after 1 retries"):
        transport({"x": 1})
    with pytest.raises(ProviderError):
        HttpTransport("http://backend/v1", session=FakeSession([FakeResponse(400)]))({"x": 1})
    with pytest.raises(ProviderError):
        HttpTransport("")


def test_factory_modes(tmp_path):
    offline = build_providers(RunConfig(), need_llm=False)
    assert offline.llm is None
    assert isinstance(offline.embedder, HashingEmbedder)
    assert isinstance(offline.rewriter, IdentityRewriter)

    with pytest.raises(ConfigurationError, match="transcript"):
        build_providers(RunConfig())
    with pytest.raises(ConfigurationError, match="does not exist"):
        build_transport("llm", ProviderConfig(mode="replay", transcript=tmp_path / "none.jsonl"))
    with pytest.raises(ConfigurationError):
        build_transport("llm", ProviderConfig(mode="psychic"))
    recorder = build_transport("llm", ProviderConfig(mode="record", url="http://x", transcript=tmp_path / "t.jsonl"))
    assert isinstance(recorder, RecordingTransport)
    with pytest.raises(ConfigurationError, match="llm provider"):
        build_providers(RunConfig(rewriter=ProviderConfig(mode="chat")), need_llm=False)


def test_load_config_resolves_paths_and_env(tmp_path, monkeypatch):
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({
        "k": 5,
        "docs": "docs.jsonl",
        "llm": {"mode": "replay", "transcript": "transcripts/llm.jsonl"},
    }), encoding="utf-8")
    monkeypatch.setenv("DOCTAB_LLM_MODEL", "table-model")
    config = load_config(config_path, workers=2, retriever=None)
    assert config.k == 5
    assert config.workers == 2
    assert config.retriever == "embedding"
    assert config.docs == tmp_path / "docs.jsonl"
    assert config.llm.transcript == tmp_path / "transcripts" / "llm.jsonl"
    assert config.llm.model == "table-model"


def test_load_config_rejects_bad_values(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(None, k=0)
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"merge": "zipper"}', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(bad)
