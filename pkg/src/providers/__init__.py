# Pluggable chat, embedding and rewrite backends with record/replay
from src.providers.chat import ChatMessage, ChatProvider, ChatRequest
from src.providers.embedding import HashingEmbedder, TransportEmbedder, cosine
from src.providers.rewrite import ChatRewriter, IdentityRewriter, TransportRewriter
from src.providers.transcript import (
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    Transcript,
    fingerprint,
)
