"""Recorded provider request/response pairs for deterministic replay"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from src.errors import InputFormatError, ProviderError, TranscriptMissError

logger = logging.getLogger(__name__)

Transport = Callable[[dict], dict]


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def fingerprint(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


class Transcript:
    """Append-only map from request fingerprint to recorded response."""

    def __init__(self, provider: str, path: Path | str | None = None, captured_at: str | None = None):
        self.provider = provider
        self.path = Path(path) if path else None
        self.captured_at = captured_at or datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.entries: dict[str, dict] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, payload: dict) -> bool:
        return fingerprint(payload) in self.entries

    @classmethod
    def load(cls, path: Path | str, provider: str | None = None) -> Transcript:
        path = Path(path)
        transcript = cls(provider or path.stem, path)
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise InputFormatError(path, line_no, "<json>", str(e)) from e
                if record.get("kind") == "meta":
                    transcript.provider = provider or record.get("provider", transcript.provider)
                    transcript.captured_at = record.get("captured_at", transcript.captured_at)
                    continue
                for key in ("fingerprint", "response"):
                    if key not in record:
                        raise InputFormatError(path, line_no, key, "missing")
                transcript.entries[record["fingerprint"]] = record["response"]
        logger.info("loaded %d recorded %s responses from %s", len(transcript), transcript.provider, path)
        return transcript

    def lookup(self, payload: dict) -> dict:
        key = fingerprint(payload)
        try:
            return self.entries[key]
        except KeyError:
            raise TranscriptMissError(self.provider, key) from None

    def record(self, payload: dict, response: dict) -> None:
        key = fingerprint(payload)
        with self._lock:
            if key in self.entries:
                return
            self.entries[key] = response
            if self.path is None:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            new_file = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "a", encoding="utf-8") as f:
                if new_file:
                    meta = {"kind": "meta", "provider": self.provider, "captured_at": self.captured_at}
                    f.write(canonical_json(meta) + "\n")
                entry = {"kind": "entry", "fingerprint": key, "request": payload, "response": response}
                f.write(canonical_json(entry) + "\n")


class ReplayTransport:
    def __init__(self, transcript: Transcript):
        self.transcript = transcript

    def __call__(self, payload: dict) -> dict:
        return self.transcript.lookup(payload)


class RecordingTransport:
    """Forward to the inner transport and append every exchange to the transcript."""

    def __init__(self, inner: Transport, transcript: Transcript):
        self.inner = inner
        self.transcript = transcript

    def __call__(self, payload: dict) -> dict:
        response = self.inner(payload)
        self.transcript.record(payload, response)
        return response


class ScriptedTransport:
    """Offline stand-in for a live backend: answers from a function or a fixed list."""

    def __init__(self, script):
        self._lock = threading.Lock()
        if callable(script):
            self._respond = script
        else:
            responses = list(script)

            def next_response(payload):
                if not responses:
                    raise ProviderError("scripted transport ran out of responses")
                return responses.pop(0)

            self._respond = next_response
        self.calls: list[dict] = []

    def __call__(self, payload: dict) -> dict:
        with self._lock:
            self.calls.append(payload)
            response = self._respond(payload)
        # exceptions in the script simulate backend failures
        if isinstance(response, Exception):
            raise response
        return response
