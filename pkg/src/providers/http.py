"""JSON-over-HTTP transport with retry, backoff and a request budget"""

from __future__ import annotations

import logging
import threading
import time

import requests

from src.errors import ProviderError

logger = logging.getLogger(__name__)

RETRY_STATUS = {429, 500, 502, 503, 504}


class RateLimiter:
    """Spaces request starts so that at most `per_second` begin each second."""

    def __init__(self, per_second: float | None):
        self.interval = 1.0 / per_second if per_second else 0.0
        self._next = 0.0
        self._lock = threading.Lock()

    def wait(self):
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            start = max(now, self._next)
            self._next = start + self.interval
        if start > now:
            time.sleep(start - now)


class HttpTransport:
    def __init__(
        self,
        url: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        max_in_flight: int = 4,
        requests_per_second: float | None = None,
        session: requests.Session | None = None,
    ):
        if not url:
            raise ProviderError("live provider mode needs an endpoint URL")
        self.url = url
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.headers = {"Content-Type": "application/json"}
        if api_key:
            self.headers["Authorization"] = f"Bearer {api_key}"
        self._in_flight = threading.BoundedSemaphore(max(1, max_in_flight))
        self._limiter = RateLimiter(requests_per_second)

    def __call__(self, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                delay = self.backoff * 2 ** (attempt - 1)
                logger.warning("retrying %s in %.1fs (attempt %d): %s", self.url, delay, attempt + 1, last_error)
                time.sleep(delay)
            self._limiter.wait()
            try:
                with self._in_flight:
                    response = self.session.post(self.url, json=payload, headers=self.headers, timeout=self.timeout)
                if response.status_code in RETRY_STATUS:
                    last_error = ProviderError(f"{self.url} answered HTTP {response.status_code}")
                    continue
                response.raise_for_status()
                return response.json()
            except (requests.ConnectionError, requests.Timeout) as e:
                last_error = e
            except (requests.RequestException, ValueError) as e:
                raise ProviderError(f"request to {self.url} failed: {e}") from e
        raise ProviderError(f"request to {self.url} failed after {self.max_retries} retries: {last_error}")
