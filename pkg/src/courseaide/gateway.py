"""Uniform completion interface over chat-model providers.

All network nondeterminism lives here. The scripted mock provider replays
ordered substring rules, which makes the whole pipeline deterministic in
tests; the HTTP provider adapts any OpenAI-style chat endpoint.
"""

from __future__ import annotations

import logging
import os
import re
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol

import yaml

logger = logging.getLogger("courseaide.gateway")

DEFAULT_TEMPERATURE = 0.2
YES_NO_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT_CHARS = 8000

_YES_NO_INSTRUCTION = (
    "Answer the following question with a single word, yes or no, and nothing else.\n\n"
)


class GatewayError(Exception):
    """Base for completion failures; carries the request id for log correlation."""

    def __init__(self, message: str, request_id: str = ""):
        super().__init__(message)
        self.request_id = request_id


class DeadlineExceeded(GatewayError):
    """Retries or the wall-clock deadline were exhausted."""


class ProviderRejected(GatewayError):
    """The provider refused the request; retrying will not help."""


class UnparseableVerdict(GatewayError):
    """A yes/no query returned text that starts with neither."""


class TransientProviderError(Exception):
    """Raised by providers for failures worth retrying."""


@dataclass
class CompletionRequest:
    prompt: str
    temperature: float = DEFAULT_TEMPERATURE
    max_output_chars: int = DEFAULT_MAX_OUTPUT_CHARS
    request_id: str = field(default_factory=lambda: uuid.uuid4().hex)


@dataclass
class CompletionResult:
    text: str
    provider_id: str
    latency_ms: int
    truncated: bool
    attempts: int = 1


class CompletionProvider(Protocol):
    provider_id: str

    def complete(self, prompt: str, temperature: float, max_output_chars: int) -> str: ...


@dataclass
class MockRule:
    contains: str
    response: str


class ScriptedMockProvider:
    """Deterministic provider driven by ordered (substring -> response) rules.

    The first rule whose `contains` text appears in the prompt wins; with no
    match the configured default response is returned. Failures can be
    scripted for retry tests via `fail_times` / `fail_always`.
    """

    provider_id = "scripted-mock"

    def __init__(
        self,
        rules: list[MockRule] | None = None,
        default_response: str = "I don't have a scripted answer for that.",
        fail_times: int = 0,
        fail_always: bool = False,
    ):
        self.rules = list(rules or [])
        self.default_response = default_response
        self.fail_times = fail_times
        self.fail_always = fail_always
        self.calls: list[str] = []  # prompts seen, for test introspection

    @classmethod
    def from_file(cls, path: str) -> "ScriptedMockProvider":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        rules = [MockRule(contains=r["contains"], response=r["response"]) for r in data.get("rules", [])]
        return cls(rules=rules, default_response=data.get("default", "I don't have a scripted answer for that."))

    def complete(self, prompt: str, temperature: float, max_output_chars: int) -> str:
        self.calls.append(prompt)
        if self.fail_always:
            raise TransientProviderError("scripted permanent failure")
        if self.fail_times > 0:
            self.fail_times -= 1
            raise TransientProviderError("scripted transient failure")
        for rule in self.rules:
            if rule.contains in prompt:
                return rule.response
        return self.default_response


class HttpChatProvider:
    """Adapter for an OpenAI-style /chat/completions endpoint.

    Kept deliberately thin and untested against live models; the scripted
    mock carries the test suite.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "LLM_API_KEY",
        timeout_s: float = 60.0,
        provider_id: str = "http",
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.provider_id = provider_id

    def complete(self, prompt: str, temperature: float, max_output_chars: int) -> str:
        import httpx

        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = httpx.post(
                self.endpoint,
                json={
                    "model": self.model,
                    "messages": [{"role": "user", "content": prompt}],
                    "temperature": temperature,
                },
                headers=headers,
                timeout=self.timeout_s,
            )
        except httpx.HTTPError as exc:
            raise TransientProviderError(f"request failed: {exc}") from exc
        if resp.status_code >= 500:
            raise TransientProviderError(f"provider returned {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderRejected(f"provider returned {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransientProviderError(f"malformed provider response: {exc}") from exc


class _FifoGate:
    """Concurrency cap with strict FIFO admission beyond the cap."""

    def __init__(self, capacity: int):
        self._capacity = capacity
        self._active = 0
        self._queue: deque[object] = deque()
        self._cond = threading.Condition()

    def __enter__(self):
        token = object()
        with self._cond:
            self._queue.append(token)
            while self._active >= self._capacity or self._queue[0] is not token:
                self._cond.wait()
            self._queue.popleft()
            self._active += 1
        return self

    def __exit__(self, *exc):
        with self._cond:
            self._active -= 1
            self._cond.notify_all()
        return False


class Gateway:
    """Retrying completion front end shared by every caller in the service."""

    def __init__(
        self,
        provider: CompletionProvider,
        retries: int = 2,
        backoff_s: float = 0.2,
        deadline_s: float = 60.0,
        max_concurrency: int = 8,
        sleep=time.sleep,
        clock=time.monotonic,
    ):
        self.provider = provider
        self.retries = retries
        self.backoff_s = backoff_s
        self.deadline_s = deadline_s
        self._gate = _FifoGate(max_concurrency)
        self._sleep = sleep
        self._clock = clock

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """Run one completion with up to `retries` retries and a deadline.

        Raises DeadlineExceeded when retries or the deadline run out and
        ProviderRejected for non-retryable provider refusals.
        """
        start = self._clock()
        attempts = 0
        last_error: Exception | None = None
        with self._gate:
            while attempts <= self.retries:
                if self._clock() - start > self.deadline_s:
                    break
                attempts += 1
                try:
                    text = self.provider.complete(
                        request.prompt, request.temperature, request.max_output_chars
                    )
                except TransientProviderError as exc:
                    last_error = exc
                    logger.warning(
                        "completion attempt %d/%d failed (request %s): %s",
                        attempts, self.retries + 1, request.request_id, exc,
                    )
                    if attempts <= self.retries:
                        self._sleep(self.backoff_s * (2 ** (attempts - 1)))
                    continue
                except ProviderRejected as exc:
                    raise ProviderRejected(str(exc), request_id=request.request_id) from exc
                truncated = len(text) > request.max_output_chars
                if truncated:
                    text = text[: request.max_output_chars]
                latency_ms = max(0, int((self._clock() - start) * 1000))
                return CompletionResult(
                    text=text,
                    provider_id=self.provider.provider_id,
                    latency_ms=latency_ms,
                    truncated=truncated,
                    attempts=attempts,
                )
        raise DeadlineExceeded(
            f"completion failed after {attempts} attempts: {last_error}",
            request_id=request.request_id,
        )

    def yes_no(self, question: str) -> bool:
        """Ask a constrained yes/no question; parse the leading verdict."""
        request = CompletionRequest(
            prompt=_YES_NO_INSTRUCTION + question,
            temperature=YES_NO_TEMPERATURE,
            max_output_chars=64,
        )
        result = self.complete(request)
        match = re.match(r"\s*(yes|no)\b", result.text, flags=re.IGNORECASE)
        if not match:
            raise UnparseableVerdict(
                f"expected yes/no, got {result.text[:80]!r}", request_id=request.request_id
            )
        return match.group(1).lower() == "yes"


def make_provider(config: dict) -> CompletionProvider:
    """Build a completion provider from a config mapping.

    ``{"provider": "scripted", "script": path}`` or
    ``{"provider": "http", "endpoint": ..., "model": ..., "api_key_env": ...}``.
    """
    kind = config.get("provider", "scripted")
    if kind == "scripted":
        script = config.get("script")
        if script:
            return ScriptedMockProvider.from_file(script)
        return ScriptedMockProvider(default_response=config.get("default", "No scripted answer."))
    if kind == "http":
        return HttpChatProvider(
            endpoint=config["endpoint"],
            model=config["model"],
            api_key_env=config.get("api_key_env", "LLM_API_KEY"),
            timeout_s=float(config.get("timeout_s", 60.0)),
        )
    raise ValueError(f"unknown completion provider {kind!r}")


def make_gateway(config: dict) -> Gateway:
    return Gateway(
        provider=make_provider(config),
        retries=int(config.get("retries", 2)),
        backoff_s=float(config.get("backoff_s", 0.2)),
        deadline_s=float(config.get("deadline_s", 60.0)),
        max_concurrency=int(config.get("max_concurrency", 8)),
    )
