"""Provider-agnostic completion interface.

The "stub" provider (see :mod:`.stub`) is always registered and is a pure
function of (prompt, seed), so the whole system runs and tests offline.
Remote providers speak the common chat-completions wire shape and pass
the rendered prompt through unmodified.
"""

import hashlib
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Protocol

import httpx


class ProviderError(Exception):
    """Completion failure; ``retryable`` hints whether a retry could help."""

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


class RateLimitError(ProviderError):
    def __init__(self, message: str = "rate limited"):
        super().__init__(message, retryable=True)


class UnknownProviderError(ProviderError):
    def __init__(self, name: str):
        super().__init__(f"unknown provider: {name!r}", retryable=False)
        self.name = name


def derive_seed(prompt: str) -> int:
    """Stable seed from the rendered prompt, identical across runs."""
    digest = hashlib.sha256(prompt.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    provider: str = "stub"
    seed: int | None = None

    def effective_seed(self) -> int:
        return self.seed if self.seed is not None else derive_seed(self.prompt)


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    provider: str
    metadata: dict[str, Any] = field(default_factory=dict)


class CompletionProvider(Protocol):
    name: str

    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


class ProviderRegistry:
    def __init__(self) -> None:
        self._providers: dict[str, CompletionProvider] = {}

    def register(self, provider: CompletionProvider) -> None:
        self._providers[provider.name] = provider

    def get(self, name: str) -> CompletionProvider:
        try:
            return self._providers[name]
        except KeyError:
            raise UnknownProviderError(name) from None

    def names(self) -> list[str]:
        return sorted(self._providers)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        return self.get(request.provider).complete(request)


def default_registry() -> ProviderRegistry:
    from .stub import StubProvider

    registry = ProviderRegistry()
    registry.register(StubProvider())
    return registry


class OpenAICompatProvider:
    """Chat-completions client for any OpenAI-compatible endpoint.

    The API key is read from the environment (never from config files).
    ``max_in_flight`` bounds concurrent requests.
    """

    def __init__(
        self,
        name: str,
        base_url: str,
        model: str,
        api_key_env: str = "SCHOLARQA_PROVIDER_KEY",
        max_in_flight: int = 4,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.name = name
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self._slots = threading.Semaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        headers = {}
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "seed": request.effective_seed() % 2**31,
        }
        with self._slots:
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions", json=body, headers=headers
                )
            except httpx.TransportError as exc:
                raise ProviderError(f"transport failure: {exc}", retryable=True) from exc
        if response.status_code == 429:
            raise RateLimitError()
        if response.status_code >= 500:
            raise ProviderError(
                f"server error {response.status_code}", retryable=True
            )
        if response.status_code >= 400:
            raise ProviderError(
                f"request rejected ({response.status_code}): {response.text[:200]}",
                retryable=False,
            )
        try:
            text = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed completion payload: {exc}") from exc
        if not text:
            raise ProviderError("provider returned an empty completion")
        return CompletionResponse(
            text=text,
            provider=self.name,
            metadata={"model": self.model, "seed": body["seed"]},
        )
