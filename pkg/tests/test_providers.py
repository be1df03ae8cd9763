import json

import httpx
import pytest

from scholarqa.gateway import (
    CompletionRequest,
    OpenAICompatProvider,
    ProviderError,
    RateLimitError,
    UnknownProviderError,
    default_registry,
    derive_seed,
)


def test_registry_has_stub_and_rejects_unknown():
    registry = default_registry()
    assert "stub" in registry.names()
    with pytest.raises(UnknownProviderError):
        registry.get("nope")
    with pytest.raises(UnknownProviderError):
        registry.complete(CompletionRequest(prompt="x", provider="nope"))


def test_derive_seed_is_stable():
    assert derive_seed("abc") == derive_seed("abc")
    assert derive_seed("abc") != derive_seed("abd")


def make_provider(handler) -> OpenAICompatProvider:
    return OpenAICompatProvider(
        name="fake",
        base_url="https://llm.example.test/v1",
        model="test-model",
        transport=httpx.MockTransport(handler),
    )


def test_remote_provider_passes_prompt_through(monkeypatch):
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["body"] = json.loads(request.content)
        seen["auth"] = request.headers.get("authorization")
        return httpx.Response(
            200, json={"choices": [{"message": {"content": "fine answer"}}]}
        )

    monkeypatch.setenv("SCHOLARQA_PROVIDER_KEY", "sekrit")
    provider = make_provider(handler)
    response = provider.complete(CompletionRequest(prompt="verbatim prompt", provider="fake"))
    assert response.text == "fine answer"
    assert seen["body"]["messages"] == [{"role": "user", "content": "verbatim prompt"}]
    assert seen["auth"] == "Bearer sekrit"


@pytest.mark.parametrize(
    "status, exc_type, retryable",
    [
        (429, RateLimitError, True),
        (500, ProviderError, True),
        (503, ProviderError, True),
        (400, ProviderError, False),
    ],
)
def test_remote_provider_error_mapping(status, exc_type, retryable):
    provider = make_provider(lambda request: httpx.Response(status, json={}))
    with pytest.raises(exc_type) as exc:
        provider.complete(CompletionRequest(prompt="x", provider="fake"))
    assert exc.value.retryable is retryable


def test_remote_provider_transport_error_is_retryable():
    def handler(request):
        raise httpx.ConnectError("refused")

    provider = make_provider(handler)
    with pytest.raises(ProviderError) as exc:
        provider.complete(CompletionRequest(prompt="x", provider="fake"))
    assert exc.value.retryable


def test_remote_provider_rejects_empty_completion():
    provider = make_provider(
        lambda request: httpx.Response(200, json={"choices": [{"message": {"content": ""}}]})
    )
    with pytest.raises(ProviderError):
        provider.complete(CompletionRequest(prompt="x", provider="fake"))
