"""HTTP client for a remote scholarly search API.

Interchangeable with the local :class:`~scholarqa.corpus.CorpusIndex`
behind the same retrieval contract: ranked full-text-filtered search
plus record fetch by id. The endpoint base URL comes from configuration
and the API key from an environment variable, never from config files.

Transient failures (429 and 5xx) are retried with exponential backoff a
small, configurable number of times.
"""

import os
import time

import httpx

from .corpus import FormattedQuery, Hit, PaperRecord, RetrievalResult

DEFAULT_API_KEY_ENV = "SCHOLARQA_API_KEY"


class RemoteSearchError(Exception):
    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


class RemoteSearchClient:
    """Client for a search service exposing /search and /papers/{id}.

    Expected wire shape: ``GET {base}/search?q=...&limit=k&full_text=true``
    returning ``{"results": [{record fields..., "score": float}, ...]}``,
    and ``GET {base}/papers/{id}`` returning a single record object.
    """

    def __init__(
        self,
        base_url: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 20.0,
        max_retries: int = 2,
        backoff_seconds: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._seen: dict[str, PaperRecord] = {}

    def _headers(self) -> dict[str, str]:
        key = os.environ.get(self.api_key_env, "")
        return {"Authorization": f"Bearer {key}"} if key else {}

    def _get(self, path: str, params: dict | None = None) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_seconds * 2 ** (attempt - 1))
            try:
                response = self._client.get(
                    f"{self.base_url}{path}", params=params, headers=self._headers()
                )
            except httpx.TransportError as exc:
                last_error = RemoteSearchError(f"transport failure: {exc}", retryable=True)
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = RemoteSearchError(
                    f"backend returned {response.status_code}", retryable=True
                )
                continue
            return response
        raise last_error if last_error else RemoteSearchError("request failed")

    def search(
        self, query: FormattedQuery | str, k: int = 5, require_full_text: bool = True
    ) -> RetrievalResult:
        fq = query if isinstance(query, FormattedQuery) else FormattedQuery(query)
        response = self._get(
            "/search",
            params={"q": fq.text, "limit": k, "full_text": str(require_full_text).lower()},
        )
        if response.status_code != 200:
            raise RemoteSearchError(f"search failed with {response.status_code}")
        hits = []
        for item in response.json().get("results", [])[:k]:
            record = PaperRecord.from_json(item)
            self._seen[record.id] = record
            hits.append(Hit(record.id, float(item.get("score", 0.0))))
        return RetrievalResult(query=fq, hits=tuple(hits))

    def get(self, paper_id: str) -> PaperRecord | None:
        if paper_id in self._seen:
            return self._seen[paper_id]
        response = self._get(f"/papers/{paper_id}")
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            raise RemoteSearchError(f"fetch failed with {response.status_code}")
        record = PaperRecord.from_json(response.json())
        self._seen[record.id] = record
        return record
