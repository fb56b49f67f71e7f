"""Live REST client for the code-hosting search API.

Authenticates with a bearer token from the GITHUB_TOKEN environment
variable, pages at 100 results per request up to the service's hard cap
of 1000 per query, takes one token-bucket slot per request, and backs
off exponentially on 403/429 using the server's Retry-After hint when
present. When retries run out it raises RateLimitExceededError carrying
the segments still pending, so a rerun can resume against the cache.
"""

from __future__ import annotations

import os
import time

import requests

from ..errors import NetworkError, RateLimitExceededError
from .ratelimit import TokenBucket
from .records import RepoRecord, SearchQuery
from .sources import HARD_RESULT_CAP

BASE_URL = "https://api.github.com"
PAGE_SIZE = 100
REPO_SEARCH_PER_MINUTE = 30
CODE_SEARCH_PER_MINUTE = 10


def build_repo_query(query: SearchQuery) -> str:
    parts = [query.term]
    if query.created_from or query.created_to:
        lo = query.created_from.isoformat() if query.created_from else "*"
        hi = query.created_to.isoformat() if query.created_to else "*"
        parts.append(f"created:{lo}..{hi}")
    for kw in query.negative_keywords:
        parts.append(f'NOT "{kw}"' if " " in kw else f"NOT {kw}")
    return " ".join(parts)


def build_code_query(query: SearchQuery) -> str:
    parts = [query.term]
    if query.language:
        parts.append(f"language:{query.language}")
    for kw in query.negative_keywords:
        parts.append(f'NOT "{kw}"' if " " in kw else f"NOT {kw}")
    for path in query.path_excludes:
        parts.append(f"-path:{path}")
    for ext in query.extension_excludes:
        parts.append(f"-extension:{ext}")
    return " ".join(parts)


class GitHubSearchClient:
    def __init__(self, token: str | None = None, session=None,
                 repo_bucket: TokenBucket | None = None,
                 code_bucket: TokenBucket | None = None,
                 max_retries: int = 5, sleep=time.sleep, timeout: float = 30.0):
        self._token = token or os.environ.get("GITHUB_TOKEN")
        self._session = session or requests.Session()
        self._repo_bucket = repo_bucket or TokenBucket(REPO_SEARCH_PER_MINUTE)
        self._code_bucket = code_bucket or TokenBucket(CODE_SEARCH_PER_MINUTE)
        self._max_retries = max_retries
        self._sleep = sleep
        self._timeout = timeout

    def _headers(self) -> dict:
        headers = {"Accept": "application/vnd.github+json",
                   "X-GitHub-Api-Version": "2022-11-28"}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        return headers

    def _get(self, path: str, params: dict, bucket: TokenBucket) -> dict:
        retry_after = None
        for attempt in range(self._max_retries + 1):
            bucket.acquire()
            try:
                resp = self._session.get(BASE_URL + path, params=params,
                                         headers=self._headers(),
                                         timeout=self._timeout)
            except requests.RequestException as exc:
                raise NetworkError(f"request failed: {exc}") from exc
            if resp.status_code == 200:
                return resp.json()
            if resp.status_code in (403, 429):
                retry_after = _retry_delay(resp, attempt)
                if attempt < self._max_retries:
                    self._sleep(retry_after)
                    continue
                break
            raise NetworkError(
                f"search API returned {resp.status_code}: {resp.text[:200]}")
        raise RateLimitExceededError(
            f"rate limit still exhausted after {self._max_retries} retries",
            retry_after=retry_after)

    # -- source interface ----------------------------------------------

    def repo_probe(self, query: SearchQuery) -> int:
        data = self._get("/search/repositories",
                         {"q": build_repo_query(query), "per_page": 1},
                         self._repo_bucket)
        return int(data["total_count"])

    def repo_fetch(self, query: SearchQuery) -> list[RepoRecord]:
        records: list[RepoRecord] = []
        q = build_repo_query(query)
        for page in range(1, HARD_RESULT_CAP // PAGE_SIZE + 1):
            data = self._get("/search/repositories",
                             {"q": q, "per_page": PAGE_SIZE, "page": page},
                             self._repo_bucket)
            items = data.get("items", [])
            records.extend(RepoRecord.from_api_item(it, query.term) for it in items)
            if len(items) < PAGE_SIZE or len(records) >= HARD_RESULT_CAP:
                break
        return records[:HARD_RESULT_CAP]

    def code_probe(self, term: str, language: str | None = None):
        query = SearchQuery(term=term, language=language)
        q = build_code_query(query)
        total = 0
        repo_ids: list[int] = []
        for page in range(1, HARD_RESULT_CAP // PAGE_SIZE + 1):
            data = self._get("/search/code",
                             {"q": q, "per_page": PAGE_SIZE, "page": page},
                             self._code_bucket)
            total = int(data["total_count"])
            items = data.get("items", [])
            repo_ids.extend(int(it["repository"]["id"]) for it in items)
            if len(items) < PAGE_SIZE or len(repo_ids) >= HARD_RESULT_CAP:
                break
        return total, repo_ids[:HARD_RESULT_CAP]


def _retry_delay(resp, attempt: int) -> float:
    header = resp.headers.get("Retry-After")
    if header:
        try:
            return max(1.0, float(header))
        except ValueError:
            pass
    reset = resp.headers.get("X-RateLimit-Reset")
    if reset:
        try:
            return max(1.0, float(reset) - time.time())
        except ValueError:
            pass
    return float(2 ** attempt)
