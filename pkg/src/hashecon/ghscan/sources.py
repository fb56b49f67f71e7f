"""Search sources: synthetic ground truth, cached replay, read-through.

A source answers three questions, mirroring what one or more API calls
would return:

    repo_probe(query)  -> total match count           (one request)
    repo_fetch(query)  -> up to ``hard cap`` records  (paged requests)
    code_probe(term, language) -> (total_hits, first-page repo ids)

``FixtureSource`` answers only from a recorded cache and raises
``FixtureMissError`` otherwise, which is what keeps test runs fully
offline. ``CachingSource`` wraps any live source and records every
response so a later fixture run can replay it.
"""

from __future__ import annotations

from typing import Protocol

from ..errors import FixtureMissError
from .cache import QueryCache, normalize_code_query, normalize_repo_query
from .records import RepoRecord, SearchQuery

HARD_RESULT_CAP = 1000
CODE_SAMPLE_SIZE = 1000


class SearchSource(Protocol):
    def repo_probe(self, query: SearchQuery) -> int: ...
    def repo_fetch(self, query: SearchQuery) -> list[RepoRecord]: ...
    def code_probe(self, term: str, language: str | None) -> tuple[int, list[int]]: ...


class SyntheticSource:
    """Ground-truth record list served with API-like semantics.

    Used to build fixtures and to property-test segmentation: the
    ground truth is known, so segmentation completeness is checkable.
    Fetches return at most ``HARD_RESULT_CAP`` records, id-ordered.
    """

    def __init__(self, records_by_term: dict[str, list[RepoRecord]],
                 code_hits: dict[tuple[str, str | None], tuple[int, list[int]]] | None = None):
        self._records = {t: sorted(rs, key=lambda r: r.repo_id)
                         for t, rs in records_by_term.items()}
        self._code = dict(code_hits or {})
        self.probe_calls = 0
        self.fetch_calls = 0

    def _matching(self, query: SearchQuery) -> list[RepoRecord]:
        records = self._records.get(query.term.lower(), [])
        lo, hi = query.created_from, query.created_to
        return [r for r in records
                if (lo is None or r.created_at >= lo)
                and (hi is None or r.created_at <= hi)]

    def repo_probe(self, query: SearchQuery) -> int:
        self.probe_calls += 1
        return len(self._matching(query))

    def repo_fetch(self, query: SearchQuery) -> list[RepoRecord]:
        self.fetch_calls += 1
        return self._matching(query)[:HARD_RESULT_CAP]

    def code_probe(self, term: str, language: str | None = None):
        self.probe_calls += 1
        return self._code[(term.lower(), language)]


class FixtureSource:
    """Replay from a recorded cache only; never touches the network."""

    def __init__(self, cache_dir):
        self._cache = QueryCache(cache_dir)

    def repo_probe(self, query: SearchQuery) -> int:
        normalized = normalize_repo_query(query.term, query.created_from,
                                          query.created_to)
        return int(self._cache.read_manifest(normalized)["total_count"])

    def repo_fetch(self, query: SearchQuery) -> list[RepoRecord]:
        normalized = normalize_repo_query(query.term, query.created_from,
                                          query.created_to)
        manifest = self._cache.read_manifest(normalized)
        if not manifest.get("fetched", False):
            raise FixtureMissError(f"probe-only recording for {normalized!r}")
        return self._cache.read_records(normalized)

    def code_probe(self, term: str, language: str | None = None):
        normalized = normalize_code_query(term, language)
        manifest = self._cache.read_manifest(normalized)
        return int(manifest["total_hits"]), self._cache.read_id_sample(normalized)


class CachingSource:
    """Read-through recorder around another source."""

    def __init__(self, inner, cache_dir):
        self._inner = inner
        self._cache = QueryCache(cache_dir)

    def repo_probe(self, query: SearchQuery) -> int:
        normalized = normalize_repo_query(query.term, query.created_from,
                                          query.created_to)
        if self._cache.has(normalized):
            return int(self._cache.read_manifest(normalized)["total_count"])
        total = self._inner.repo_probe(query)
        self._cache.write_manifest(normalized, total_count=total, fetched=False)
        return total

    def repo_fetch(self, query: SearchQuery) -> list[RepoRecord]:
        normalized = normalize_repo_query(query.term, query.created_from,
                                          query.created_to)
        if self._cache.has(normalized):
            manifest = self._cache.read_manifest(normalized)
            if manifest.get("fetched", False):
                return self._cache.read_records(normalized)
        records = self._inner.repo_fetch(query)
        self._cache.write_records(normalized, records)
        self._cache.write_manifest(
            normalized,
            total_count=self._inner.repo_probe(query),
            fetched=True, record_count=len(records))
        return records

    def code_probe(self, term: str, language: str | None = None):
        normalized = normalize_code_query(term, language)
        if self._cache.has(normalized):
            manifest = self._cache.read_manifest(normalized)
            return int(manifest["total_hits"]), self._cache.read_id_sample(normalized)
        total, ids = self._inner.code_probe(term, language)
        self._cache.write_manifest(normalized, total_hits=total,
                                   id_sample=list(ids))
        return total, ids
