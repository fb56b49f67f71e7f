"""Data shapes for repository scanning."""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field

from ..errors import DomainError, InputError, InternalError


@dataclass(frozen=True)
class RepoRecord:
    repo_id: int
    full_name: str
    owner: str
    stars: int
    created_at: dt.date
    matched_term: str
    description: str | None = None
    topics: tuple[str, ...] = ()

    def __post_init__(self):
        if self.stars < 0:
            raise DomainError(f"negative star count on {self.full_name}")

    def searchable_text(self) -> str:
        parts = [self.full_name]
        if self.description:
            parts.append(self.description)
        parts.extend(self.topics)
        return " ".join(parts).lower()

    def to_json_line(self) -> str:
        payload = {
            "repo_id": self.repo_id,
            "full_name": self.full_name,
            "owner": self.owner,
            "description": self.description,
            "topics": list(self.topics),
            "stars": self.stars,
            "created_at": self.created_at.isoformat(),
            "matched_term": self.matched_term,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json_line(cls, line: str) -> "RepoRecord":
        try:
            d = json.loads(line)
            return cls(
                repo_id=int(d["repo_id"]),
                full_name=d["full_name"],
                owner=d["owner"],
                description=d.get("description"),
                topics=tuple(d.get("topics") or ()),
                stars=int(d.get("stars", 0)),
                created_at=dt.date.fromisoformat(d["created_at"]),
                matched_term=d.get("matched_term", ""),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad record line: {exc}") from None

    @classmethod
    def from_api_item(cls, item: dict, matched_term: str) -> "RepoRecord":
        created = item.get("created_at", "")
        return cls(
            repo_id=int(item["id"]),
            full_name=item["full_name"],
            owner=item.get("owner", {}).get("login", item["full_name"].split("/")[0]),
            description=item.get("description"),
            topics=tuple(item.get("topics") or ()),
            stars=int(item.get("stargazers_count", 0)),
            created_at=dt.date.fromisoformat(created[:10]),
            matched_term=matched_term,
        )


@dataclass(frozen=True)
class SearchQuery:
    term: str
    created_from: dt.date | None = None
    created_to: dt.date | None = None
    language: str | None = None
    negative_keywords: tuple[str, ...] = ()
    path_excludes: tuple[str, ...] = ()
    extension_excludes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.term.strip():
            raise InputError("search term must be nonempty")

    def with_range(self, created_from: dt.date, created_to: dt.date) -> "SearchQuery":
        return SearchQuery(term=self.term, created_from=created_from,
                           created_to=created_to, language=self.language,
                           negative_keywords=self.negative_keywords,
                           path_excludes=self.path_excludes,
                           extension_excludes=self.extension_excludes)


@dataclass(frozen=True)
class CodeSearchEstimate:
    term: str
    total_hits: int
    sample_size: int
    sampled_unique_ids: int
    duplication_quota: float
    estimated_repos: int
    exact: bool
    language: str | None = None


@dataclass(frozen=True)
class FilterLedger:
    """Per-term accounting of the filtering pipeline.

    ``mining_filtered`` folds keyword and relevance removals together,
    the same way the reference per-algorithm collection ledger does.
    """

    term: str
    initial: int
    spam_removed: int
    mining_filtered: int
    final: int
    possible: int = 0

    def __post_init__(self):
        expected = self.initial - self.spam_removed - self.mining_filtered
        if self.final != expected:
            raise InternalError(
                f"{self.term}: ledger broken: {self.initial} - {self.spam_removed}"
                f" - {self.mining_filtered} = {expected}, reported {self.final}")
        if self.possible > self.final:
            raise InternalError(f"{self.term}: possible exceeds final count")


@dataclass
class ScanReport:
    ledgers: list[FilterLedger] = field(default_factory=list)
    per_year: dict[str, dict[int, int]] = field(default_factory=dict)
    estimates: list[CodeSearchEstimate] = field(default_factory=list)

    def ledger_for(self, term: str) -> FilterLedger:
        for ledger in self.ledgers:
            if ledger.term == term:
                return ledger
        raise InputError(f"no ledger for term {term!r}")
