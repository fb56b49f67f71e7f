"""Scanning pipeline: segmented search, filters, estimates, reports."""

from __future__ import annotations

import datetime as dt
import math
import re
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import DomainError, InputError, RateLimitExceededError
from .records import (
    CodeSearchEstimate,
    FilterLedger,
    RepoRecord,
    ScanReport,
    SearchQuery,
)
from .sources import CODE_SAMPLE_SIZE, HARD_RESULT_CAP, SearchSource

DEFAULT_PERIOD = (dt.date(2008, 1, 1), dt.date(2024, 12, 31))
SPAM_THRESHOLD = 66

# word-boundary matching below this length keeps short terms from
# firing inside longer words ("mint" vs "mintage")
_WORD_BOUNDARY_MAX_LEN = 5


class TruncationWarning(UserWarning):
    """A single-day segment exceeded the result cap; results truncated."""


@dataclass(frozen=True)
class TruncationRecord:
    term: str
    day: dt.date
    total: int
    fetched: int


@dataclass
class Scanner:
    """Date-segmented repository search against any SearchSource.

    Ranges whose match count reaches ``result_cap`` are bisected at the
    midpoint day until each segment fits; a single day that still
    exceeds the cap is fetched truncated and recorded. Results are
    deduplicated by repo id and id-sorted, so assembly order does not
    depend on fetch scheduling.
    """

    source: SearchSource
    result_cap: int = HARD_RESULT_CAP
    fetch_workers: int = 1
    api_calls: int = 0
    truncations: list[TruncationRecord] = field(default_factory=list)

    def segmented_repo_search(self, query: SearchQuery) -> list[RepoRecord]:
        lo = query.created_from or DEFAULT_PERIOD[0]
        hi = query.created_to or DEFAULT_PERIOD[1]
        if lo > hi:
            raise DomainError(f"created range is inverted: {lo}..{hi}")
        plan: list[SearchQuery] = []
        try:
            self._plan_segments(query, lo, hi, plan)
        except RateLimitExceededError as exc:
            raise RateLimitExceededError(
                str(exc), pending_segments=[(lo.isoformat(), hi.isoformat())],
                retry_after=exc.retry_after) from exc
        if self.fetch_workers > 1 and len(plan) > 1:
            with ThreadPoolExecutor(max_workers=self.fetch_workers) as pool:
                batches = list(pool.map(self.source.repo_fetch, plan))
        else:
            batches = []
            for i, seg in enumerate(plan):
                try:
                    batches.append(self.source.repo_fetch(seg))
                except RateLimitExceededError as exc:
                    # completed segments are already cached; hand back the
                    # date ranges that still need fetching
                    pending = [(s.created_from.isoformat(), s.created_to.isoformat())
                               for s in plan[i:]]
                    raise RateLimitExceededError(
                        str(exc), pending_segments=pending,
                        retry_after=exc.retry_after) from exc
        self.api_calls += sum(max(1, math.ceil(len(b) / 100)) for b in batches)
        by_id: dict[int, RepoRecord] = {}
        for batch in batches:
            for rec in batch:
                by_id.setdefault(rec.repo_id, rec)
        return [by_id[i] for i in sorted(by_id)]

    def _plan_segments(self, query: SearchQuery, lo: dt.date, hi: dt.date,
                       plan: list[SearchQuery]) -> None:
        segment = query.with_range(lo, hi)
        total = self.source.repo_probe(segment)
        self.api_calls += 1
        if total == 0:
            return
        if total < self.result_cap:
            plan.append(segment)
            return
        if lo == hi:
            warnings.warn(
                f"{query.term}: {total} matches on {lo}, cap is {self.result_cap}; "
                "fetching truncated", TruncationWarning, stacklevel=2)
            self.truncations.append(TruncationRecord(
                term=query.term, day=lo, total=total,
                fetched=min(total, self.result_cap)))
            plan.append(segment)
            return
        mid = lo + dt.timedelta(days=(hi - lo).days // 2)
        self._plan_segments(query, lo, mid, plan)
        self._plan_segments(query, mid + dt.timedelta(days=1), hi, plan)


# ---------------------------------------------------------------------------
# filters
# ---------------------------------------------------------------------------

def filter_spam(records: Sequence[RepoRecord],
                per_user_threshold: int = SPAM_THRESHOLD,
                allowlist: Iterable[str] = ()) -> tuple[list[RepoRecord], int]:
    """Drop every record of owners holding >= threshold records,
    unless the owner is allowlisted. Order-stable and idempotent."""
    allowed = {a.lower() for a in allowlist}
    counts = Counter(r.owner.lower() for r in records)
    kept = [r for r in records
            if counts[r.owner.lower()] < per_user_threshold
            or r.owner.lower() in allowed]
    return kept, len(records) - len(kept)


def _keyword_pattern(keyword: str) -> re.Pattern:
    kw = keyword.strip().lower()
    if " " in kw or len(kw) > _WORD_BOUNDARY_MAX_LEN:
        return re.compile(re.escape(kw))
    return re.compile(rf"\b{re.escape(kw)}\b")


def filter_keywords(records: Sequence[RepoRecord],
                    exclusion_list: Iterable[str]) -> tuple[list[RepoRecord], int]:
    """Drop records whose name/description/topics match any exclusion
    keyword (case-insensitive; word-boundary for short single words)."""
    patterns = [_keyword_pattern(k) for k in exclusion_list]
    kept = []
    removed = 0
    for rec in records:
        text = rec.searchable_text()
        if any(p.search(text) for p in patterns):
            removed += 1
        else:
            kept.append(rec)
    return kept, removed


def relevance_filter(records: Sequence[RepoRecord],
                     relevancy_words: Iterable[str],
                     similar_name_list: Iterable[str]
                     ) -> tuple[list[RepoRecord], list[RepoRecord], list[RepoRecord]]:
    """Three-way relevance split.

    kept:     a relevancy word appears in name/description/topics;
    excluded: no relevancy word and the name matches the similar-name
              list (lookalike projects, misspellings);
    possible: everything else, to be resolved by review decisions.
    """
    rel = [w.strip().lower() for w in relevancy_words if w.strip()]
    sim = [s.strip().lower() for s in similar_name_list if s.strip()]
    kept, possible, excluded = [], [], []
    for rec in records:
        text = rec.searchable_text()
        if any(w in text for w in rel):
            kept.append(rec)
        elif any(s in rec.full_name.lower() for s in sim):
            excluded.append(rec)
        else:
            possible.append(rec)
    return kept, possible, excluded


def apply_review_decisions(possible: Sequence[RepoRecord],
                           decisions: dict[str, str]
                           ) -> tuple[list[RepoRecord], list[RepoRecord], list[RepoRecord]]:
    """Resolve the ``possible`` bucket with recorded review decisions.

    Decision values: "yes" (relevant), "possible" (kept, uncertain),
    "no" (excluded). Records without a decision stay "possible".
    """
    yes, still_possible, rejected = [], [], []
    for rec in possible:
        decision = decisions.get(rec.full_name, "possible").lower()
        if decision == "yes":
            yes.append(rec)
        elif decision == "no":
            rejected.append(rec)
        elif decision == "possible":
            still_possible.append(rec)
        else:
            raise InputError(f"unknown review decision {decision!r} "
                             f"for {rec.full_name}")
    return yes, still_possible, rejected


# ---------------------------------------------------------------------------
# code-search estimation
# ---------------------------------------------------------------------------

def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def estimate_unique_repos(term: str, total_hits: int,
                          first_page_repo_ids: Sequence[int],
                          sample_size: int = CODE_SAMPLE_SIZE,
                          language: str | None = None) -> CodeSearchEstimate:
    """Unique-repository estimate from first-page duplication.

    When all hits are observable (total <= sample size) the unique ids
    are counted directly; otherwise the duplication quota
    1 - unique/sample extrapolates to the full hit count.
    """
    if sample_size < 1:
        raise DomainError(f"sample_size must be >= 1, got {sample_size}")
    if total_hits < 0:
        raise DomainError(f"total_hits must be >= 0, got {total_hits}")
    if total_hits > 0 and not first_page_repo_ids:
        raise InputError(f"{term}: positive hit count with empty id sample")
    unique = len(set(first_page_repo_ids))
    if total_hits <= sample_size:
        return CodeSearchEstimate(
            term=term, total_hits=total_hits, sample_size=len(first_page_repo_ids),
            sampled_unique_ids=unique,
            duplication_quota=(1.0 - unique / len(first_page_repo_ids)
                               if first_page_repo_ids else 0.0),
            estimated_repos=unique, exact=True, language=language)
    observed = len(first_page_repo_ids)
    if observed > sample_size:
        raise InputError(f"{term}: sample larger than sample_size")
    quota = 1.0 - unique / sample_size
    estimate = _round_half_up(total_hits * unique / sample_size)
    return CodeSearchEstimate(
        term=term, total_hits=total_hits, sample_size=sample_size,
        sampled_unique_ids=unique, duplication_quota=quota,
        estimated_repos=estimate, exact=False, language=language)


def apply_retention_ratio(estimate: int, retention: float) -> int:
    """Scale an estimate by a retention (1 - false positive) ratio."""
    if not 0.0 <= retention <= 1.0:
        raise DomainError(f"retention must be in [0, 1], got {retention}")
    return _round_half_up(estimate * retention)


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineOutcome:
    """Everything build_report needs about one term's pipeline run."""

    term: str
    initial: int
    spam_removed: int
    keyword_removed: int
    relevance_excluded: int
    final_records: tuple[RepoRecord, ...]
    possible: int = 0


def run_repo_pipeline(term: str, records: Sequence[RepoRecord],
                      exclusion_keywords: Iterable[str],
                      spam_threshold: int = SPAM_THRESHOLD,
                      spam_allowlist: Iterable[str] = (),
                      relevancy_words: Iterable[str] | None = None,
                      similar_names: Iterable[str] | None = None,
                      review_decisions: dict[str, str] | None = None
                      ) -> PipelineOutcome:
    """Spam filter, keyword filter, and (optionally) the relevance
    procedure with recorded review decisions."""
    after_spam, spam_removed = filter_spam(records, spam_threshold, spam_allowlist)
    after_kw, kw_removed = filter_keywords(after_spam, exclusion_keywords)
    if relevancy_words is None:
        return PipelineOutcome(
            term=term, initial=len(records), spam_removed=spam_removed,
            keyword_removed=kw_removed, relevance_excluded=0,
            final_records=tuple(after_kw))
    kept, possible_pool, excluded = relevance_filter(
        after_kw, relevancy_words, similar_names or ())
    yes, still_possible, rejected = apply_review_decisions(
        possible_pool, review_decisions or {})
    final = kept + yes + still_possible
    final.sort(key=lambda r: r.repo_id)
    return PipelineOutcome(
        term=term, initial=len(records), spam_removed=spam_removed,
        keyword_removed=kw_removed,
        relevance_excluded=len(excluded) + len(rejected),
        final_records=tuple(final), possible=len(still_possible))


def build_report(outcomes: Sequence[PipelineOutcome],
                 estimates: Sequence[CodeSearchEstimate] = ()) -> ScanReport:
    report = ScanReport()
    for out in outcomes:
        ledger = FilterLedger(
            term=out.term, initial=out.initial, spam_removed=out.spam_removed,
            mining_filtered=out.keyword_removed + out.relevance_excluded,
            final=len(out.final_records), possible=out.possible)
        report.ledgers.append(ledger)
        years = Counter(r.created_at.year for r in out.final_records)
        report.per_year[out.term] = dict(sorted(years.items()))
    report.estimates = list(estimates)
    return report


def ledger_rows(report: ScanReport):
    for ledger in report.ledgers:
        yield {"algorithm": ledger.term, "initial": ledger.initial,
               "spam_removed": ledger.spam_removed,
               "mining_filtered": ledger.mining_filtered,
               "final": ledger.final}


def per_year_rows(report: ScanReport):
    for term, years in report.per_year.items():
        for year, count in years.items():
            yield {"algorithm": term, "year": year, "count": count}


def estimate_rows(report: ScanReport):
    for e in report.estimates:
        yield {"term": e.term, "language": e.language or "",
               "total_hits": e.total_hits, "sample_size": e.sample_size,
               "sampled_unique_ids": e.sampled_unique_ids,
               "duplication_quota": round(e.duplication_quota, 6),
               "estimated_repos": e.estimated_repos,
               "exact": "yes" if e.exact else "no"}
