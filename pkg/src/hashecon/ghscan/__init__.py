from .records import (
    CodeSearchEstimate,
    FilterLedger,
    RepoRecord,
    ScanReport,
    SearchQuery,
)
from .sources import CachingSource, FixtureSource, SyntheticSource
from .pipeline import (
    Scanner,
    apply_retention_ratio,
    apply_review_decisions,
    build_report,
    estimate_rows,
    estimate_unique_repos,
    filter_keywords,
    filter_spam,
    ledger_rows,
    per_year_rows,
    relevance_filter,
    run_repo_pipeline,
)

__all__ = [
    "CachingSource", "CodeSearchEstimate", "FilterLedger", "FixtureSource",
    "RepoRecord", "ScanReport", "Scanner", "SearchQuery", "SyntheticSource",
    "apply_retention_ratio", "apply_review_decisions", "build_report",
    "estimate_rows", "estimate_unique_repos", "filter_keywords",
    "filter_spam", "ledger_rows", "per_year_rows", "relevance_filter",
    "run_repo_pipeline",
]
