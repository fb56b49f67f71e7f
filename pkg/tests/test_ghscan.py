import datetime as dt
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hashecon.errors import (
    DomainError,
    FixtureMissError,
    InputError,
    InternalError,
    RateLimitExceededError,
)
from hashecon.ghscan import (
    CachingSource,
    FixtureSource,
    RepoRecord,
    Scanner,
    SearchQuery,
    SyntheticSource,
    apply_retention_ratio,
    apply_review_decisions,
    build_report,
    estimate_unique_repos,
    filter_keywords,
    filter_spam,
    relevance_filter,
    run_repo_pipeline,
)
from hashecon.ghscan.cache import QueryCache, normalize_repo_query
from hashecon.ghscan.pipeline import TruncationWarning
from hashecon.ghscan.ratelimit import TokenBucket
from hashecon.ghscan.records import FilterLedger

FIXTURE_CACHE = Path(__file__).parent / "fixtures" / "scan" / "cache"


def make_record(i, owner="someone", year=2020, description=None, name=None,
                term="tool", topics=()):
    return RepoRecord(repo_id=i, full_name=name or f"{owner}/repo-{i}",
                      owner=owner, description=description, topics=tuple(topics),
                      stars=i % 100, created_at=dt.date(year, 1 + i % 12, 1 + i % 28),
                      matched_term=term)


class TestSegmentedSearch:
    def _uniform_source(self, n, term="tool", years=(2015, 2024)):
        span = years[1] - years[0] + 1
        records = [make_record(i, year=years[0] + i % span) for i in range(n)]
        return SyntheticSource({term: records}), records

    def test_bisection_recovers_everything_past_the_cap(self):
        source, records = self._uniform_source(2500)
        scanner = Scanner(source, result_cap=1000)
        found = scanner.segmented_repo_search(
            SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2024, 12, 31)))
        assert len(found) == 2500
        assert {r.repo_id for r in found} == {r.repo_id for r in records}
        assert source.fetch_calls >= 3  # must have split at least twice

    def test_zero_hit_range_is_one_call(self):
        source, _ = self._uniform_source(100)
        scanner = Scanner(source)
        found = scanner.segmented_repo_search(
            SearchQuery(term="tool", created_from=dt.date(1999, 1, 1),
                        created_to=dt.date(1999, 12, 31)))
        assert found == []
        assert scanner.api_calls == 1
        assert source.fetch_calls == 0

    def test_results_sorted_and_deduplicated(self):
        source, _ = self._uniform_source(1500)
        scanner = Scanner(source, result_cap=400)
        found = scanner.segmented_repo_search(
            SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2024, 12, 31)))
        ids = [r.repo_id for r in found]
        assert ids == sorted(set(ids))

    def test_single_day_over_cap_truncates_with_warning(self):
        records = [make_record(i) for i in range(50)]
        # force every record onto one day
        one_day = [RepoRecord(repo_id=r.repo_id, full_name=r.full_name,
                              owner=r.owner, stars=r.stars,
                              created_at=dt.date(2020, 6, 15),
                              matched_term=r.matched_term)
                   for r in records]
        source = SyntheticSource({"tool": one_day})
        scanner = Scanner(source, result_cap=10)
        with pytest.warns(TruncationWarning):
            found = scanner.segmented_repo_search(
                SearchQuery(term="tool", created_from=dt.date(2020, 1, 1),
                            created_to=dt.date(2020, 12, 31)))
        assert len(scanner.truncations) == 1
        trunc = scanner.truncations[0]
        assert trunc.day == dt.date(2020, 6, 15)
        assert trunc.total == 50

    def test_concurrent_fetch_equals_serial(self):
        source1, _ = self._uniform_source(2200)
        source2, _ = self._uniform_source(2200)
        q = SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2024, 12, 31))
        serial = Scanner(source1, result_cap=500).segmented_repo_search(q)
        threaded = Scanner(source2, result_cap=500,
                           fetch_workers=4).segmented_repo_search(q)
        assert serial == threaded

    @given(st.integers(min_value=1, max_value=3000),
           st.sampled_from([250, 600, 1000]))
    @settings(max_examples=25, deadline=None)
    def test_segmentation_completeness_property(self, n, cap):
        source, records = self._uniform_source(n)
        scanner = Scanner(source, result_cap=cap)
        found = scanner.segmented_repo_search(
            SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2024, 12, 31)))
        assert {r.repo_id for r in found} == {r.repo_id for r in records}


class TestFilters:
    def test_spam_threshold_boundary(self):
        spam = [make_record(i, owner="factory") for i in range(66)]
        ok = [make_record(100 + i, owner="dev") for i in range(3)]
        kept, removed = filter_spam(spam + ok, per_user_threshold=66)
        assert removed == 66
        assert all(r.owner == "dev" for r in kept)

    def test_owner_below_threshold_retained(self):
        records = [make_record(i, owner="busy") for i in range(65)]
        kept, removed = filter_spam(records, per_user_threshold=66)
        assert removed == 0
        assert len(kept) == 65

    def test_allowlisted_owner_survives(self):
        records = [make_record(i, owner="trusted") for i in range(80)]
        kept, removed = filter_spam(records, per_user_threshold=66,
                                    allowlist=["Trusted"])
        assert removed == 0
        assert len(kept) == 80

    def test_spam_filter_order_stable_and_idempotent(self):
        records = ([make_record(i, owner="spam") for i in range(70)]
                   + [make_record(200 + i, owner=f"dev{i}") for i in range(5)])
        kept, _ = filter_spam(records)
        again, removed_again = filter_spam(kept)
        assert again == kept
        assert removed_again == 0
        assert [r.repo_id for r in kept] == sorted(r.repo_id for r in kept)

    def test_keyword_filter_examples(self):
        miner = make_record(1, description="fast bitcoin miner")
        library = make_record(2, description="password hashing library")
        kept, removed = filter_keywords([miner, library],
                                        ["miner", "mining", "wallet"])
        assert kept == [library]
        assert removed == 1

    def test_short_keywords_respect_word_boundaries(self):
        mintage = make_record(1, description="coinage and mintage history")
        minting = make_record(2, description="nft mint service")
        kept, removed = filter_keywords([mintage, minting], ["mint"])
        # "mintage" must not fire the short keyword; bare "mint" must.
        # "coinage" also survives "coin" boundaries.
        assert kept == [mintage]
        assert removed == 1

    def test_multiword_phrases_match_substring(self):
        rec = make_record(1, description="a proof of work experiment")
        kept, removed = filter_keywords([rec], ["proof of work"])
        assert removed == 1

    def test_topics_are_searched(self):
        rec = make_record(1, topics=("blockchain", "cli"))
        kept, removed = filter_keywords([rec], ["blockchain"])
        assert removed == 1

    def test_keyword_filter_idempotent(self):
        records = [make_record(i, description=d) for i, d in
                   enumerate(["gpu miner", "auth lib", None, "wallet app"])]
        kept, _ = filter_keywords(records, ["miner", "wallet"])
        again, removed = filter_keywords(kept, ["miner", "wallet"])
        assert again == kept and removed == 0

    def test_relevance_three_way_split(self):
        lookalike = make_record(1, name="dev/inscryption-mod")
        relevant = make_record(2, description="key derivation helpers")
        unknown = make_record(3, description="utility belt")
        kept, possible, excluded = relevance_filter(
            [lookalike, relevant, unknown],
            relevancy_words=["password", "hash", "kdf", "key derivation"],
            similar_name_list=["inscryption", "scrypto"])
        assert kept == [relevant]
        assert excluded == [lookalike]
        assert possible == [unknown]

    def test_relevancy_word_rescues_lookalike_name(self):
        rec = make_record(1, name="dev/scrypto-auth",
                          description="password hashing")
        kept, possible, excluded = relevance_filter(
            [rec], ["password"], ["scrypto"])
        assert kept == [rec]

    def test_review_decisions(self):
        pool = [make_record(i) for i in range(4)]
        decisions = {pool[0].full_name: "yes", pool[1].full_name: "no",
                     pool[2].full_name: "possible"}
        yes, still_possible, rejected = apply_review_decisions(pool, decisions)
        assert yes == [pool[0]]
        assert rejected == [pool[1]]
        assert still_possible == [pool[2], pool[3]]  # missing -> possible

    def test_unknown_decision_rejected(self):
        pool = [make_record(1)]
        with pytest.raises(InputError):
            apply_review_decisions(pool, {pool[0].full_name: "maybe"})


class TestEstimates:
    @pytest.mark.parametrize("term,total,unique,expected", [
        ("argon2", 48768, 941, 45891),
        ("bcrypt", 519168, 988, 512938),
        ("pbkdf2", 36592, 864, 31615),
        ("scrypt", 131328, 738, 96920),
        ("yescrypt", 3232, 327, 1057),
    ])
    def test_reference_estimates(self, term, total, unique, expected):
        ids = list(range(unique)) + [0] * (1000 - unique)
        est = estimate_unique_repos(term, total, ids)
        assert est.estimated_repos == expected
        assert est.duplication_quota == pytest.approx(1 - unique / 1000)
        assert not est.exact

    def test_exact_path_below_sample_size(self):
        ids = list(range(400)) + [0] * 100
        est = estimate_unique_repos("x", 500, ids)
        assert est.exact
        assert est.estimated_repos == 400

    def test_exact_and_quota_paths_agree_at_boundary(self):
        ids = list(range(800)) + [0] * 200
        exact = estimate_unique_repos("x", 1000, ids)
        quota = estimate_unique_repos("x", 1001, ids)
        assert exact.estimated_repos == 800
        # 1001 * 800/1000 = 800.8 -> 801; adjacent, as expected
        assert quota.estimated_repos in (800, 801)

    def test_empty_sample_with_hits_rejected(self):
        with pytest.raises(InputError):
            estimate_unique_repos("x", 10, [])

    def test_retention_vectors(self):
        assert apply_retention_ratio(96920, 0.452) == 43808
        assert apply_retention_ratio(64416, 0.452) == 29116
        assert apply_retention_ratio(1234, 1.0) == 1234

    def test_retention_domain(self):
        with pytest.raises(DomainError):
            apply_retention_ratio(100, 1.5)


class TestLedger:
    def test_identity_enforced(self):
        with pytest.raises(InternalError):
            FilterLedger(term="x", initial=100, spam_removed=10,
                         mining_filtered=5, final=90)

    def test_report_per_year_sums_to_final(self):
        records = tuple(make_record(i, year=2015 + i % 5) for i in range(37))
        outcome_records = records
        from hashecon.ghscan.pipeline import PipelineOutcome
        out = PipelineOutcome(term="x", initial=40, spam_removed=2,
                              keyword_removed=1, relevance_excluded=0,
                              final_records=outcome_records)
        report = build_report([out])
        assert sum(report.per_year["x"].values()) == report.ledger_for("x").final

    def test_empty_pipeline_zeroed_report(self):
        from hashecon.ghscan.pipeline import PipelineOutcome
        out = PipelineOutcome(term="x", initial=0, spam_removed=0,
                              keyword_removed=0, relevance_excluded=0,
                              final_records=())
        report = build_report([out])
        assert report.ledger_for("x").final == 0
        assert report.per_year["x"] == {}


class TestCacheAndFixtures:
    def test_cache_roundtrip(self, tmp_path):
        cache = QueryCache(tmp_path)
        q = normalize_repo_query("tool", dt.date(2020, 1, 1), dt.date(2020, 12, 31))
        records = [make_record(i) for i in range(5)]
        cache.write_records(q, records)
        cache.write_manifest(q, total_count=5, fetched=True)
        assert cache.read_records(q) == records
        assert cache.read_manifest(q)["total_count"] == 5

    def test_cache_write_is_byte_deterministic(self, tmp_path):
        records = [make_record(i) for i in range(20)]
        q = normalize_repo_query("tool", None, None)
        c1, c2 = QueryCache(tmp_path / "a"), QueryCache(tmp_path / "b")
        c1.write_records(q, records)
        c2.write_records(q, records)
        [f1] = list((tmp_path / "a").glob("*.ndjson.gz"))
        [f2] = list((tmp_path / "b").glob("*.ndjson.gz"))
        assert f1.read_bytes() == f2.read_bytes()

    def test_fixture_miss_raises(self, tmp_path):
        source = FixtureSource(tmp_path)
        with pytest.raises(FixtureMissError):
            source.repo_probe(SearchQuery(term="nothing"))

    def test_caching_source_replays_without_inner_calls(self, tmp_path):
        inner = SyntheticSource({"tool": [make_record(i) for i in range(30)]})
        recorder = CachingSource(inner, tmp_path)
        q = SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2024, 12, 31))
        first = Scanner(recorder).segmented_repo_search(q)
        calls_after_recording = inner.probe_calls + inner.fetch_calls
        replay = Scanner(FixtureSource(tmp_path)).segmented_repo_search(q)
        assert replay == first
        assert inner.probe_calls + inner.fetch_calls == calls_after_recording

    def test_shipped_fixture_replay_matches_reference_ledgers(self):
        exclusions = ["miner", "mining", "proof-of-work", "proof of work",
                      "currency", "coin", "wallet", "bitzeny", "doge", "mint",
                      "blockchain", "contract"]
        source = FixtureSource(FIXTURE_CACHE)
        expectations = {"argon2": (1602, 534, 36, 1032),
                        "bcrypt": (12727, 604, 58, 12065),
                        "yescrypt": (76, 0, 36, 40),
                        "pbkdf2": (1006, 0, 12, 994)}
        for term, (initial, spam, mining, final) in expectations.items():
            records = Scanner(source).segmented_repo_search(
                SearchQuery(term=term, created_from=dt.date(2008, 1, 1),
                            created_to=dt.date(2024, 12, 31)))
            out = run_repo_pipeline(term, records, exclusions,
                                    spam_allowlist=["prolific-pbkdf2-dev"])
            assert (out.initial, out.spam_removed,
                    out.keyword_removed + out.relevance_excluded,
                    len(out.final_records)) == (initial, spam, mining, final)


class TestTokenBucket:
    def test_burst_then_block(self):
        clock = [0.0]
        sleeps = []

        def fake_sleep(s):
            sleeps.append(s)
            clock[0] += s

        bucket = TokenBucket(rate_per_minute=60, capacity=2,
                             clock=lambda: clock[0], sleep=fake_sleep)
        assert bucket.acquire() == 0.0
        assert bucket.acquire() == 0.0
        waited = bucket.acquire()  # empty; requires ~1s refill
        assert waited == pytest.approx(1.0, abs=1e-6)
        assert sleeps

    def test_refill_cap(self):
        clock = [0.0]
        bucket = TokenBucket(rate_per_minute=60, capacity=3,
                             clock=lambda: clock[0], sleep=lambda s: None)
        for _ in range(3):
            assert bucket.try_acquire()
        assert not bucket.try_acquire()
        clock[0] += 100.0  # refills but never beyond capacity
        for _ in range(3):
            assert bucket.try_acquire()
        assert not bucket.try_acquire()


class TestLiveClientBackoff:
    def _client(self, responses, sleeps):

        from hashecon.ghscan.client import GitHubSearchClient

        class FakeSession:
            def __init__(self):
                self.calls = 0

            def get(self, url, params=None, headers=None, timeout=None):
                resp = responses[min(self.calls, len(responses) - 1)]
                self.calls += 1
                return resp

        bucket = TokenBucket(rate_per_minute=1e9, clock=lambda: 0.0,
                             sleep=lambda s: None)
        return GitHubSearchClient(token="x", session=FakeSession(),
                                  repo_bucket=bucket, code_bucket=bucket,
                                  max_retries=2, sleep=sleeps.append)

    class FakeResponse:
        def __init__(self, status, payload=None, headers=None):
            self.status_code = status
            self._payload = payload or {}
            self.headers = headers or {}
            self.text = ""

        def json(self):
            return self._payload

    def test_retry_after_is_honored_then_succeeds(self):
        sleeps = []
        responses = [
            self.FakeResponse(403, headers={"Retry-After": "7"}),
            self.FakeResponse(200, {"total_count": 3, "items": []}),
        ]
        client = self._client(responses, sleeps)
        total = client.repo_probe(SearchQuery(term="tool"))
        assert total == 3
        assert sleeps == [7.0]

    def test_exhausted_retries_raise_rate_limit_error(self):
        sleeps = []
        responses = [self.FakeResponse(429, headers={"Retry-After": "1"})]
        client = self._client(responses, sleeps)
        with pytest.raises(RateLimitExceededError):
            client.repo_probe(SearchQuery(term="tool"))

    def test_other_http_errors_are_network_errors(self):
        from hashecon.errors import NetworkError

        client = self._client([self.FakeResponse(500)], [])
        with pytest.raises(NetworkError):
            client.repo_probe(SearchQuery(term="tool"))


class TestQueryBuilders:
    def test_repo_query_with_range_and_negatives(self):
        from hashecon.ghscan.client import build_repo_query

        q = SearchQuery(term="argon2", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date(2016, 12, 31),
                        negative_keywords=("miner", "proof of work"))
        assert build_repo_query(q) == (
            'argon2 created:2015-01-01..2016-12-31 NOT miner NOT "proof of work"')

    def test_code_query_with_language_and_excludes(self):
        from hashecon.ghscan.client import build_code_query

        q = SearchQuery(term="argon2", language="python",
                        path_excludes=("test",), extension_excludes=("md",))
        assert build_code_query(q) == (
            "argon2 language:python -path:test -extension:md")


class TestResumeToken:
    class ExhaustedSource:
        """Probes fine; every fetch hits the rate limit."""

        def __init__(self, inner, fail_from=0):
            self.inner = inner
            self.fetches = 0
            self.fail_from = fail_from

        def repo_probe(self, query):
            return self.inner.repo_probe(query)

        def repo_fetch(self, query):
            self.fetches += 1
            if self.fetches > self.fail_from:
                raise RateLimitExceededError("budget exhausted', retries spent")
            return self.inner.repo_fetch(query)

    def test_pending_segments_reported_on_exhaustion(self):
        records = [make_record(i, year=2015 + i % 10) for i in range(2500)]
        inner = SyntheticSource({"tool": records})
        source = self.ExhaustedSource(inner, fail_from=1)
        scanner = Scanner(source, result_cap=1000)
        with pytest.raises(RateLimitExceededError) as exc:
            scanner.segmented_repo_search(
                SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                            created_to=dt.date(2024, 12, 31)))
        pending = exc.value.pending_segments
        assert pending, "resume token should list unfetched segments"
        # the one fetch that succeeded plus scans over the pending ranges
        # must cover the full ground truth with no overlap
        fetched = inner.repo_fetch(  # replaying the first planned segment
            SearchQuery(term="tool", created_from=dt.date(2015, 1, 1),
                        created_to=dt.date.fromisoformat(pending[0][0])
                        - dt.timedelta(days=1)))
        resumed = []
        for lo, hi in pending:
            resumed += Scanner(inner, result_cap=1000).segmented_repo_search(
                SearchQuery(term="tool",
                            created_from=dt.date.fromisoformat(lo),
                            created_to=dt.date.fromisoformat(hi)))
        combined = [r.repo_id for r in fetched] + [r.repo_id for r in resumed]
        assert sorted(combined) == sorted(r.repo_id for r in records)
