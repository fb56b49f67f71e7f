#!/usr/bin/env python3
"""Generate the recorded scan fixtures.

Builds deterministic synthetic repository corpora whose filter-pipeline
ledgers match the reference per-algorithm collection ledger:

    argon2   1,602 -> 534 spam -> 36 mining  -> 1,032
    bcrypt  12,727 -> 604 spam -> 58 mining  -> 12,065
    scrypt   2,396 -> 528 spam -> 1,273*     ->   595  (incl. 219 possible)
    yescrypt    76 ->   0      -> 36 mining  ->    40
    pbkdf2   1,006 ->   0      -> 12 mining  ->   994

(* scrypt folds 348 keyword removals and 925 relevance removals.)

Final per-year counts for argon2/pbkdf2/scrypt over 2015-2024 follow
the reconstructed series that reproduces the reference groupwise
statistics (means 102.7/85.3/51.0, sample stds 59.95/25.47/27.52,
KW H(2)=6.07 p=.048, pairwise z 2.13/2.13/0.00).

Everything is then recorded through the regular caching layer by
replaying a date-segmented search against a synthetic source, so tests
and the CLI replay the exact cache format a live run would leave
behind. Also writes the scrypt review decisions and the per-year
reconstruction CSV.

Run from the repository root:  python3 scripts/build_scan_fixtures.py
"""

import csv
import datetime as dt
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from hashecon.ghscan.records import RepoRecord, SearchQuery          # noqa: E402
from hashecon.ghscan.sources import CachingSource, SyntheticSource  # noqa: E402
from hashecon.ghscan.pipeline import Scanner                        # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures" / "scan"

# reconstructed final per-year counts, 2015..2024
PER_YEAR = {
    "argon2": [21, 41, 42, 55, 97, 125, 134, 152, 177, 183],
    "pbkdf2": [58, 66, 74, 51, 84, 96, 99, 137, 106, 82],
    "scrypt": [110, 65, 60, 53, 57, 56, 46, 34, 17, 12],
}
PRE2015 = {  # final counts with creation dates before 2015
    "argon2": [(2013, 2), (2014, 3)],
    "pbkdf2": [(2008, 12), (2009, 15), (2010, 18), (2011, 21), (2012, 24),
               (2013, 26), (2014, 25)],
    "scrypt": [(2010, 9), (2011, 14), (2012, 18), (2013, 21), (2014, 23)],
}

MINING_DESCRIPTIONS = [
    "gpu miner with pooled hashing",
    "cryptocurrency mining dashboard",
    "proof-of-work playground",
    "hd wallet generator",
    "blockchain explorer backend",
    "smart contract toolkit",
    "doge tipping bot",
    "mint your own tokens",
]
CLEAN_DESCRIPTIONS = [
    "secure login backend",
    "credential storage helper",
    "user account service",
    "cli tool for secrets",
    None,
    "session management middleware",
    "database adapter with hashed credentials",
]
SCRYPT_RELEVANT = [
    "password hashing with scrypt",
    "scrypt based key derivation",
    "auth layer using scrypt",
    "kdf helpers",
]
SIMILAR_NAME_FRAGMENTS = ["scrypto", "scrypted", "inscryption", "scrypts",
                          "scrypting", "scrypture"]


class Maker:
    """Deterministic record factory (no RNG: everything is i-indexed)."""

    def __init__(self, term: str, base_id: int):
        self.term = term
        self.base_id = base_id
        self.n = 0

    def make(self, owner: str, year: int, *, name: str | None = None,
             description: str | None = None, topics=()) -> RepoRecord:
        self.n += 1
        i = self.n
        day = dt.date(year, 1 + (i * 7) % 12, 1 + (i * 13) % 28)
        return RepoRecord(
            repo_id=self.base_id + i,
            full_name=name or f"{owner}/{self.term}-project-{i}",
            owner=owner,
            description=description,
            topics=tuple(topics),
            stars=(i * 37) % 900,
            created_at=day,
            matched_term=self.term,
        )


def spread_years(total: int, lo: int, hi: int):
    """Deterministic year cycle for records whose year is unconstrained."""
    span = hi - lo + 1
    for i in range(total):
        yield lo + (i * 7) % span


def final_year_schedule(term: str):
    years = []
    for year, count in PRE2015.get(term, []):
        years.extend([year] * count)
    for offset, count in enumerate(PER_YEAR.get(term, [])):
        years.extend([2015 + offset] * count)
    return years


def build_argon2(maker: Maker):
    records = []
    spam_counts = [66] * 7 + [72]                     # 534
    for u, count in enumerate(spam_counts):
        owner = f"argon2-spammer-{u}"
        for i, year in zip(range(count), spread_years(count, 2016, 2024)):
            records.append(maker.make(owner, year,
                                      description="starter template"))
    for i, year in zip(range(36), spread_years(36, 2015, 2024)):
        records.append(maker.make(f"miner-dev-{i}", year,
                                  description=MINING_DESCRIPTIONS[i % len(MINING_DESCRIPTIONS)]))
    for i, year in enumerate(final_year_schedule("argon2")):
        records.append(maker.make(f"dev-a-{i % 811}", year,
                                  description=CLEAN_DESCRIPTIONS[i % len(CLEAN_DESCRIPTIONS)]))
    assert len(records) == 1602, len(records)
    return records


def build_bcrypt(maker: Maker):
    records = []
    spam_counts = [66] * 8 + [76]                     # 604
    for u, count in enumerate(spam_counts):
        owner = f"bcrypt-spammer-{u}"
        for i, year in zip(range(count), spread_years(count, 2010, 2024)):
            records.append(maker.make(owner, year,
                                      description="bootstrap scaffold"))
    for i, year in zip(range(58), spread_years(58, 2009, 2024)):
        records.append(maker.make(f"miner-dev-b{i}", year,
                                  description=MINING_DESCRIPTIONS[i % len(MINING_DESCRIPTIONS)]))
    for i, year in zip(range(12065), spread_years(12065, 2008, 2024)):
        records.append(maker.make(f"dev-b-{i % 4513}", year,
                                  description=CLEAN_DESCRIPTIONS[i % len(CLEAN_DESCRIPTIONS)]))
    assert len(records) == 12727, len(records)
    return records


def build_scrypt(maker: Maker):
    records = []
    for u in range(8):                                # 528 spam
        owner = f"scrypt-spammer-{u}"
        for i, year in zip(range(66), spread_years(66, 2012, 2024)):
            records.append(maker.make(owner, year,
                                      description="fork of a fork"))
    for i, year in zip(range(348), spread_years(348, 2011, 2024)):   # keyword
        records.append(maker.make(f"miner-dev-s{i}", year,
                                  description=MINING_DESCRIPTIONS[i % len(MINING_DESCRIPTIONS)]))
    # relevance stage input: 1,520 records
    # 238 kept outright (relevancy word present)
    schedule = final_year_schedule("scrypt")
    assert len(schedule) == 595
    kept_years, decided_years = schedule[:238], schedule[238:]
    for i, year in enumerate(kept_years):
        records.append(maker.make(f"dev-s-{i % 211}", year,
                                  description=SCRYPT_RELEVANT[i % len(SCRYPT_RELEVANT)]))
    # 439 excluded by similar-name rule (no relevancy words)
    for i, year in zip(range(439), spread_years(439, 2011, 2024)):
        frag = SIMILAR_NAME_FRAGMENTS[i % len(SIMILAR_NAME_FRAGMENTS)]
        records.append(maker.make(f"other-dev-{i}", year,
                                  name=f"other-dev-{i}/{frag}-tool-{i}",
                                  description=None))
    # 843 in the review pool: 138 yes + 219 possible + 486 no
    decisions = {}
    pool_specs = [("yes", 138), ("possible", 219), ("no", 486)]
    pool_years = dict(zip(["yes", "possible"], [decided_years[:138],
                                                decided_years[138:]]))
    for verdict, count in pool_specs:
        years = pool_years.get(verdict) or list(spread_years(count, 2011, 2024))
        for i, year in zip(range(count), years):
            rec = maker.make(f"pool-{verdict}-{i}", year, description=None)
            records.append(rec)
            decisions[rec.full_name] = verdict
    assert len(records) == 2396, len(records)
    return records, decisions


def build_yescrypt(maker: Maker):
    records = []
    for i, year in zip(range(36), spread_years(36, 2014, 2024)):
        records.append(maker.make(f"miner-dev-y{i}", year,
                                  description=MINING_DESCRIPTIONS[i % len(MINING_DESCRIPTIONS)]))
    for i, year in zip(range(40), spread_years(40, 2014, 2024)):
        records.append(maker.make(f"dev-y-{i % 31}", year,
                                  description=CLEAN_DESCRIPTIONS[i % len(CLEAN_DESCRIPTIONS)]))
    assert len(records) == 76, len(records)
    return records


def build_pbkdf2(maker: Maker):
    records = []
    for i, year in zip(range(12), spread_years(12, 2009, 2024)):
        records.append(maker.make(f"miner-dev-p{i}", year,
                                  description=MINING_DESCRIPTIONS[i % len(MINING_DESCRIPTIONS)]))
    schedule = final_year_schedule("pbkdf2")
    assert len(schedule) == 994
    # one prolific-but-legitimate user holds 31 repos (allowlisted in runs)
    for i, year in enumerate(schedule):
        owner = "prolific-pbkdf2-dev" if i < 31 else f"dev-p-{i % 733}"
        records.append(maker.make(owner, year,
                                  description=CLEAN_DESCRIPTIONS[i % len(CLEAN_DESCRIPTIONS)]))
    assert len(records) == 1006, len(records)
    return records


GROUND_TRUTH_TERMS = ("argon2", "bcrypt", "scrypt", "yescrypt", "pbkdf2")

CODE_SEARCH = {  # term -> (total hits, unique ids within the first 1000)
    "argon2": (48768, 941),
    "bcrypt": (519168, 988),
    "pbkdf2": (36592, 864),
    "scrypt": (131328, 738),
    "yescrypt": (3232, 327),
}


def code_sample(term_index: int, unique: int) -> list[int]:
    """1000 ids with exactly ``unique`` distinct values, deterministic."""
    base = 10_000_000 * (term_index + 1)
    ids = [base + i for i in range(unique)]
    i = 0
    while len(ids) < 1000:
        ids.append(base + (i * 31) % unique)
        i += 1
    return ids


def main():
    # regenerate only what this script owns; expected/ holds frozen CLI
    # outputs and is rebuilt separately (see README fixture provenance)
    cache_dir = FIXTURES / "cache"
    if cache_dir.exists():
        shutil.rmtree(cache_dir)
    cache_dir.mkdir(parents=True)

    argon2 = build_argon2(Maker("argon2", 1_000_000))
    bcrypt = build_bcrypt(Maker("bcrypt", 2_000_000))
    scrypt, decisions = build_scrypt(Maker("scrypt", 3_000_000))
    yescrypt = build_yescrypt(Maker("yescrypt", 4_000_000))
    pbkdf2 = build_pbkdf2(Maker("pbkdf2", 5_000_000))
    ground_truth = {"argon2": argon2, "bcrypt": bcrypt, "scrypt": scrypt,
                    "yescrypt": yescrypt, "pbkdf2": pbkdf2}

    code_hits = {}
    for idx, (term, (total, unique)) in enumerate(sorted(CODE_SEARCH.items())):
        code_hits[(term, None)] = (total, code_sample(idx, unique))

    synthetic = SyntheticSource(ground_truth, code_hits)
    recorder = CachingSource(synthetic, cache_dir)

    period = (dt.date(2008, 1, 1), dt.date(2024, 12, 31))
    for term, records in ground_truth.items():
        scanner = Scanner(recorder)
        found = scanner.segmented_repo_search(
            SearchQuery(term=term, created_from=period[0], created_to=period[1]))
        assert len(found) == len(records), (term, len(found), len(records))
        print(f"{term}: recorded {len(found)} records "
              f"({scanner.api_calls} api calls)")
    for term in CODE_SEARCH:
        recorder.code_probe(term, None)

    with open(FIXTURES / "scrypt_decisions.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["full_name", "decision"])
        for name in sorted(decisions):
            writer.writerow([name, decisions[name]])

    with open(FIXTURES / "per_year_final_counts.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "year", "count"])
        for term, counts in PER_YEAR.items():
            for offset, count in enumerate(counts):
                writer.writerow([term, 2015 + offset, count])

    freeze_expected_outputs(cache_dir)

    total_files = len(list(cache_dir.iterdir()))
    print(f"cache entries: {total_files} files in {cache_dir}")


def freeze_expected_outputs(cache_dir: Path):
    """Record the CLI's report files for the byte-for-byte replay check."""
    from hashecon.cli import main as cli_main

    expected = FIXTURES / "expected"
    if expected.exists():
        shutil.rmtree(expected)
    term_flags = [flag for term in GROUND_TRUTH_TERMS
                  for flag in ("--term", term)]
    rc = cli_main(["--out-dir", str(expected), "scan", "--mode", "repos",
                   "--fixtures", str(cache_dir), *term_flags,
                   "--allow-owner", "prolific-pbkdf2-dev",
                   "--decisions", str(FIXTURES / "scrypt_decisions.csv")])
    assert rc == 0, "repos replay failed while freezing expected outputs"
    rc = cli_main(["--out-dir", str(expected), "scan", "--mode", "code",
                   "--fixtures", str(cache_dir), *term_flags,
                   "--retention", "scrypt=0.452"])
    assert rc == 0, "code replay failed while freezing expected outputs"


if __name__ == "__main__":
    main()
