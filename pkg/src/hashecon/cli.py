"""Command-line front end.

Subcommands: cost, simulate, classify, scan, analyze. Global flags
--config (KEY=VALUE file), --out-dir, --format. Every output file
starts with a comment carrying the tool version and the resolved
config-snapshot hash; identical inputs and config produce byte-identical
outputs.

Exit codes: 0 success, 2 usage, 3 input/parse, 4 network or rate
limit, 5 internal assertion.
"""

from __future__ import annotations

import argparse
import csv
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .attacksim import (
    BudgetScenario,
    budget_curve,
    result_rows,
    simulate_matrix,
)
from .corpus import (
    build_distribution,
    distribution_rows,
    estimate_records,
    ingest,
    read_strength_csv,
    read_strength_table,
    summarize,
    synthesize_doubled,
)
from .econcost import (
    DEFAULT_OVERHEAD_FACTOR,
    Algorithm,
    HashConfig,
    cost_model_for,
    energy_cost_per_hash,
    load_cpu_profiles,
    load_market_csv,
)
from .errors import (
    DomainError,
    HasheconError,
    InputError,
    InternalError,
    NetworkError,
)
from .ghscan import (
    FixtureSource,
    Scanner,
    SearchQuery,
    apply_retention_ratio,
    build_report,
    estimate_unique_repos,
    ledger_rows,
    per_year_rows,
    run_repo_pipeline,
)
from .paramclass import (
    classify,
    cluster_configs,
    fit_loglog,
    load_anchor_csv,
    read_config_csv,
    star_band,
    strength_table,
    year_band,
)
from .reporting import write_csv, write_json
from .runconfig import RunConfig, parse_config_file
from .stats import (
    chi2_gof,
    chi2_independence,
    dunn_pairwise,
    kruskal_wallis,
    read_contingency_csv,
)
from .strength import (
    BruteForceEstimator,
    PatternEstimator,
    PrecomputedStrengths,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NETWORK = 4
EXIT_INTERNAL = 5

DEFAULT_BUDGETS = (0.10, 1.00, 20.00)


def _record_market(config: RunConfig, market_path) -> None:
    if market_path:
        config.record_file("market", market_path)
    else:
        config.record_bytes("market", (resources.files("hashecon.data")
                                       / "market_20250220.csv").read_bytes())


def parse_hash_spec(spec: str) -> HashConfig:
    """"sha256" or "argon2id:m=<kib>[,t=<n>][,p=<n>]"."""
    spec = spec.strip().lower()
    if spec == "sha256":
        return HashConfig.sha256()
    if spec.startswith("argon2id:"):
        params = {"t": 1, "p": 1}
        for part in spec[len("argon2id:"):].split(","):
            key, _, value = part.partition("=")
            if key not in ("m", "t", "p") or not value:
                raise InputError(f"bad hash spec field {part!r} in {spec!r}")
            try:
                params[{"m": "memory_kib"}.get(key, key)] = int(value)
            except ValueError:
                raise InputError(f"non-integer value in hash spec {spec!r}") from None
        if "memory_kib" not in params:
            raise InputError(f"argon2id spec needs m=<kib>: {spec!r}")
        return HashConfig.argon2id(params["memory_kib"], params["t"], params["p"])
    raise InputError(f"unknown hash spec {spec!r}; use 'sha256' or 'argon2id:m=...'")


def default_hash_specs() -> list[HashConfig]:
    return [HashConfig.sha256(),
            HashConfig.argon2id(47104),
            HashConfig.argon2id(2 * 1024 * 1024)]


def _read_lines_file(path) -> list[str]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _data_lines(name: str) -> list[str]:
    text = (resources.files("hashecon.data") / name).read_text("utf-8")
    return [ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cost(args, out_dir: Path, fmt: str, config: RunConfig) -> int:
    markets = load_market_csv(args.market)
    _record_market(config, args.market)
    configs = ([parse_hash_spec(s) for s in args.hash] if args.hash
               else default_hash_specs())
    rows = []
    for cfg in configs:
        model = cost_model_for(cfg, markets, overhead_factor=args.overhead)
        rows.append({
            "algorithm": cfg.algorithm.value,
            "memory_kib": cfg.memory_kib if cfg.algorithm is Algorithm.ARGON2ID else "",
            "t": cfg.t if cfg.algorithm is Algorithm.ARGON2ID else "",
            "p": cfg.p if cfg.algorithm is Algorithm.ARGON2ID else "",
            "usd_per_hash": model.usd_per_hash,
            "provenance": model.provenance,
            "source": model.source,
        })
    if args.energy_check:
        for prof in load_cpu_profiles():
            rows.append({
                "algorithm": f"energy:{prof.name}",
                "memory_kib": "", "t": "", "p": "",
                "usd_per_hash": energy_cost_per_hash(
                    prof.tdp_watts, prof.hashes_per_second, args.usd_per_kwh),
                "provenance": "energy",
                "source": f"{prof.tdp_watts}W@{args.usd_per_kwh}/kWh",
            })
    fields = ["algorithm", "memory_kib", "t", "p", "usd_per_hash",
              "provenance", "source"]
    emit(out_dir / "cost_table", fields, rows, fmt, config)
    return EXIT_OK


def _load_distribution(args):
    if args.strengths:
        return read_strength_csv(args.strengths)
    if not args.passwords:
        raise InputError("simulate needs --strengths or --passwords")
    records, log = ingest(args.passwords, min_length=args.min_length)
    print(f"ingested {log.lines_read} lines: {log.undecodable_removed} "
          f"undecodable, {log.below_min_length_removed} below length, "
          f"{log.retained} retained")
    if args.estimator == "pattern":
        estimator = PatternEstimator()
    elif args.estimator == "brute":
        estimator = BruteForceEstimator()
    elif args.estimator == "precomputed":
        if not args.precomputed:
            raise InputError("--estimator precomputed needs --precomputed FILE")
        estimator = PrecomputedStrengths(read_strength_table(args.precomputed))
    else:
        raise InputError(f"unknown estimator {args.estimator!r}")
    scored = estimate_records(records, estimator, workers=args.workers)
    return build_distribution(scored)


def cmd_simulate(args, out_dir: Path, fmt: str, config: RunConfig) -> int:
    markets = load_market_csv(args.market)
    _record_market(config, args.market)
    for label, path in (("strengths", args.strengths),
                        ("passwords", args.passwords),
                        ("precomputed", args.precomputed)):
        if path:
            config.record_file(label, path)
    configs = ([parse_hash_spec(s) for s in args.hash] if args.hash
               else default_hash_specs())
    cost_models = [cost_model_for(c, markets, overhead_factor=args.overhead)
                   for c in configs]
    base = _load_distribution(args)
    label = args.dataset_label
    distributions = [(label, base)]
    if args.doubled:
        distributions.append((f"{label}_doubled", synthesize_doubled(base)))
    budgets = [BudgetScenario(b) for b in (args.budget or DEFAULT_BUDGETS)]
    results = simulate_matrix(distributions, cost_models, budgets,
                              workers=args.workers)
    fields = ["dataset", "algorithm", "memory_kib", "t", "budget_usd",
              "guesses", "threshold_bits", "compromise_rate"]
    emit(out_dir / "simulation", fields, list(result_rows(results)), fmt, config)
    if args.curve:
        curve_results = []
        for name, dist in distributions:
            for cost in cost_models:
                curve_results.extend(budget_curve(name, dist, cost))
        emit(out_dir / "curve", fields, list(result_rows(curve_results)), fmt,
             config)
    if args.emit_distribution:
        emit(out_dir / "distribution", ["bin_lower_bits", "count"],
             [{"bin_lower_bits": b, "count": c} for b, c in distribution_rows(base)],
             fmt, config)
    stats = summarize(base)
    emit(out_dir / "corpus_stats",
         ["count", "mean_bits", "median_bits", "stddev_bits", "q1_bits", "q3_bits"],
         [{"count": stats.count, "mean_bits": stats.mean_bits,
           "median_bits": stats.median_bits, "stddev_bits": stats.stddev_bits,
           "q1_bits": stats.q1_bits, "q3_bits": stats.q3_bits}],
         fmt, config)
    print(f"{label}: n={stats.count} mean={stats.mean_bits:.2f} "
          f"median={stats.median_bits:.2f} sd={stats.stddev_bits:.2f} bits")
    return EXIT_OK


def cmd_classify(args, out_dir: Path, fmt: str, config: RunConfig) -> int:
    anchors = load_anchor_csv(args.anchors)
    if args.anchors:
        config.record_file("anchors", args.anchors)
    else:
        config.record_bytes("anchors", (resources.files("hashecon.data")
                                        / "anchors_default.csv").read_bytes())
    fit = fit_loglog(anchors)
    configs = read_config_csv(args.configs)
    config.record_file("configs", args.configs)
    labeled = [(c, classify(c, fit)) for c in configs]

    rows = [{"source_label": c.source_label, "t": c.t, "memory_kib": c.memory_kib,
             "p": c.p, "category": c.category, "stars": c.stars,
             "created_year": c.created_year, "label": label}
            for c, label in labeled]
    emit(out_dir / "classified", ["source_label", "t", "memory_kib", "p",
                                  "category", "stars", "created_year", "label"],
         rows, fmt, config)

    clusters = cluster_configs(configs)
    label_of = {(c.t, c.memory_kib): lbl for c, lbl in labeled}
    scatter = [{"t": t, "memory_kib": m, "count": n, "label": label_of[(t, m)]}
               for (t, m), n in clusters]
    emit(out_dir / "scatter", ["t", "memory_kib", "count", "label"], scatter,
         fmt, config)

    tallies = {"weaker": sum(1 for _, l in labeled if l == "weaker"),
               "stronger": sum(1 for _, l in labeled if l == "stronger")}
    for grouping, name in ((lambda c: year_band(c.created_year), "age"),
                           ("category", "category"),
                           (lambda c: star_band(c.stars), "stars")):
        try:
            table = strength_table(labeled, grouping)
        except (InputError, TypeError):
            continue  # attribute not populated in this input
        emit(out_dir / f"crosstab_{name}",
             ["strength", *table.col_labels],
             [{"strength": row_label,
               **{col: table.counts[i][j] for j, col in enumerate(table.col_labels)}}
              for i, row_label in enumerate(table.row_labels)],
             fmt, config)
    print(f"classified {len(labeled)} configs: "
          f"{tallies['weaker']} weaker / {tallies['stronger']} stronger")
    return EXIT_OK


def cmd_scan(args, out_dir: Path, fmt: str, config: RunConfig) -> int:
    if args.live:
        from .ghscan.client import GitHubSearchClient
        from .ghscan.sources import CachingSource

        cache_dir = args.cache_dir or (out_dir / "cache")
        source = CachingSource(GitHubSearchClient(), cache_dir)
    else:
        if not args.fixtures:
            raise InputError("scan needs --live or --fixtures DIR")
        fixtures = Path(args.fixtures)
        if not fixtures.is_dir() or not any(fixtures.iterdir()):
            raise InputError(f"fixture directory {fixtures} is missing or empty")
        source = FixtureSource(fixtures)
        config.record_dir("fixtures", fixtures)

    terms = args.term
    if not terms:
        raise InputError("scan needs at least one --term")
    if args.exclusions:
        exclusions = _read_lines_file(args.exclusions)
        config.record_file("exclusions", args.exclusions)
    else:
        exclusions = _data_lines("exclusion_keywords.txt")
        config.record_bytes("exclusions", (resources.files("hashecon.data")
                                           / "exclusion_keywords.txt").read_bytes())

    if args.mode == "repos":
        import datetime as dt

        created_from = dt.date.fromisoformat(args.date_from)
        created_to = dt.date.fromisoformat(args.date_to)
        decisions = {}
        if args.decisions:
            config.record_file("decisions", args.decisions)
            with open(args.decisions, newline="", encoding="utf-8") as fh:
                for row in csv.DictReader(fh):
                    decisions[row["full_name"]] = row["decision"]
        outcomes = []
        for term in terms:
            scanner = Scanner(source, fetch_workers=args.workers)
            records = scanner.segmented_repo_search(
                SearchQuery(term=term, created_from=created_from,
                            created_to=created_to))
            relevance = term == args.relevance_term
            outcomes.append(run_repo_pipeline(
                term, records, exclusions,
                spam_allowlist=args.allow_owner,
                relevancy_words=_data_lines("relevancy_words.txt") if relevance else None,
                similar_names=_data_lines("similar_names.txt") if relevance else None,
                review_decisions=decisions if relevance else None))
        report = build_report(outcomes)
        emit(out_dir / "report_ledger",
             ["algorithm", "initial", "spam_removed", "mining_filtered", "final"],
             list(ledger_rows(report)), fmt, config)
        emit(out_dir / "report_per_year", ["algorithm", "year", "count"],
             list(per_year_rows(report)), fmt, config)
        for ledger in report.ledgers:
            print(f"{ledger.term}: {ledger.initial} -> spam {ledger.spam_removed}"
                  f" -> filtered {ledger.mining_filtered} -> {ledger.final}")
        return EXIT_OK

    # code search mode
    retention = {}
    for spec in args.retention or ():
        term, _, ratio = spec.partition("=")
        try:
            retention[term.strip().lower()] = float(ratio)
        except ValueError:
            raise InputError(f"bad --retention spec {spec!r}") from None
    rows = []
    languages = args.languages.split(",") if args.languages else [None]
    for term in terms:
        for language in languages:
            total, ids = source.code_probe(term, language)
            est = estimate_unique_repos(term, total, ids, language=language)
            row = {"term": est.term, "language": est.language or "",
                   "total_hits": est.total_hits, "sample_size": est.sample_size,
                   "sampled_unique_ids": est.sampled_unique_ids,
                   "duplication_quota": round(est.duplication_quota, 6),
                   "estimated_repos": est.estimated_repos,
                   "exact": "yes" if est.exact else "no"}
            ratio = retention.get(term.lower())
            row["retention_ratio"] = "" if ratio is None else ratio
            row["retained_estimate"] = ("" if ratio is None else
                                        apply_retention_ratio(est.estimated_repos, ratio))
            rows.append(row)
    emit(out_dir / "report_estimates",
         ["term", "language", "total_hits", "sample_size", "sampled_unique_ids",
          "duplication_quota", "estimated_repos", "exact", "retention_ratio",
          "retained_estimate"],
         rows, fmt, config)
    for row in rows:
        print(f"{row['term']}: {row['total_hits']} hits -> "
              f"{row['estimated_repos']} unique repos")
    return EXIT_OK


def cmd_analyze(args, out_dir: Path, fmt: str, config: RunConfig) -> int:
    results = []
    if args.test == "independence":
        table = read_contingency_csv(args.table)
        config.record_file("table", args.table)
        results.append(chi2_independence(table))
    elif args.test == "gof":
        table = read_contingency_csv(args.table)
        config.record_file("table", args.table)
        observed = [c for row in table.counts for c in row]
        expected = "uniform" if args.expected == "uniform" else None
        if expected is None:
            raise InputError("gof supports --expected uniform only via CLI")
        results.append(chi2_gof(observed, expected))
    elif args.test in ("kruskal", "dunn"):
        groups = _read_groups_csv(args.groups)
        config.record_file("groups", args.groups)
        if args.test == "kruskal":
            results.append(kruskal_wallis(groups))
        else:
            if not args.pair:
                raise InputError("dunn needs --pair i,j")
            try:
                i, j = (int(x) for x in args.pair.split(","))
            except ValueError:
                raise InputError(f"bad --pair {args.pair!r}") from None
            results.append(dunn_pairwise(groups, (i, j), args.adjust))
    else:
        raise InputError(f"unknown test {args.test!r}")
    rows = [r.as_row() for r in results]
    emit(out_dir / "analysis", ["method", "statistic", "df", "p"], rows, fmt,
         config)
    for r in results:
        df = "" if r.df is None else f" df={r.df}"
        print(f"{r.method}: statistic={r.statistic:.4f}{df} p={r.p_value:.4g}")
    return EXIT_OK


def _read_groups_csv(path) -> list[list[float]]:
    """Groups file: header ``group,value``, one observation per row."""
    if not path:
        raise InputError("this test needs --groups FILE")
    groups: dict[str, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or [h.strip().lower() for h in rows[0]] != ["group", "value"]:
        raise InputError(f"{path}: expected 'group,value' header")
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            groups.setdefault(row[0], []).append(float(row[1]))
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
    return [groups[k] for k in groups]


def emit(stem: Path, fields, rows, fmt: str, config: RunConfig) -> None:
    config_hash = config.snapshot_hash()
    write_csv(stem.with_suffix(".csv"), fields, rows, config_hash)
    if fmt == "json":
        write_json(stem.with_suffix(".json"), rows, config_hash)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hashecon",
        description="password-cracking economics and hashing-parameter analysis")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="KEY=VALUE configuration file")
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cost = sub.add_parser("cost", help="cost-per-hash table from market data")
    p_cost.add_argument("--market", help="market CSV (default: shipped snapshot)")
    p_cost.add_argument("--overhead", type=float, default=DEFAULT_OVERHEAD_FACTOR)
    p_cost.add_argument("--hash", action="append",
                        help="hash spec, repeatable (sha256 | argon2id:m=..,t=..,p=..)")
    p_cost.add_argument("--energy-check", action="store_true")
    p_cost.add_argument("--usd-per-kwh", type=float, default=0.05)
    p_cost.set_defaults(func=cmd_cost)

    p_sim = sub.add_parser("simulate", help="compromise-rate simulation")
    p_sim.add_argument("--strengths", help="strength CSV input")
    p_sim.add_argument("--passwords", help="raw password file input")
    p_sim.add_argument("--estimator", default="pattern",
                       choices=("pattern", "brute", "precomputed"))
    p_sim.add_argument("--precomputed", help="password,strength_bits CSV")
    p_sim.add_argument("--min-length", type=int, default=8)
    p_sim.add_argument("--hash", action="append")
    p_sim.add_argument("--budget", action="append", type=float)
    p_sim.add_argument("--market")
    p_sim.add_argument("--overhead", type=float, default=DEFAULT_OVERHEAD_FACTOR)
    p_sim.add_argument("--doubled", action="store_true",
                       help="also simulate the bit-strength-doubled variant")
    p_sim.add_argument("--curve", action="store_true",
                       help="emit log-uniform budget curves")
    p_sim.add_argument("--emit-distribution", action="store_true")
    p_sim.add_argument("--dataset-label", default="corpus")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.set_defaults(func=cmd_simulate)

    p_cls = sub.add_parser("classify", help="weaker/stronger classification")
    p_cls.add_argument("--configs", required=True,
                       help="observed configuration CSV")
    p_cls.add_argument("--anchors", help="anchor CSV (default: shipped)")
    p_cls.set_defaults(func=cmd_classify)

    p_scan = sub.add_parser("scan", help="repository/code search pipeline")
    p_scan.add_argument("--term", action="append", help="search term, repeatable")
    p_scan.add_argument("--mode", choices=("repos", "code"), default="repos")
    p_scan.add_argument("--live", action="store_true")
    p_scan.add_argument("--fixtures", help="recorded fixture directory")
    p_scan.add_argument("--cache-dir", help="cache directory for live scans")
    p_scan.add_argument("--from", dest="date_from", default="2008-01-01")
    p_scan.add_argument("--to", dest="date_to", default="2024-12-31")
    p_scan.add_argument("--languages", help="comma-separated language list")
    p_scan.add_argument("--exclusions", help="exclusion keyword file")
    p_scan.add_argument("--allow-owner", action="append", default=[])
    p_scan.add_argument("--relevance-term", default="scrypt",
                        help="term that gets the relevance procedure")
    p_scan.add_argument("--decisions", help="recorded review decisions CSV")
    p_scan.add_argument("--retention", action="append",
                        help="TERM=RATIO retained after false-positive removal")
    p_scan.add_argument("--workers", type=int, default=1)
    p_scan.set_defaults(func=cmd_scan)

    p_an = sub.add_parser("analyze", help="statistical tests on tables")
    p_an.add_argument("--test", required=True,
                      choices=("gof", "independence", "kruskal", "dunn"))
    p_an.add_argument("--table", help="contingency table CSV")
    p_an.add_argument("--groups", help="group,value CSV for rank tests")
    p_an.add_argument("--expected", default="uniform")
    p_an.add_argument("--pair", help="group pair for dunn, e.g. 0,1")
    p_an.add_argument("--adjust", default="none",
                      choices=("none", "bonferroni", "holm"))
    p_an.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(args.command)
    if args.config:
        try:
            for key, value in parse_config_file(args.config).items():
                config.set(key, value)
        except (OSError, InputError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    # only content-shaping settings enter the snapshot hash: output
    # location, emission format, and worker count change nothing about
    # the rows produced, and file/dir arguments are recorded as content
    # digests by each subcommand rather than as path strings
    skip = {"func", "config", "out_dir", "format", "workers",
            "market", "anchors", "configs", "strengths", "passwords",
            "precomputed", "table", "groups", "exclusions", "decisions",
            "fixtures", "cache_dir"}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        config.set(key, value)
    out_dir = Path(args.out_dir)
    try:
        return args.func(args, out_dir, args.format, config)
    except (NetworkError,) as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (InternalError,) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, DomainError, HasheconError, OSError, csv.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
