"""Classification of Argon2 (t, m) configurations against a reference line.

A set of anchor recommendations is fit with ordinary least squares in
log-log space, ln(m_kib) = intercept + slope * ln(t), and an observed
configuration is "stronger" iff its memory is on or above the line at
its t (the reference itself must never come out weaker than itself).
All memory is handled in KiB.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import DomainError, InputError
from .stats import ContingencyTable

WEAKER = "weaker"
STRONGER = "stronger"

DEFAULT_YEAR_EDGES = (2018, 2021)
DEFAULT_STAR_EDGES = (4, 10, 30)


@dataclass(frozen=True)
class Argon2Config:
    t: int
    memory_kib: int
    p: int = 1
    source_label: str = ""
    category: str = ""
    stars: int | None = None
    created_year: int | None = None

    def __post_init__(self):
        if self.t < 1:
            raise DomainError(f"t must be >= 1, got {self.t}")
        if self.p < 1:
            raise DomainError(f"p must be >= 1, got {self.p}")
        if self.memory_kib < 8 * self.p:
            raise DomainError(
                f"memory_kib={self.memory_kib} below Argon2 minimum 8*p={8 * self.p}")


@dataclass(frozen=True)
class AnchorSet:
    anchors: tuple[tuple[int, int], ...]   # (t, memory_kib)

    def __post_init__(self):
        if len(self.anchors) < 2:
            raise DomainError("anchor set needs at least 2 anchors")
        ts = [t for t, _ in self.anchors]
        if len(set(ts)) != len(ts):
            raise DomainError(f"anchor t values must be distinct, got {ts}")
        for t, m in self.anchors:
            if t < 1 or m < 1:
                raise DomainError(f"anchors must be positive, got ({t}, {m})")


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    residual_sse: float

    def __post_init__(self):
        for name, v in (("slope", self.slope), ("intercept", self.intercept),
                        ("residual_sse", self.residual_sse)):
            if not math.isfinite(v):
                raise DomainError(f"non-finite {name}: {v}")

    def predicted_memory_kib(self, t: int) -> float:
        return math.exp(self.intercept + self.slope * math.log(t))


def fit_loglog(anchors: AnchorSet) -> LogLogFit:
    """Ordinary least squares of ln(m) on ln(t); exact for two anchors."""
    xs = [math.log(t) for t, _ in anchors.anchors]
    ys = [math.log(m) for _, m in anchors.anchors]
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    sse = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    return LogLogFit(slope=slope, intercept=intercept, residual_sse=sse)


def classify(config: Argon2Config, fit: LogLogFit) -> str:
    """"stronger" iff ln(m) >= the fitted line at ln(t); ties are
    stronger. Parallelism does not enter the comparison."""
    line = fit.intercept + fit.slope * math.log(config.t)
    return STRONGER if math.log(config.memory_kib) >= line else WEAKER


def cluster_configs(configs: Sequence[Argon2Config]) -> list[tuple[tuple[int, int], int]]:
    """(t, memory_kib) frequency table, count descending, ties by
    (t, m) ascending."""
    if not configs:
        raise InputError("no configurations to cluster")
    counts = Counter((c.t, c.memory_kib) for c in configs)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def strength_table(labeled: Sequence[tuple[Argon2Config, str]],
                   grouping, group_order: Sequence[str] | None = None
                   ) -> ContingencyTable:
    """Cross-tabulate weaker/stronger against a categorical attribute.

    ``grouping`` is an attribute name of Argon2Config or a callable
    mapping a config to its group label. Group columns follow
    ``group_order`` when given, else first-seen order.
    """
    if callable(grouping):
        key = grouping
    else:
        def key(cfg, _attr=grouping):
            value = getattr(cfg, _attr)
            if value is None or value == "":
                raise InputError(f"config {cfg.source_label!r} missing {_attr!r}")
            return str(value)

    groups: list[str] = list(group_order) if group_order else []
    cells: dict[tuple[str, str], int] = {}
    for cfg, label in labeled:
        if label not in (WEAKER, STRONGER):
            raise InputError(f"unknown strength label {label!r}")
        g = key(cfg)
        if g not in groups:
            if group_order:
                raise InputError(f"group {g!r} not in declared order {group_order}")
            groups.append(g)
        cells[(label, g)] = cells.get((label, g), 0) + 1
    counts = tuple(
        tuple(cells.get((label, g), 0) for g in groups)
        for label in (WEAKER, STRONGER)
    )
    return ContingencyTable(row_labels=(WEAKER, STRONGER),
                            col_labels=tuple(groups), counts=counts)


def year_band(year: int, edges: tuple[int, int] = DEFAULT_YEAR_EDGES) -> str:
    """Three creation-year bands: <=e0, e0+1..e1, >e1."""
    e0, e1 = edges
    if year <= e0:
        return f"<={e0}"
    if year <= e1:
        return f"{e0 + 1}-{e1}"
    return f">{e1}"


def star_band(stars: int, edges: tuple[int, ...] = DEFAULT_STAR_EDGES) -> str:
    """Star-count bands; default 3-4, 5-10, 11-30, >30."""
    lo = 3
    for hi in edges:
        if stars <= hi:
            return f"{lo}-{hi}"
        lo = hi + 1
    return f">{edges[-1]}"


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def load_anchor_csv(path=None) -> AnchorSet:
    """Anchor file: header ``t,memory_kib``; shipped default is the
    two-rung reference set (t=1, 46 MiB) and (t=2, 19 MiB)."""
    if path is None:
        text = (resources.files("hashecon.data") / "anchors_default.csv").read_text("utf-8")
        name = "anchors_default.csv"
    else:
        text = Path(path).read_text(encoding="utf-8")
        name = str(path)
    rows = [r for r in csv.reader(text.splitlines())
            if r and not r[0].startswith("#")]
    if not rows or [h.strip().lower() for h in rows[0]] != ["t", "memory_kib"]:
        raise InputError(f"{name}: expected 't,memory_kib' header")
    anchors = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            anchors.append((int(row[0]), int(row[1])))
        except (ValueError, IndexError) as exc:
            raise InputError(f"{name}: line {lineno}: {exc}") from None
    return AnchorSet(tuple(anchors))


def read_config_csv(path) -> list[Argon2Config]:
    """Observed-configuration file with header
    ``source_label,t,memory_kib,p,category,stars,created_year``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise InputError(f"{path}: empty configuration file")
    expected = ["source_label", "t", "memory_kib", "p", "category", "stars",
                "created_year"]
    if [h.strip().lower() for h in rows[0]] != expected:
        raise InputError(f"{path}: expected header {','.join(expected)}")
    configs = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            configs.append(Argon2Config(
                source_label=row[0],
                t=int(row[1]),
                memory_kib=int(row[2]),
                p=int(row[3]) if row[3] else 1,
                category=row[4],
                stars=int(row[5]) if row[5] else None,
                created_year=int(row[6]) if row[6] else None,
            ))
        except (ValueError, IndexError, DomainError) as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
    if not configs:
        raise InputError(f"{path}: no configuration rows")
    return configs
