"""Password corpus ingestion and strength distributions.

A corpus enters as a raw newline-delimited byte file, is decoded with a
fixed two-stage policy (strict UTF-8, then one configurable fallback
codec, then drop-and-count), filtered by minimum length, scored by a
pluggable strength estimator, and summarized as a distribution of
log2-guess-number values. Distributions are stored either exactly
(sorted values) or as fixed-width histograms binned from 0.

Quantiles interpolate linearly between order statistics everywhere;
standard deviations are population standard deviations.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptyCorpusError, InputError
from .strength import StrengthEstimator, estimate_strength

DEFAULT_BIN_WIDTH_BITS = 0.1
DEFAULT_FALLBACK_ENCODING = "cp1252"


@dataclass(frozen=True)
class PasswordRecord:
    password: str
    strength_bits: float | None = None

    def __post_init__(self):
        if len(self.password) < 1:
            raise DomainError("password must be at least one character")
        if self.strength_bits is not None and self.strength_bits < 0:
            raise DomainError(f"strength must be nonnegative, got {self.strength_bits}")


@dataclass(frozen=True)
class IngestionLog:
    lines_read: int
    undecodable_removed: int
    below_min_length_removed: int
    retained: int

    def __post_init__(self):
        expected = self.lines_read - self.undecodable_removed - self.below_min_length_removed
        if self.retained != expected:
            raise DomainError(
                f"ingestion accounting broken: {self.retained} retained but "
                f"{self.lines_read} - {self.undecodable_removed} - "
                f"{self.below_min_length_removed} = {expected}")


@dataclass(frozen=True)
class CorpusStats:
    count: int
    mean_bits: float
    median_bits: float
    stddev_bits: float
    q1_bits: float
    q3_bits: float
    mean_length: float | None = None
    median_length: float | None = None
    stddev_length: float | None = None


@dataclass(frozen=True, eq=False)
class StrengthDistribution:
    """Multiset of strength values: exact (sorted array) or histogram.

    Exactly one of ``values`` / (``bin_width_bits``, ``bin_counts``) is
    set. Histogram bins are contiguous from 0; a value v lives in bin
    floor(v / bin_width_bits) and is represented by the bin's lower
    edge for quantile and threshold queries, so histogram answers agree
    with exact ones to within one bin width.
    """

    total_count: int
    values: np.ndarray | None = None
    bin_width_bits: float | None = None
    bin_counts: np.ndarray | None = None

    def __post_init__(self):
        if self.total_count < 1:
            raise EmptyCorpusError("distribution needs at least one strength value")
        if (self.values is None) == (self.bin_counts is None):
            raise DomainError("exactly one storage mode must be populated")
        if self.bin_counts is not None:
            if self.bin_width_bits is None or self.bin_width_bits <= 0:
                raise DomainError("histogram needs a positive bin width")
            if int(self.bin_counts.sum()) != self.total_count:
                raise DomainError("histogram counts do not sum to total_count")
            if (self.bin_counts < 0).any():
                raise DomainError("negative histogram count")
        else:
            if len(self.values) != self.total_count:
                raise DomainError("value count does not match total_count")
            if (self.values < 0).any():
                raise DomainError("negative strength value")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_values(cls, strengths: Iterable[float]) -> "StrengthDistribution":
        arr = np.sort(np.asarray(list(strengths), dtype=np.float64))
        if arr.size == 0:
            raise EmptyCorpusError("no strength values supplied")
        return cls(total_count=int(arr.size), values=arr)

    @classmethod
    def from_records(cls, records: Sequence[PasswordRecord]) -> "StrengthDistribution":
        missing = [r.password for r in records if r.strength_bits is None]
        if missing:
            raise DomainError(f"{len(missing)} record(s) have no strength assigned")
        return cls.from_values(r.strength_bits for r in records)

    @classmethod
    def from_histogram(cls, bin_width_bits: float,
                       counts: Iterable[int]) -> "StrengthDistribution":
        arr = np.asarray(list(counts), dtype=np.int64)
        total = int(arr.sum())
        if total == 0:
            raise EmptyCorpusError("histogram has no mass")
        return cls(total_count=total, bin_width_bits=float(bin_width_bits),
                   bin_counts=arr)

    # -- storage --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.values is not None

    def to_histogram(self, bin_width_bits: float = DEFAULT_BIN_WIDTH_BITS) -> "StrengthDistribution":
        if not self.is_exact:
            return self
        idx = np.floor(self.values / bin_width_bits).astype(np.int64)
        counts = np.bincount(idx)
        return StrengthDistribution.from_histogram(bin_width_bits, counts)

    def _value_at(self, i: int) -> float:
        """i-th order statistic (0-based); histogram mode uses bin lower edges."""
        if self.is_exact:
            return float(self.values[i])
        cum = np.cumsum(self.bin_counts)
        bin_idx = int(np.searchsorted(cum, i, side="right"))
        return bin_idx * self.bin_width_bits

    # -- queries ----------------------------------------------------------

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"quantile must be in [0, 1], got {q}")
        pos = q * (self.total_count - 1)
        lo = math.floor(pos)
        hi = math.ceil(pos)
        v_lo = self._value_at(lo)
        if hi == lo:
            return v_lo
        v_hi = self._value_at(hi)
        return v_lo + (v_hi - v_lo) * (pos - lo)

    def fraction_at_or_below(self, bits: float) -> float:
        """Fraction of values <= bits (inclusive)."""
        if self.is_exact:
            n_below = int(np.searchsorted(self.values, bits, side="right"))
        else:
            if bits < 0:
                return 0.0
            last_bin = math.floor(bits / self.bin_width_bits)
            n_below = int(self.bin_counts[:last_bin + 1].sum())
        return n_below / self.total_count

    def mean(self) -> float:
        if self.is_exact:
            return float(self.values.mean())
        edges = np.arange(len(self.bin_counts)) * self.bin_width_bits
        return float((edges * self.bin_counts).sum() / self.total_count)

    def stddev(self) -> float:
        if self.is_exact:
            return float(self.values.std())
        edges = np.arange(len(self.bin_counts)) * self.bin_width_bits
        mu = self.mean()
        var = float((self.bin_counts * (edges - mu) ** 2).sum() / self.total_count)
        return math.sqrt(var)


def ingest(path, min_length: int,
           fallback_encoding: str = DEFAULT_FALLBACK_ENCODING
           ) -> tuple[list[PasswordRecord], IngestionLog]:
    """Read a newline-delimited password file with decode-or-drop policy.

    Lines that are not strict UTF-8 are retried once with
    ``fallback_encoding``; lines failing both are dropped and counted.
    Length is counted in unicode scalar values; the effective minimum is
    max(min_length, 1) since empty passwords are never valid records.
    """
    if min_length < 0:
        raise DomainError(f"min_length must be >= 0, got {min_length}")
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    effective_min = max(min_length, 1)
    records = []
    undecodable = 0
    too_short = 0
    for line in lines:
        line = line.rstrip(b"\r")
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError:
            try:
                text = line.decode(fallback_encoding)
            except (UnicodeDecodeError, LookupError):
                undecodable += 1
                continue
        if len(text) < effective_min:
            too_short += 1
            continue
        records.append(PasswordRecord(text))
    log = IngestionLog(lines_read=len(lines), undecodable_removed=undecodable,
                       below_min_length_removed=too_short, retained=len(records))
    if not records:
        raise EmptyCorpusError(f"{path}: no passwords retained "
                               f"({log.lines_read} lines read)")
    return records, log


def estimate_records(records: Sequence[PasswordRecord],
                     estimator: StrengthEstimator,
                     workers: int = 1) -> list[PasswordRecord]:
    """Assign strengths to records; order-preserving and deterministic
    for any worker count (estimation is pure per record)."""
    def score(rec: PasswordRecord) -> PasswordRecord:
        return replace(rec, strength_bits=estimate_strength(rec.password, estimator))

    if workers <= 1:
        return [score(r) for r in records]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(score, records))


def build_distribution(records: Sequence[PasswordRecord]) -> StrengthDistribution:
    if not records:
        raise EmptyCorpusError("cannot build a distribution from zero records")
    return StrengthDistribution.from_records(records)


def synthesize_doubled(d: StrengthDistribution) -> StrengthDistribution:
    """Map every strength s to 2s; shape-preserving, count-preserving.

    Exact storage doubles values; histogram storage doubles the bin
    width (same counts), so quantiles double exactly in both modes.
    """
    if d.is_exact:
        return StrengthDistribution(total_count=d.total_count, values=d.values * 2.0)
    return StrengthDistribution(total_count=d.total_count,
                                bin_width_bits=d.bin_width_bits * 2.0,
                                bin_counts=d.bin_counts)


def summarize(source) -> CorpusStats:
    """Summary statistics of strengths (and lengths when records are given).

    ``source`` may be a StrengthDistribution, a sequence of scored
    PasswordRecords, or a plain sequence of strength values. Length
    statistics are only available from records.
    """
    lengths = None
    if isinstance(source, StrengthDistribution):
        dist = source
    else:
        items = list(source)
        if not items:
            raise EmptyCorpusError("nothing to summarize")
        if isinstance(items[0], PasswordRecord):
            dist = StrengthDistribution.from_records(items)
            lengths = np.asarray([len(r.password) for r in items], dtype=np.float64)
        else:
            dist = StrengthDistribution.from_values(items)

    stats = dict(
        count=dist.total_count,
        mean_bits=dist.mean(),
        median_bits=dist.quantile(0.5),
        stddev_bits=dist.stddev(),
        q1_bits=dist.quantile(0.25),
        q3_bits=dist.quantile(0.75),
    )
    if lengths is not None:
        stats.update(
            mean_length=float(lengths.mean()),
            median_length=float(np.quantile(lengths, 0.5)),
            stddev_length=float(lengths.std()),
        )
    return CorpusStats(**stats)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def read_strength_csv(path) -> StrengthDistribution:
    """Read a strength file in either supported schema.

    ``strength_bits,count`` aggregates identical values;``password,
    strength_bits`` carries one row per password. Header row required;
    '#' lines ignored.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise InputError(f"{path}: empty strength file")
    header = [h.strip().lower() for h in rows[0]]
    values: list[float] = []
    if header == ["strength_bits", "count"]:
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                bits, count = float(row[0]), int(row[1])
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
            if bits < 0 or count < 0:
                raise InputError(f"{path}: line {lineno}: negative value")
            values.extend([bits] * count)
    elif header == ["password", "strength_bits"]:
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                values.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
    else:
        raise InputError(
            f"{path}: unrecognized strength header {rows[0]!r}; expected "
            "'strength_bits,count' or 'password,strength_bits'")
    if not values:
        raise EmptyCorpusError(f"{path}: no strength values")
    return StrengthDistribution.from_values(values)


def read_strength_table(path) -> dict[str, float]:
    """Read a ``password,strength_bits`` file into a passthrough table."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header = [h.strip().lower() for h in rows[0]] if rows else []
    if header != ["password", "strength_bits"]:
        raise InputError(f"{path}: expected 'password,strength_bits' header")
    table = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            table[row[0]] = float(row[1])
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from None
    return table


def distribution_rows(d: StrengthDistribution,
                      bin_width_bits: float = DEFAULT_BIN_WIDTH_BITS):
    """Rows (bin_lower_bits, count) for CSV output; exact distributions
    are binned at ``bin_width_bits`` first."""
    hist = d.to_histogram(bin_width_bits) if d.is_exact else d
    width = hist.bin_width_bits
    for i, count in enumerate(hist.bin_counts):
        if count:
            yield (round(i * width, 10), int(count))
