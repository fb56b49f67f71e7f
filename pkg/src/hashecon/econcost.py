"""USD cost per hash derived from cryptocurrency-mining market data.

The mining network pays out (blocks/hour x reward x unit price) dollars
per hour for (hashrate x 3600) hashes per hour; the quotient is the
marginal revenue per hash, which we treat as the attacker's cost floor.
Memory-hard hashing cost is obtained from the RandomX figure divided by
a computational overhead factor, then scaled linearly in memory (and,
as an extension, in iteration count).
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import DomainError, InputError

# one full-memory computation is defined against a 2 GiB working set
REFERENCE_MEMORY_KIB = 2 * 1024 * 1024
DEFAULT_OVERHEAD_FACTOR = 100.0
JOULES_PER_KWH = 3.6e6


class Algorithm(str, Enum):
    SHA256 = "sha256"
    ARGON2ID = "argon2id"


@dataclass(frozen=True)
class MiningMarket:
    """A dated snapshot of one proof-of-work network's economics."""

    coin: str
    network_hashrate: float        # hashes per second
    blocks_per_hour: float
    block_reward_units: float      # coin units per block
    unit_price_usd: float
    observed_at: dt.date

    def __post_init__(self):
        if self.network_hashrate <= 0:
            raise DomainError(f"hashrate must be positive, got {self.network_hashrate}")
        if self.blocks_per_hour <= 0:
            raise DomainError(f"blocks_per_hour must be positive, got {self.blocks_per_hour}")
        if self.block_reward_units <= 0:
            raise DomainError(f"block reward must be positive, got {self.block_reward_units}")
        if self.unit_price_usd < 0:
            raise DomainError(f"unit price must be nonnegative, got {self.unit_price_usd}")


@dataclass(frozen=True)
class HashConfig:
    """A hashing algorithm plus its tunable parameters.

    SHA-256 ignores memory/iterations/parallelism; Argon2id requires
    memory_kib >= 8 * parallelism (the algorithm's own minimum).
    """

    algorithm: Algorithm
    memory_kib: int = REFERENCE_MEMORY_KIB
    t: int = 1
    p: int = 1

    def __post_init__(self):
        if self.algorithm is Algorithm.ARGON2ID:
            if self.t < 1 or self.p < 1 or self.memory_kib < 1:
                raise DomainError("Argon2 parameters must be positive integers")
            if self.memory_kib < 8 * self.p:
                raise DomainError(
                    f"memory_kib={self.memory_kib} below Argon2 minimum of 8*p={8 * self.p}")

    @classmethod
    def sha256(cls) -> "HashConfig":
        return cls(algorithm=Algorithm.SHA256)

    @classmethod
    def argon2id(cls, memory_kib: int, t: int = 1, p: int = 1) -> "HashConfig":
        return cls(algorithm=Algorithm.ARGON2ID, memory_kib=memory_kib, t=t, p=p)

    def describe(self) -> str:
        if self.algorithm is Algorithm.SHA256:
            return "sha256"
        return f"argon2id(m={self.memory_kib}KiB,t={self.t},p={self.p})"


@dataclass(frozen=True)
class CostModel:
    usd_per_hash: float
    provenance: str                 # "mining-proxy" | "energy" | "manual"
    config: HashConfig
    source: str = ""

    def __post_init__(self):
        if self.usd_per_hash <= 0:
            raise DomainError(f"cost per hash must be positive, got {self.usd_per_hash}")
        if self.provenance not in ("mining-proxy", "energy", "manual"):
            raise InputError(f"unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class CpuProfile:
    """A consumer CPU operating point for the energy cross-check.

    TDP values are the public specs; the hash rates are reconstructed
    operating points for full-memory hashing on those parts.
    """

    name: str
    tdp_watts: float
    hashes_per_second: float


def mining_cost_per_hash(market: MiningMarket) -> float:
    """Marginal network revenue per hash, in USD.

    revenue/hour = blocks_per_hour * reward * price;
    hashes/hour  = hashrate * 3600.
    """
    revenue_per_hour = (market.blocks_per_hour * market.block_reward_units
                        * market.unit_price_usd)
    cost = revenue_per_hour / (market.network_hashrate * 3600.0)
    if cost <= 0:
        raise DomainError(
            f"market snapshot for {market.coin} yields nonpositive cost per hash; "
            "budget arithmetic requires a positive cost")
    return cost


def argon2_base_cost(randomx_cost: float, overhead_factor: float = DEFAULT_OVERHEAD_FACTOR) -> float:
    """Cost of one full-memory (2 GiB) computation, from the RandomX cost.

    RandomX layers virtual-machine execution on top of its memory fill,
    so its per-hash cost over-counts a bare memory-hard hash by roughly
    ``overhead_factor``; dividing by it is a conservative floor.
    """
    if randomx_cost <= 0:
        raise DomainError(f"RandomX cost must be positive, got {randomx_cost}")
    if overhead_factor < 1:
        raise DomainError(f"overhead factor must be >= 1, got {overhead_factor}")
    return randomx_cost / overhead_factor


def scale_argon2_cost(base_2gib_cost: float, config: HashConfig) -> float:
    """Scale the 2 GiB base cost to an arbitrary Argon2 configuration.

    Cost is linear in the memory filled and, one pass over memory per
    iteration, linear in t. Parallelism does not change total work
    (m x t is constant across lanes) and is ignored.
    """
    if config.algorithm is not Algorithm.ARGON2ID:
        raise TypeError(f"memory scaling applies to Argon2 configs, got {config.algorithm}")
    if base_2gib_cost <= 0:
        raise DomainError(f"base cost must be positive, got {base_2gib_cost}")
    return base_2gib_cost * (config.memory_kib / REFERENCE_MEMORY_KIB) * config.t


def energy_cost_per_hash(tdp_watts: float, hashes_per_second: float,
                         usd_per_kwh: float) -> float:
    """Electricity-only cost per hash for a CPU at its TDP."""
    if tdp_watts <= 0:
        raise DomainError(f"TDP must be positive, got {tdp_watts}")
    if hashes_per_second <= 0:
        raise DomainError(f"hash rate must be positive, got {hashes_per_second}")
    if usd_per_kwh < 0:
        raise DomainError(f"energy price must be nonnegative, got {usd_per_kwh}")
    return tdp_watts / (hashes_per_second * JOULES_PER_KWH) * usd_per_kwh


def cost_model_for(config: HashConfig, markets: dict[str, MiningMarket],
                   overhead_factor: float = DEFAULT_OVERHEAD_FACTOR) -> CostModel:
    """Build the mining-proxy cost model for one hash configuration.

    SHA-256 reads the bitcoin market row directly; Argon2id derives its
    base from the monero (RandomX) row and scales by memory and t.
    """
    if config.algorithm is Algorithm.SHA256:
        market = _require_market(markets, "bitcoin")
        cost = mining_cost_per_hash(market)
    else:
        market = _require_market(markets, "monero")
        base = argon2_base_cost(mining_cost_per_hash(market), overhead_factor)
        cost = scale_argon2_cost(base, config)
    return CostModel(usd_per_hash=cost, provenance="mining-proxy",
                     config=config, source=f"{market.coin}@{market.observed_at.isoformat()}")


def _require_market(markets: dict[str, MiningMarket], coin: str) -> MiningMarket:
    try:
        return markets[coin]
    except KeyError:
        raise InputError(f"market data has no {coin!r} row") from None


# ---------------------------------------------------------------------------
# shipped data
# ---------------------------------------------------------------------------

def load_market_csv(path=None) -> dict[str, MiningMarket]:
    """Load market snapshots keyed by coin name.

    Columns: coin,hashrate_hs,blocks_per_hour,reward_units,unit_price_usd,observed_at
    """
    if path is None:
        source = resources.files("hashecon.data") / "market_20250220.csv"
        text = source.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    markets: dict[str, MiningMarket] = {}
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for lineno, row in enumerate(reader, start=2):
        try:
            market = MiningMarket(
                coin=row["coin"].strip(),
                network_hashrate=float(row["hashrate_hs"]),
                blocks_per_hour=float(row["blocks_per_hour"]),
                block_reward_units=float(row["reward_units"]),
                unit_price_usd=float(row["unit_price_usd"]),
                observed_at=dt.date.fromisoformat(row["observed_at"].strip()),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"market CSV line {lineno}: {exc}") from None
        markets[market.coin] = market
    if not markets:
        raise InputError("market CSV contained no rows")
    return markets


def load_cpu_profiles(path=None) -> list[CpuProfile]:
    """Load the CPU operating points used by the energy cross-check."""
    if path is None:
        source = resources.files("hashecon.data") / "cpu_profiles.csv"
        text = source.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    profiles = []
    for row in reader:
        profiles.append(CpuProfile(
            name=row["name"].strip(),
            tdp_watts=float(row["tdp_watts"]),
            hashes_per_second=float(row["hashes_per_second"]),
        ))
    if not profiles:
        raise InputError("CPU profile CSV contained no rows")
    return profiles


def fleet_energy_cost(profiles: list[CpuProfile], usd_per_kwh: float) -> float:
    """Average energy cost per hash across a CPU fleet."""
    costs = [energy_cost_per_hash(p.tdp_watts, p.hashes_per_second, usd_per_kwh)
             for p in profiles]
    return math.fsum(costs) / len(costs)
