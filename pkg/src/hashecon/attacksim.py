"""Budget-driven attack simulation over strength distributions.

The attack model is threshold-based: with an affordable guess count G,
an account is compromised iff its password's guess number 2^strength
is at most G. Guess counts are computed with exact rational arithmetic
(they routinely exceed the 2^53 integer range of doubles); strengths
stay in floating point, and the comparison happens in log space with a
1e-9 guard band on the threshold.

Per-account budgets imply independently salted hashes, so there is no
cross-account amortization anywhere in this module.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import StrengthDistribution
from .econcost import Algorithm, CostModel, HashConfig
from .errors import DomainError

LOG_GUARD_BAND = 1e-9

DEFAULT_CURVE_MIN_USD = 1e-3
DEFAULT_CURVE_MAX_USD = 1e3
DEFAULT_CURVE_POINTS = 50


@dataclass(frozen=True)
class BudgetScenario:
    usd_per_account: float
    label: str = ""

    def __post_init__(self):
        if self.usd_per_account <= 0:
            raise DomainError(f"budget must be positive, got {self.usd_per_account}")


@dataclass(frozen=True)
class AttackResult:
    dataset: str
    config: HashConfig
    budget_usd: float
    affordable_guesses: int
    threshold_bits: float
    compromise_rate: float

    def __post_init__(self):
        if not 0.0 <= self.compromise_rate <= 1.0:
            raise DomainError(f"rate outside [0, 1]: {self.compromise_rate}")


def affordable_guesses(budget_usd: float, usd_per_hash: float) -> int:
    """floor(budget / cost) with exact rational arithmetic."""
    if usd_per_hash <= 0:
        raise DomainError(f"cost per hash must be positive, got {usd_per_hash}")
    if budget_usd < 0:
        raise DomainError(f"budget must be nonnegative, got {budget_usd}")
    if budget_usd == 0:
        return 0
    return math.floor(Fraction(budget_usd) / Fraction(usd_per_hash))


def threshold_bits(guesses: int) -> float:
    """log2 of the guess budget; -inf when nothing is affordable."""
    if guesses < 1:
        return float("-inf")
    return math.log2(guesses)


def compromise_rate(d: StrengthDistribution, guesses: int) -> float:
    """Fraction of the distribution with guess number <= ``guesses``."""
    if guesses < 0:
        raise DomainError(f"guess count must be nonnegative, got {guesses}")
    if guesses == 0:
        return 0.0
    return d.fraction_at_or_below(threshold_bits(guesses) + LOG_GUARD_BAND)


def simulate_cell(dataset: str, d: StrengthDistribution, cost: CostModel,
                  budget: BudgetScenario) -> AttackResult:
    guesses = affordable_guesses(budget.usd_per_account, cost.usd_per_hash)
    return AttackResult(
        dataset=dataset,
        config=cost.config,
        budget_usd=budget.usd_per_account,
        affordable_guesses=guesses,
        threshold_bits=threshold_bits(guesses),
        compromise_rate=compromise_rate(d, guesses),
    )


def simulate_matrix(distributions: Sequence[tuple[str, StrengthDistribution]],
                    cost_models: Sequence[CostModel],
                    budgets: Sequence[BudgetScenario],
                    workers: int = 1) -> list[AttackResult]:
    """One AttackResult per (distribution, cost model, budget).

    Ordering is distribution-major, then cost model, then budget, and
    is identical for any worker count (cells are pure).
    """
    if not distributions or not cost_models or not budgets:
        raise DomainError("simulate_matrix needs nonempty inputs")
    cells = [(name, d, cost, budget)
             for name, d in distributions
             for cost in cost_models
             for budget in budgets]
    if workers <= 1:
        return [simulate_cell(*cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: simulate_cell(*c), cells))


def budget_curve(dataset: str, d: StrengthDistribution, cost: CostModel,
                 min_usd: float = DEFAULT_CURVE_MIN_USD,
                 max_usd: float = DEFAULT_CURVE_MAX_USD,
                 points: int = DEFAULT_CURVE_POINTS) -> list[AttackResult]:
    """Log-uniform budget sweep for figure-style output."""
    if min_usd <= 0 or max_usd <= min_usd:
        raise DomainError("curve needs 0 < min_usd < max_usd")
    if points < 2:
        raise DomainError("curve needs at least 2 points")
    lo, hi = math.log10(min_usd), math.log10(max_usd)
    results = []
    for i in range(points):
        usd = 10 ** (lo + (hi - lo) * i / (points - 1))
        results.append(simulate_cell(dataset, d, cost, BudgetScenario(usd)))
    return results


def result_rows(results: Sequence[AttackResult]):
    """Rows for the simulation CSV/JSON interface."""
    for r in results:
        is_argon = r.config.algorithm is Algorithm.ARGON2ID
        yield {
            "dataset": r.dataset,
            "algorithm": r.config.algorithm.value,
            "memory_kib": r.config.memory_kib if is_argon else "",
            "t": r.config.t if is_argon else "",
            "budget_usd": r.budget_usd,
            "guesses": r.affordable_guesses,
            "threshold_bits": r.threshold_bits,
            "compromise_rate": r.compromise_rate,
        }
