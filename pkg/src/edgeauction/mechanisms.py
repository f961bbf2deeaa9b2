"""The four auction mechanisms.

``dpam`` scores every price vector on the grid and samples one through the
exponential mechanism, so the published clearing price leaks almost nothing
about any single bid or ask.  ``dpam_s`` prices the resources one at a time
with a privacy budget split evenly across levels, trading revenue for a run
time linear in the number of resource types.  ``dtam`` and ``dtam_s`` are
the deterministic argmax counterparts used as non-private baselines; they
are implemented as a pure argmax, not as large-budget sampling.

Randomness policy: every random draw comes from a PCG64 generator seeded
with the 64-bit config seed, and prices are selected by inverse-CDF over
the exact distribution, so runs are bit-reproducible across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import allocation as alloc
from ._kernels import ScenarioArrays, score_price_rows
from .errors import CapacityError
from .grid import PriceGrid, product_matrix
from .model import AuctionOutcome, Scenario, buyer_utility, seller_utility

VARIANTS = ("dpam", "dtam", "dpam_s", "dtam_s")
DEFAULT_MAX_SCORED_VECTORS = 10_000_000


@dataclass(frozen=True)
class MechanismConfig:
    """Privacy budget, price grid, seed, and mechanism variant for one run."""

    epsilon: float
    grid: PriceGrid
    seed: int = 0
    variant: str = "dpam"
    max_scored_vectors: int = DEFAULT_MAX_SCORED_VECTORS

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"privacy budget must be positive, got {self.epsilon}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class PriceDistribution:
    """Exact selection law of the exponential mechanism over candidate prices.

    ``log_weights`` holds epsilon * score / (2 * sensitivity) per candidate;
    probabilities are normalized with max-subtraction so huge budgets cannot
    overflow.  ``revenues`` keeps the raw scores for expectation math.
    """

    support: np.ndarray
    log_weights: np.ndarray
    probabilities: np.ndarray
    revenues: np.ndarray

    def log_probabilities(self) -> np.ndarray:
        shift = self.log_weights - self.log_weights.max()
        return shift - math.log(np.exp(shift).sum())

    def sample_index(self, rng: np.random.Generator) -> int:
        """Inverse-CDF draw of a support index."""
        cumulative = np.cumsum(self.probabilities)
        idx = int(np.searchsorted(cumulative, rng.random(), side="right"))
        return min(idx, len(self.probabilities) - 1)

    def sample_indices(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cumulative = np.cumsum(self.probabilities)
        idx = np.searchsorted(cumulative, rng.random(count), side="right")
        return np.minimum(idx, len(self.probabilities) - 1)


def score_sensitivity(scenario: Scenario) -> float:
    """Largest possible score change from one report: price span times the
    total units each seller could move, summed over sellers."""
    span = scenario.bounds.c_max - scenario.bounds.c_min
    total = 0.0
    for seller in scenario.sellers:
        supply_sum = 0.0
        for z in range(scenario.k):
            supply_sum += seller.supply[z]
        total += span * supply_sum
    return total


def partial_score_sensitivity(scenario: Scenario, depth: int) -> float:
    """Sensitivity of the score restricted to the first ``depth`` resources."""
    if not 1 <= depth <= scenario.k:
        raise ValueError(f"depth {depth} outside 1..{scenario.k}")
    span = scenario.bounds.c_max - scenario.bounds.c_min
    total = 0.0
    for seller in scenario.sellers:
        supply_sum = 0.0
        for z in range(depth):
            supply_sum += seller.supply[z]
        total += span * supply_sum
    return total


def distribution_from_scores(revenues: np.ndarray, support: np.ndarray,
                             epsilon: float, sensitivity: float
                             ) -> PriceDistribution:
    """Exponential-mechanism law over the scored support.

    Zero sensitivity only happens in degenerate markets where every score is
    zero; the law is then uniform.
    """
    if sensitivity > 0:
        log_weights = epsilon * revenues / (2.0 * sensitivity)
    else:
        log_weights = np.zeros_like(revenues)
    shifted = np.exp(log_weights - log_weights.max())
    probabilities = shifted / shifted.sum()
    return PriceDistribution(support, log_weights, probabilities, revenues)


def dpam_distribution(scenario: Scenario, config: MechanismConfig,
                      arrays: Optional[ScenarioArrays] = None
                      ) -> PriceDistribution:
    """Score the whole grid product and form the exact selection law."""
    count = config.grid.product_count(scenario.k)
    if count > config.max_scored_vectors:
        raise CapacityError(
            f"grid product of {count} vectors exceeds the cap of "
            f"{config.max_scored_vectors}; use the sequential variant")
    rows = product_matrix(config.grid, scenario.k)
    revenues = score_price_rows(scenario, rows, arrays=arrays)
    return distribution_from_scores(revenues, rows, config.epsilon,
                                    score_sensitivity(scenario))


def build_outcome(scenario: Scenario, scored: alloc.ScoredPrice,
                  price: tuple[float, ...]) -> AuctionOutcome:
    """Attach utilities and revenue to a scored allocation at a full price."""
    buyer_utils = tuple(buyer_utility(scenario, i, scored.allocation, price)
                        for i in range(scenario.m))
    seller_utils = tuple(seller_utility(scenario, j, scored.allocation, price)
                         for j in range(scenario.n))
    return AuctionOutcome(price, scored.allocation, buyer_utils, seller_utils,
                          scored.revenue)


def dpam_run(scenario: Scenario, config: MechanismConfig) -> AuctionOutcome:
    """One joint-grid auction: private sampling or deterministic argmax."""
    if config.variant not in ("dpam", "dtam"):
        raise ValueError("dpam_run handles the dpam and dtam variants")
    distribution = dpam_distribution(scenario, config)
    if config.variant == "dtam":
        index = int(np.argmax(distribution.revenues))
    else:
        rng = np.random.Generator(np.random.PCG64(config.seed))
        index = distribution.sample_index(rng)
    price = tuple(float(p) for p in distribution.support[index])
    scored = alloc.score_price(scenario, price)
    return build_outcome(scenario, scored, price)


def sequential_level_distribution(scenario: Scenario, config: MechanismConfig,
                                  prefix: tuple[float, ...],
                                  arrays: Optional[ScenarioArrays] = None
                                  ) -> PriceDistribution:
    """Selection law for the next resource's unit price, given fixed ones.

    Candidates are the grid points appended to the prefix; the score is the
    prefix-restricted revenue and the budget per level is epsilon / k.
    """
    depth = len(prefix) + 1
    if depth > scenario.k:
        raise ValueError("prefix already covers every resource type")
    if arrays is None:
        arrays = ScenarioArrays(scenario)
    points = config.grid.points()
    rows = np.empty((len(points), depth), dtype=np.float64)
    rows[:, :depth - 1] = np.asarray(prefix, dtype=np.float64)
    rows[:, depth - 1] = points
    unit_bids = arrays.bids / arrays.total_demand
    effective = unit_bids * arrays.prefix_demand[:, depth - 1]
    revenues = score_price_rows(scenario, rows, effective, arrays)
    return distribution_from_scores(revenues, rows, config.epsilon / scenario.k,
                                    partial_score_sensitivity(scenario, depth))


def dpam_s_run(scenario: Scenario, config: MechanismConfig
               ) -> tuple[AuctionOutcome, list[PriceDistribution]]:
    """One sequential auction; returns the outcome and each level's law.

    Unit prices are chosen left to right; the returned allocation is the one
    induced at the final level by the realized full price vector.
    """
    if config.variant not in ("dpam_s", "dtam_s"):
        raise ValueError("dpam_s_run handles the dpam_s and dtam_s variants")
    arrays = ScenarioArrays(scenario)
    if np.any(arrays.total_demand == 0):
        raise ValueError("every buyer needs positive total demand for the "
                         "sequential variants")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    prefix: tuple[float, ...] = ()
    distributions: list[PriceDistribution] = []
    for _ in range(scenario.k):
        level = sequential_level_distribution(scenario, config, prefix, arrays)
        distributions.append(level)
        if config.variant == "dtam_s":
            index = int(np.argmax(level.revenues))
        else:
            index = level.sample_index(rng)
        prefix = prefix + (float(level.support[index, -1]),)
    scored = alloc.score_price(scenario, prefix, sequential=True)
    return build_outcome(scenario, scored, prefix), distributions


def run_mechanism(scenario: Scenario, config: MechanismConfig) -> AuctionOutcome:
    """Dispatch on the configured variant."""
    if config.variant in ("dpam", "dtam"):
        return dpam_run(scenario, config)
    return dpam_s_run(scenario, config)[0]


def expected_revenue(distribution: PriceDistribution,
                     revenues: np.ndarray) -> float:
    """Exact expectation of the score under the selection law."""
    if len(revenues) != len(distribution.probabilities):
        raise ValueError("revenues do not match the distribution support")
    return float(np.dot(distribution.probabilities, revenues))


def sequential_expected_revenue(scenario: Scenario, config: MechanismConfig,
                                max_paths: int = 1_000_000) -> float:
    """Exact expected final revenue of the sequential mechanism.

    Enumerates every price path (levels ** k of them), weighting each final
    score by the product of its per-level selection probabilities.  Only
    feasible at desk scale; raises beyond ``max_paths``.
    """
    if config.grid.product_count(scenario.k) > max_paths:
        raise CapacityError("too many price paths for exact enumeration")
    arrays = ScenarioArrays(scenario)

    def walk(prefix: tuple[float, ...], probability: float) -> float:
        level = sequential_level_distribution(scenario, config, prefix, arrays)
        if len(prefix) + 1 == scenario.k:
            return probability * float(
                np.dot(level.probabilities, level.revenues))
        total = 0.0
        for t in range(len(level.probabilities)):
            branch = probability * float(level.probabilities[t])
            total += walk(prefix + (float(level.support[t, -1]),), branch)
        return total

    return walk((), 1.0)
