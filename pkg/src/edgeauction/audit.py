"""Executable checks of the mechanism guarantees.

Every check here is exact: privacy ratios are computed on fully enumerated
selection laws and truthfulness gaps on exact expectations, never on Monte
Carlo estimates, because sampling noise would swamp the small gaps the
guarantees allow.  That limits the audits to desk-scale scenarios, which is
where they are meant to run.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import allocation as alloc
from .mechanisms import (MechanismConfig, dpam_distribution, dpam_s_run,
                         run_mechanism, sequential_level_distribution)
from .model import (Scenario, buyer_utility, seller_utility,
                    validate_allocation)

DP_TOLERANCE = 1e-6
UTILITY_TOLERANCE = 1e-9
GAIN_EPSILON = 1e-12


@dataclass(frozen=True)
class AuditReport:
    """Outcome of one audit: worst observed violation and what produced it."""

    check_name: str
    instances_tested: int
    max_violation: float
    tolerance: float
    passed: bool
    worst_case: Optional[dict] = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def replace_buyer_bid(scenario: Scenario, buyer_index: int, bid: float) -> Scenario:
    """Scenario with one buyer's public bid changed (valuation untouched)."""
    buyers = list(scenario.buyers)
    buyers[buyer_index] = dataclasses.replace(buyers[buyer_index], bid=bid)
    return dataclasses.replace(scenario, buyers=tuple(buyers))


def replace_seller_ask(scenario: Scenario, seller_index: int,
                       ask: tuple[float, ...]) -> Scenario:
    """Scenario with one seller's public ask vector changed (cost untouched)."""
    sellers = list(scenario.sellers)
    sellers[seller_index] = dataclasses.replace(sellers[seller_index], ask=ask)
    return dataclasses.replace(scenario, sellers=tuple(sellers))


def dp_log_gap(scenario: Scenario, neighbor: Scenario,
               config: MechanismConfig) -> float:
    """Largest |log probability ratio| between the two joint selection laws."""
    original = dpam_distribution(scenario, config).log_probabilities()
    changed = dpam_distribution(neighbor, config).log_probabilities()
    return float(np.abs(original - changed).max())


def sequential_dp_log_gaps(scenario: Scenario, neighbor: Scenario,
                           config: MechanismConfig) -> list[float]:
    """Per-level |log ratio| gaps along the original run's realized prefix.

    Each level's law is conditional on the prices already chosen, so both
    inputs are compared under the same prefix: the one the seeded sequential
    run selects on the original scenario.
    """
    sequential_config = dataclasses.replace(config, variant="dpam_s") \
        if config.variant not in ("dpam_s", "dtam_s") else config
    outcome, _ = dpam_s_run(scenario, sequential_config)
    gaps = []
    for level in range(scenario.k):
        prefix = outcome.price[:level]
        original = sequential_level_distribution(
            scenario, sequential_config, prefix).log_probabilities()
        changed = sequential_level_distribution(
            neighbor, sequential_config, prefix).log_probabilities()
        gaps.append(float(np.abs(original - changed).max()))
    return gaps


def _neighbors(scenario: Scenario, count: int,
               rng: np.random.Generator) -> list[tuple[str, Scenario]]:
    """Neighboring inputs: half rebid one buyer, half redraw one seller's asks."""
    bounds = scenario.bounds
    out = []
    for t in range(count):
        if t % 2 == 0 and scenario.m > 0 or scenario.n == 0:
            i = int(rng.integers(scenario.m))
            bid = float(rng.uniform(bounds.v_min, bounds.v_max))
            out.append((f"buyer {i} bid -> {bid:.6g}",
                        replace_buyer_bid(scenario, i, bid)))
        else:
            j = int(rng.integers(scenario.n))
            ask = tuple(float(a) for a in
                        rng.uniform(bounds.c_min, bounds.c_max, scenario.k))
            out.append((f"seller {j} asks redrawn",
                        replace_seller_ask(scenario, j, ask)))
    return out


def audit_dp(scenario: Scenario, config: MechanismConfig, num_neighbors: int,
             seed: int) -> AuditReport:
    """Exact differential-privacy audit against randomized neighbors.

    For the joint mechanism the log-probability gap must stay within the
    budget; for the sequential one each level must stay within budget / k
    and the levels must compose within the full budget.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    sequential = config.variant in ("dpam_s", "dtam_s")
    max_violation = 0.0
    worst = None
    tested = 0
    for description, neighbor in _neighbors(scenario, num_neighbors, rng):
        tested += 1
        if sequential:
            gaps = sequential_dp_log_gaps(scenario, neighbor, config)
            per_level = max(g - config.epsilon / scenario.k for g in gaps)
            composed = sum(gaps) - config.epsilon
            violation = max(per_level - DP_TOLERANCE,
                            composed - scenario.k * DP_TOLERANCE)
        else:
            gap = dp_log_gap(scenario, neighbor, config)
            violation = gap - config.epsilon - DP_TOLERANCE
        if violation > max_violation:
            max_violation = violation
            worst = {"neighbor": description}
    return AuditReport("differential-privacy", tested,
                       max(0.0, max_violation), DP_TOLERANCE,
                       max_violation <= 0.0, worst)


@dataclass(frozen=True)
class DeviationPlan:
    """Which unilateral misreports the truthfulness audits try."""

    bid_points: int = 9
    ask_shifts: tuple[float, ...] = (0.05, 0.1, 0.2)

    def bid_ladder(self, scenario: Scenario) -> np.ndarray:
        bounds = scenario.bounds
        return np.linspace(bounds.v_min, bounds.v_max, self.bid_points)

    def shifted_asks(self, scenario: Scenario,
                     seller_index: int) -> list[tuple[float, ...]]:
        """All-components-up and all-components-down shifts, clamped to the
        price interval. Mixed-direction deviations are out of scope here."""
        bounds = scenario.bounds
        cost = scenario.sellers[seller_index].cost
        shifted = []
        for delta in self.ask_shifts:
            for sign in (1.0, -1.0):
                shifted.append(tuple(
                    min(max(c + sign * delta, bounds.c_min), bounds.c_max)
                    for c in cost))
        return shifted


def audit_truthfulness_fixed_price(scenario: Scenario,
                                   price: Sequence[float],
                                   plan: DeviationPlan = DeviationPlan()
                                   ) -> AuditReport:
    """At a fixed clearing price, no unilateral misreport may help.

    Buyers deviate through their bid, sellers through componentwise-monotone
    ask shifts; utilities always use the private valuation or cost.
    """
    price = tuple(price)
    max_gain = 0.0
    worst = None
    tested = 0
    truthful = alloc.score_price(scenario, price)
    for i in range(scenario.m):
        base = buyer_utility(scenario, i, truthful.allocation, price)
        for bid in plan.bid_ladder(scenario):
            tested += 1
            deviated = replace_buyer_bid(scenario, i, float(bid))
            outcome = alloc.score_price(deviated, price)
            gain = buyer_utility(deviated, i, outcome.allocation, price) - base
            if gain > max_gain:
                max_gain = gain
                worst = {"player": f"buyer {i}", "bid": float(bid),
                         "price": price}
    for j in range(scenario.n):
        base = seller_utility(scenario, j, truthful.allocation, price)
        for ask in plan.shifted_asks(scenario, j):
            tested += 1
            deviated = replace_seller_ask(scenario, j, ask)
            outcome = alloc.score_price(deviated, price)
            gain = seller_utility(deviated, j, outcome.allocation, price) - base
            if gain > max_gain:
                max_gain = gain
                worst = {"player": f"seller {j}", "ask": ask, "price": price}
    return AuditReport("fixed-price-truthfulness", tested, max_gain,
                       GAIN_EPSILON, max_gain <= GAIN_EPSILON, worst)


def truthfulness_gain_bound(scenario: Scenario, epsilon: float) -> float:
    """Largest expected-utility gain any misreport is allowed."""
    bounds = scenario.bounds
    return max(epsilon * bounds.v_max,
               epsilon * (bounds.c_max - bounds.c_min) * scenario.k
               * bounds.h_max)


def _expected_buyer_utility(scenario: Scenario, config: MechanismConfig,
                            buyer_index: int, valuation: float) -> float:
    """Exact E[utility] of one buyer under the joint selection law.

    The scenario carries the (possibly deviating) report; the utility is
    evaluated with the true valuation passed in.
    """
    distribution = dpam_distribution(scenario, config)
    probabilities = distribution.probabilities
    total = 0.0
    for t in range(len(probabilities)):
        price = tuple(float(p) for p in distribution.support[t])
        scored = alloc.score_price(scenario, price)
        if scored.allocation.assignment[buyer_index] is not None:
            payment = 0.0
            for z in range(scenario.k):
                payment += price[z] * scenario.buyers[buyer_index].demand[z]
            total += float(probabilities[t]) * (valuation - payment)
    return total


def _expected_seller_utility(scenario: Scenario, config: MechanismConfig,
                             seller_index: int) -> float:
    distribution = dpam_distribution(scenario, config)
    probabilities = distribution.probabilities
    total = 0.0
    for t in range(len(probabilities)):
        price = tuple(float(p) for p in distribution.support[t])
        scored = alloc.score_price(scenario, price)
        total += float(probabilities[t]) * seller_utility(
            scenario, seller_index, scored.allocation, price)
    return total


def audit_truthfulness_expected(scenario: Scenario, config: MechanismConfig,
                                plan: DeviationPlan = DeviationPlan()
                                ) -> AuditReport:
    """Expected-utility gains from misreports stay within the allowed slack.

    Both expectations are exact: the truthful and the deviating input each
    induce their own selection law, fully enumerated.
    """
    bound = truthfulness_gain_bound(scenario, config.epsilon)
    max_excess = 0.0
    worst = None
    tested = 0
    for i in range(scenario.m):
        truthful = _expected_buyer_utility(
            scenario, config, i, scenario.buyers[i].valuation)
        for bid in plan.bid_ladder(scenario):
            tested += 1
            deviated = replace_buyer_bid(scenario, i, float(bid))
            gain = _expected_buyer_utility(
                deviated, config, i, scenario.buyers[i].valuation) - truthful
            excess = gain - bound
            if excess > max_excess:
                max_excess = excess
                worst = {"player": f"buyer {i}", "bid": float(bid)}
    for j in range(scenario.n):
        truthful = _expected_seller_utility(scenario, config, j)
        for ask in plan.shifted_asks(scenario, j):
            tested += 1
            deviated = replace_seller_ask(scenario, j, ask)
            gain = _expected_seller_utility(deviated, config, j) - truthful
            excess = gain - bound
            if excess > max_excess:
                max_excess = excess
                worst = {"player": f"seller {j}", "ask": ask}
    return AuditReport("expected-truthfulness", tested, max_excess,
                       UTILITY_TOLERANCE, max_excess <= UTILITY_TOLERANCE,
                       worst)


def audit_ir_budget(scenarios: Sequence[Scenario],
                    config: MechanismConfig) -> AuditReport:
    """Truthful runs of every variant must leave no one worse off.

    Checks all player utilities and the platform revenue against zero (up to
    float tolerance) and that every emitted allocation is feasible.
    """
    max_violation = 0.0
    worst = None
    tested = 0
    for index, scenario in enumerate(scenarios):
        for variant in ("dpam", "dtam", "dpam_s", "dtam_s"):
            tested += 1
            run_config = dataclasses.replace(config, variant=variant)
            outcome = run_mechanism(scenario, run_config)
            lows = [outcome.revenue, *outcome.buyer_utilities,
                    *outcome.seller_utilities]
            violation = max(0.0, -min(lows))
            if validate_allocation(scenario, outcome.allocation):
                violation = max(violation, 1.0)
            if violation > max_violation:
                max_violation = violation
                worst = {"scenario": index, "variant": variant}
    return AuditReport("individual-rationality-and-budget", tested,
                       max_violation, UTILITY_TOLERANCE,
                       max_violation <= UTILITY_TOLERANCE, worst)
