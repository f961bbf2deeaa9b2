"""Winning-candidate determination and greedy assignment.

These two stages are shared by all four mechanisms.  Given a price vector
(or a prefix of one, in sequential mode) they deterministically produce an
allocation and its revenue score:

1. keep buyers whose payment at the price does not exceed their effective
   bid, sorted by descending total demand (ties by ascending buyer id);
2. walk that order and hand each buyer to the nearest seller that still has
   enough supply, is within the buyer's distance limit, and would not lose
   money on the trade (ties by ascending seller id).

This module is the plain-Python reference path; ``_kernels`` holds a
compiled twin used for bulk grid scoring, kept bit-for-bit identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import Allocation, Scenario, revenue_upto


@dataclass(frozen=True)
class ScoredPrice:
    """A price prefix with the allocation and revenue it induces."""

    price: tuple[float, ...]
    allocation: Allocation
    revenue: float


def winning_buyer_candidates(scenario: Scenario, price_prefix: Sequence[float],
                             effective_bids: Optional[Sequence[float]] = None
                             ) -> list[int]:
    """Buyers able to pay, ordered by descending total demand then id.

    The payment filter uses only the first ``len(price_prefix)`` resource
    types, but the sort key is always the full-bundle demand.  In sequential
    mode the caller passes per-level effective bids (average unit bid times
    prefix demand); otherwise the plain bids apply.
    """
    depth = len(price_prefix)
    if not 1 <= depth <= scenario.k:
        raise ValueError(f"price prefix length {depth} outside 1..{scenario.k}")
    if effective_bids is None:
        effective_bids = [b.bid for b in scenario.buyers]
    selected = []
    for buyer in scenario.buyers:
        payment = 0.0
        for z in range(depth):
            payment += price_prefix[z] * buyer.demand[z]
        if payment <= effective_bids[buyer.id]:
            selected.append(buyer.id)
    selected.sort(key=lambda i: (-scenario.buyers[i].total_demand(), i))
    return selected


def assign(scenario: Scenario, price_prefix: Sequence[float],
           candidate_buyers: Sequence[int]) -> Allocation:
    """Greedy nearest-seller matching over the sorted candidate list.

    A seller is eligible for a buyer when its remaining supply covers the
    buyer's demand on every priced resource, the pair is within the buyer's
    distance limit, and the margin over its ask is nonnegative (zero-margin
    trades are made).  Supply bookkeeping is local to this call.
    """
    depth = len(price_prefix)
    remaining = [list(s.supply[:depth]) for s in scenario.sellers]
    assignment: list[Optional[int]] = [None] * scenario.m
    for i in candidate_buyers:
        buyer = scenario.buyers[i]
        best = -1
        best_distance = float("inf")
        for j in range(scenario.n):
            if scenario.distances[i][j] > buyer.max_distance:
                continue
            supply_ok = True
            for z in range(depth):
                if remaining[j][z] < buyer.demand[z]:
                    supply_ok = False
                    break
            if not supply_ok:
                continue
            ask = scenario.sellers[j].ask
            profit = 0.0
            for z in range(depth):
                profit += (price_prefix[z] - ask[z]) * buyer.demand[z]
            if profit >= 0.0 and scenario.distances[i][j] < best_distance:
                best = j
                best_distance = scenario.distances[i][j]
        if best >= 0:
            assignment[i] = best
            for z in range(depth):
                remaining[best][z] -= buyer.demand[z]
    return Allocation(tuple(assignment))


def sequential_effective_bids(scenario: Scenario, depth: int) -> list[float]:
    """Average unit bid times prefix demand, the per-level payment cap."""
    bids = []
    for buyer in scenario.buyers:
        total = sum(buyer.demand)
        if total == 0:
            raise ValueError(f"buyer {buyer.id} has zero total demand; "
                             "average unit bid undefined")
        prefix = sum(buyer.demand[:depth])
        bids.append((buyer.bid / total) * prefix)
    return bids


def score_price(scenario: Scenario, price_prefix: Sequence[float],
                sequential: bool = False) -> ScoredPrice:
    """Run both stages and score the result.

    In full mode the prefix must cover all k resources and plain bids gate
    the candidates.  In sequential mode any prefix length in 1..k is allowed
    and the per-level effective bids apply.  Deterministic in both modes.
    """
    depth = len(price_prefix)
    if not sequential and depth != scenario.k:
        raise ValueError("full mode requires a complete price vector")
    effective = sequential_effective_bids(scenario, depth) if sequential else None
    candidates = winning_buyer_candidates(scenario, price_prefix, effective)
    allocation = assign(scenario, price_prefix, candidates)
    revenue = revenue_upto(scenario, allocation, price_prefix, depth)
    return ScoredPrice(tuple(price_prefix), allocation, revenue)
