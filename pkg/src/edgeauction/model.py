"""Market model: buyers requesting resource bundles, sellers offering capped
per-type supply, and the utility/revenue formulas shared by every mechanism.

A buyer wants its whole bundle from a single seller, pays the uniform
clearing price per resource unit, and has a private valuation next to its
public bid.  A seller offers per-unit asks publicly and carries a private
per-unit cost vector.  Mechanisms read only public reports (bid, ask);
auditors read the private fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence


@dataclass(frozen=True)
class Bounds:
    """Interval bounds a scenario's players are drawn from / validated against."""

    c_min: float
    c_max: float
    v_min: float
    v_max: float
    d_min: float
    d_max: float
    h_min: float
    h_max: float


@dataclass(frozen=True)
class Buyer:
    """One resource-requesting device.

    ``bid`` is the public total offer for the whole bundle; ``valuation`` is
    private and equals ``bid`` under truthful reporting.
    """

    id: int
    demand: tuple[float, ...]
    bid: float
    valuation: float
    max_distance: float
    position: Optional[tuple[float, float]] = None

    def total_demand(self) -> float:
        return sum(self.demand)


@dataclass(frozen=True)
class Seller:
    """One resource-providing node.

    ``ask`` holds public per-unit minimum selling prices; ``cost`` the private
    per-unit costs (equal to ``ask`` under truthful reporting).
    """

    id: int
    supply: tuple[float, ...]
    ask: tuple[float, ...]
    cost: tuple[float, ...]
    position: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Scenario:
    """One auction round's full input.

    Immutable; all operations on it are pure functions, so scenarios can be
    shared freely across threads.
    """

    k: int
    buyers: tuple[Buyer, ...]
    sellers: tuple[Seller, ...]
    distances: tuple[tuple[float, ...], ...]
    bounds: Bounds

    @property
    def m(self) -> int:
        return len(self.buyers)

    @property
    def n(self) -> int:
        return len(self.sellers)

    def validate(self) -> list[str]:
        """Return human-readable descriptions of every broken invariant."""
        problems: list[str] = []
        b = self.bounds
        if self.k < 1:
            problems.append(f"resource type count must be >= 1, got {self.k}")
        if len(self.distances) != self.m:
            problems.append("distance matrix row count != number of buyers")
        for buyer in self.buyers:
            if len(buyer.demand) != self.k:
                problems.append(f"buyer {buyer.id}: demand length != k")
            if any(d < 0 for d in buyer.demand):
                problems.append(f"buyer {buyer.id}: negative demand entry")
            if not all(b.d_min - 1e-9 <= d <= b.d_max + 1e-9 for d in buyer.demand):
                problems.append(f"buyer {buyer.id}: demand outside [d_min, d_max]")
            if not (b.v_min - 1e-9 <= buyer.bid <= b.v_max + 1e-9):
                problems.append(f"buyer {buyer.id}: bid outside [v_min, v_max]")
            if not (b.v_min - 1e-9 <= buyer.valuation <= b.v_max + 1e-9):
                problems.append(f"buyer {buyer.id}: valuation outside [v_min, v_max]")
            if buyer.max_distance <= 0:
                problems.append(f"buyer {buyer.id}: max_distance must be positive")
        for seller in self.sellers:
            for name, vec in (("supply", seller.supply), ("ask", seller.ask),
                              ("cost", seller.cost)):
                if len(vec) != self.k:
                    problems.append(f"seller {seller.id}: {name} length != k")
            if not all(b.h_min - 1e-9 <= h <= b.h_max + 1e-9 for h in seller.supply):
                problems.append(f"seller {seller.id}: supply outside [h_min, h_max]")
            for name, vec in (("ask", seller.ask), ("cost", seller.cost)):
                if not all(b.c_min - 1e-9 <= a <= b.c_max + 1e-9 for a in vec):
                    problems.append(f"seller {seller.id}: {name} outside [c_min, c_max]")
        for i, row in enumerate(self.distances):
            if len(row) != self.n:
                problems.append(f"distance row {i}: length != number of sellers")
                continue
            for j, d in enumerate(row):
                if d < 0:
                    problems.append(f"distance[{i}][{j}] is negative")
                bi, sj = self.buyers[i], self.sellers[j]
                if bi.position is not None and sj.position is not None:
                    dx = bi.position[0] - sj.position[0]
                    dy = bi.position[1] - sj.position[1]
                    if abs(math.sqrt(dx * dx + dy * dy) - d) > 1e-9:
                        problems.append(
                            f"distance[{i}][{j}] inconsistent with positions")
        return problems


@dataclass(frozen=True)
class Allocation:
    """Sparse buyer-to-seller assignment.

    ``assignment[i]`` is the seller index serving buyer ``i``, or ``None``.
    The one-seller-per-buyer constraint is structural in this encoding.
    """

    assignment: tuple[Optional[int], ...]

    def assigned_pairs(self) -> Iterator[tuple[int, int]]:
        for i, j in enumerate(self.assignment):
            if j is not None:
                yield i, j

    def assigned_count(self) -> int:
        return sum(1 for j in self.assignment if j is not None)


@dataclass(frozen=True)
class AuctionOutcome:
    """Clearing price, allocation, per-player utilities, and platform revenue."""

    price: tuple[float, ...]
    allocation: Allocation
    buyer_utilities: tuple[float, ...]
    seller_utilities: tuple[float, ...]
    revenue: float


@dataclass(frozen=True)
class ConstraintViolation:
    """One broken feasibility constraint, with the amount of the breach."""

    constraint: str
    buyer: Optional[int]
    seller: Optional[int]
    resource: Optional[int]
    slack: float


def buyer_utility(scenario: Scenario, buyer_index: int, allocation: Allocation,
                  price: Sequence[float]) -> float:
    """Valuation minus payment for a served buyer, exactly 0 for a losing one."""
    if not 0 <= buyer_index < scenario.m:
        raise IndexError(f"buyer index {buyer_index} out of range")
    if allocation.assignment[buyer_index] is None:
        return 0.0
    buyer = scenario.buyers[buyer_index]
    payment = 0.0
    for z in range(scenario.k):
        payment += price[z] * buyer.demand[z]
    return buyer.valuation - payment


def seller_utility(scenario: Scenario, seller_index: int, allocation: Allocation,
                   price: Sequence[float]) -> float:
    """Margin over private cost on all units served, exactly 0 when idle."""
    if not 0 <= seller_index < scenario.n:
        raise IndexError(f"seller index {seller_index} out of range")
    served = [0.0] * scenario.k
    busy = False
    for i in range(scenario.m):
        if allocation.assignment[i] == seller_index:
            busy = True
            for z in range(scenario.k):
                served[z] += scenario.buyers[i].demand[z]
    if not busy:
        return 0.0
    seller = scenario.sellers[seller_index]
    utility = 0.0
    for z in range(scenario.k):
        utility += (price[z] - seller.cost[z]) * served[z]
    return utility


def revenue_upto(scenario: Scenario, allocation: Allocation,
                 price: Sequence[float], depth: int) -> float:
    """Platform revenue restricted to the first ``depth`` resource types.

    Margins are taken against public asks.  Served units are accumulated in
    buyer-id order and summed seller-major so that every code path in the
    package (including the compiled scorer) reproduces bit-identical values.
    """
    n, k = scenario.n, depth
    served = [[0.0] * k for _ in range(n)]
    for i in range(scenario.m):
        j = allocation.assignment[i]
        if j is not None:
            for z in range(k):
                served[j][z] += scenario.buyers[i].demand[z]
    revenue = 0.0
    for j in range(n):
        ask = scenario.sellers[j].ask
        for z in range(k):
            revenue += (price[z] - ask[z]) * served[j][z]
    return revenue


def platform_revenue(scenario: Scenario, allocation: Allocation,
                     price: Sequence[float]) -> float:
    """Total margin over asks collected across all sellers at this price."""
    if len(price) != scenario.k:
        raise ValueError("price vector length != k")
    return revenue_upto(scenario, allocation, price, scenario.k)


def validate_allocation(scenario: Scenario,
                        allocation: Allocation) -> list[ConstraintViolation]:
    """Diagnostic feasibility check; empty list means the allocation is valid."""
    violations: list[ConstraintViolation] = []
    if len(allocation.assignment) != scenario.m:
        violations.append(ConstraintViolation(
            "assignment-shape", None, None, None,
            float(abs(len(allocation.assignment) - scenario.m))))
        return violations
    for i, j in allocation.assigned_pairs():
        if not 0 <= j < scenario.n:
            violations.append(ConstraintViolation("seller-index", i, j, None, 0.0))
    if any(v.constraint == "seller-index" for v in violations):
        return violations
    for j in range(scenario.n):
        for z in range(scenario.k):
            used = sum(scenario.buyers[i].demand[z]
                       for i, jj in allocation.assigned_pairs() if jj == j)
            excess = used - scenario.sellers[j].supply[z]
            if excess > 1e-9:
                violations.append(ConstraintViolation("supply", None, j, z, excess))
    for i, j in allocation.assigned_pairs():
        excess = scenario.distances[i][j] - scenario.buyers[i].max_distance
        if excess > 1e-9:
            violations.append(ConstraintViolation("distance", i, j, None, excess))
    return violations
