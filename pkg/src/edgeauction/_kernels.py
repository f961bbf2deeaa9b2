"""Compiled bulk scorer.

`score_rows` is a line-for-line twin of the reference pipeline in
``allocation`` (candidate filter, demand-sorted greedy nearest-seller
assignment, seller-major revenue sum).  Operation order is kept identical
so results match the reference bit for bit; tests assert exact agreement.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .model import Scenario


@njit(cache=True)
def score_rows(prices, demands, order, effective_bids, supplies, asks,
               distances, max_distances):
    # prices: (rows, depth); demands/supplies/asks sliced to the same depth.
    n_rows, depth = prices.shape
    m = demands.shape[0]
    n = supplies.shape[0]
    revenues = np.zeros(n_rows)
    assignment = np.empty(m, np.int64)
    remaining = np.empty((n, depth))
    served = np.empty((n, depth))
    for t in range(n_rows):
        for i in range(m):
            assignment[i] = -1
        for j in range(n):
            for z in range(depth):
                remaining[j, z] = supplies[j, z]
        for oi in range(m):
            i = order[oi]
            payment = 0.0
            for z in range(depth):
                payment += prices[t, z] * demands[i, z]
            if payment <= effective_bids[i]:
                best = -1
                best_distance = np.inf
                for j in range(n):
                    if distances[i, j] > max_distances[i]:
                        continue
                    supply_ok = True
                    for z in range(depth):
                        if remaining[j, z] < demands[i, z]:
                            supply_ok = False
                            break
                    if not supply_ok:
                        continue
                    profit = 0.0
                    for z in range(depth):
                        profit += (prices[t, z] - asks[j, z]) * demands[i, z]
                    if profit >= 0.0 and distances[i, j] < best_distance:
                        best = j
                        best_distance = distances[i, j]
                if best >= 0:
                    assignment[i] = best
                    for z in range(depth):
                        remaining[best, z] -= demands[i, z]
        for j in range(n):
            for z in range(depth):
                served[j, z] = 0.0
        for i in range(m):
            j = assignment[i]
            if j >= 0:
                for z in range(depth):
                    served[j, z] += demands[i, z]
        revenue = 0.0
        for j in range(n):
            for z in range(depth):
                revenue += (prices[t, z] - asks[j, z]) * served[j, z]
        revenues[t] = revenue
    return revenues


class ScenarioArrays:
    """Scenario fields repacked as contiguous arrays for the kernel."""

    def __init__(self, scenario: Scenario):
        self.demands = np.array([b.demand for b in scenario.buyers], dtype=np.float64)
        self.demands = self.demands.reshape(scenario.m, scenario.k)
        self.bids = np.array([b.bid for b in scenario.buyers], dtype=np.float64)
        self.supplies = np.array([s.supply for s in scenario.sellers],
                                 dtype=np.float64).reshape(scenario.n, scenario.k)
        self.asks = np.array([s.ask for s in scenario.sellers],
                             dtype=np.float64).reshape(scenario.n, scenario.k)
        self.distances = np.array(scenario.distances, dtype=np.float64)
        self.distances = self.distances.reshape(scenario.m, scenario.n)
        self.max_distances = np.array([b.max_distance for b in scenario.buyers],
                                      dtype=np.float64)
        totals = self.demands.sum(axis=1)
        # stable argsort of the negated totals: descending demand, ties by id,
        # matching the reference sort key exactly
        self.order = np.argsort(-totals, kind="stable").astype(np.int64)
        self.total_demand = totals
        self.prefix_demand = np.cumsum(self.demands, axis=1)


def score_price_rows(scenario: Scenario, rows: np.ndarray,
                     effective_bids: np.ndarray | None = None,
                     arrays: ScenarioArrays | None = None) -> np.ndarray:
    """Revenue of every price row; depth is taken from the row width."""
    if arrays is None:
        arrays = ScenarioArrays(scenario)
    depth = rows.shape[1]
    if effective_bids is None:
        effective_bids = arrays.bids
    return score_rows(
        np.ascontiguousarray(rows, dtype=np.float64),
        np.ascontiguousarray(arrays.demands[:, :depth]),
        arrays.order,
        np.ascontiguousarray(effective_bids, dtype=np.float64),
        np.ascontiguousarray(arrays.supplies[:, :depth]),
        np.ascontiguousarray(arrays.asks[:, :depth]),
        arrays.distances,
        arrays.max_distances,
    )
