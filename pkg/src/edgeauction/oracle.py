"""Brute-force references for desk-scale instances.

``brute_force_opt`` enumerates every assignment jointly with every grid
price to find the true revenue optimum the greedy pipeline is measured
against.  The module also evaluates the closed-form lower bounds on the
private mechanisms' expected revenue.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import score_price_rows
from .errors import CapacityError
from .grid import PriceGrid, product_matrix
from .mechanisms import MechanismConfig, score_sensitivity
from .model import Scenario

MAX_BUYERS = 6
MAX_SELLERS = 3
MAX_GRID_VECTORS = 10_000


@dataclass(frozen=True)
class OracleResult:
    """Optimum, greedy grid optimum, their ratio factor, and both bounds."""

    opt: float
    opt_star: float
    factor: float
    bound_dpam: float
    bound_dpam_s: float


def brute_force_opt(scenario: Scenario, grid: PriceGrid) -> float:
    """Maximum revenue over all feasible assignments and grid prices.

    An assignment maps each buyer to one seller or to nobody.  Feasibility
    means supply and distance limits hold and every assigned buyer accepts
    the price (payment within its bid).  The empty assignment is always
    feasible, so the optimum is never negative.
    """
    m, n, k = scenario.m, scenario.n, scenario.k
    if m > MAX_BUYERS or n > MAX_SELLERS:
        raise CapacityError(f"instance {m}x{n} beyond brute-force caps "
                            f"{MAX_BUYERS}x{MAX_SELLERS}")
    if grid.product_count(k) > MAX_GRID_VECTORS:
        raise CapacityError("price grid too large for brute force")

    demands = np.array([b.demand for b in scenario.buyers],
                       dtype=np.float64).reshape(m, k)
    bids = np.array([b.bid for b in scenario.buyers])
    supplies = np.array([s.supply for s in scenario.sellers],
                        dtype=np.float64).reshape(n, k)
    asks = np.array([s.ask for s in scenario.sellers],
                    dtype=np.float64).reshape(n, k)
    distances = np.array(scenario.distances, dtype=np.float64).reshape(m, n)
    reach_ok = distances <= np.array([b.max_distance
                                      for b in scenario.buyers])[:, None]

    maps = np.array(list(itertools.product(range(-1, n), repeat=m)),
                    dtype=np.int64)
    assigned = maps >= 0
    # distance feasibility per assignment map
    pair_ok = np.ones(len(maps), dtype=bool)
    for i in range(m):
        bad = assigned[:, i] & ~reach_ok[i, np.maximum(maps[:, i], 0)]
        pair_ok &= ~bad
    # per-seller served units and supply feasibility
    served = np.zeros((len(maps), n, k))
    for j in range(n):
        served[:, j, :] = (maps == j).astype(np.float64) @ demands
    supply_ok = (served <= supplies[None, :, :] + 1e-9).all(axis=(1, 2))
    feasible = pair_ok & supply_ok

    best = 0.0
    for price in product_matrix(grid, k):
        payments = demands @ price
        # tolerance keeps the oracle weakly more permissive than the greedy
        # pipeline, so opt >= opt_star survives float rounding
        accepts = payments <= bids + 1e-9
        valid = feasible & ~(assigned & ~accepts[None, :]).any(axis=1)
        if not valid.any():
            continue
        margin = price[None, :] - asks
        revenue = np.einsum("ajz,jz->a", served[valid], margin)
        best = max(best, float(revenue.max()))
    return best


def grid_revenue_factor(scenario: Scenario, opt_star: float) -> float:
    """Best grid revenue as a fraction of the market's capacity revenue.

    The denominator is the price span times the configured per-resource
    supply cap times sellers times resource types, i.e. the most any market
    within these bounds could ever clear.
    """
    if opt_star == 0.0:
        return 0.0
    bounds = scenario.bounds
    denominator = ((bounds.c_max - bounds.c_min) * scenario.n * scenario.k
                   * bounds.h_max)
    if denominator == 0:
        raise ValueError("capacity revenue bound is zero; factor undefined")
    return opt_star / denominator


def revenue_bound(scenario: Scenario, config: MechanismConfig,
                  opt: float) -> float:
    """Closed-form lower bound on the mechanism's expected revenue.

    Joint-grid variants pay a penalty logarithmic in the full product size;
    sequential variants pay k times the penalty but only see the single-level
    grid size.  With zero sensitivity (an empty market) the penalty term is
    zero by convention.
    """
    sensitivity = score_sensitivity(scenario)
    rows = product_matrix(config.grid, scenario.k)
    revenues = score_price_rows(scenario, rows)
    factor = grid_revenue_factor(scenario, float(revenues.max(initial=0.0)))
    if sensitivity == 0.0:
        return factor * opt
    if config.variant in ("dpam", "dtam"):
        support_size = config.grid.product_count(scenario.k)
        coefficient = 6.0 * sensitivity / config.epsilon
    else:
        support_size = config.grid.levels
        coefficient = 6.0 * scenario.k * sensitivity / config.epsilon
    penalty = coefficient * math.log(
        math.e + config.epsilon * opt * support_size / (2.0 * sensitivity))
    return factor * opt - penalty


def evaluate(scenario: Scenario, grid: PriceGrid, epsilon: float) -> OracleResult:
    """Bundle the optimum, grid optimum, factor, and both variant bounds."""
    opt = brute_force_opt(scenario, grid)
    rows = product_matrix(grid, scenario.k)
    opt_star = float(score_price_rows(scenario, rows).max(initial=0.0))
    factor = grid_revenue_factor(scenario, opt_star)
    joint = MechanismConfig(epsilon=epsilon, grid=grid, variant="dpam")
    sequential = MechanismConfig(epsilon=epsilon, grid=grid, variant="dpam_s")
    return OracleResult(opt, opt_star, factor,
                        revenue_bound(scenario, joint, opt),
                        revenue_bound(scenario, sequential, opt))
