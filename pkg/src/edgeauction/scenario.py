"""Randomized scenario generation and scenario (de)serialization.

Generation places buyers and sellers uniformly in a square region, draws
demands, supplies, asks, and distance limits uniformly from configured
ranges, and sets each bid to the mid unit price times the bundle size times
uniform noise.  Valuations default to bids and costs to asks (a truthful
world); auditors perturb from there.

All randomness comes from a PCG64 generator seeded with the 64-bit params
seed, and fields are drawn in a fixed documented order, so the same seed
reproduces the same scenario byte for byte.

Scenario files are versioned JSON documents.  Floats are written with
Python's shortest round-trip repr, which parses back to the identical
double, so load(save(s)) reproduces s exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .model import Bounds, Buyer, Scenario, Seller

FORMAT_NAME = "edge-auction-scenario"
FORMAT_VERSION = 1


class ScenarioParseError(ValueError):
    """A scenario file that cannot be understood."""


class ScenarioVersionError(ScenarioParseError):
    """A scenario file written by an incompatible format version."""


@dataclass(frozen=True)
class GeneratorParams:
    """Ranges and sizes for randomized scenario generation."""

    m: int
    n: int
    k: int
    region_side: float = 1000.0
    demand_range: tuple[float, float] = (1.0, 5.0)
    supply_range: tuple[float, float] = (10.0, 20.0)
    cost_range: tuple[float, float] = (0.0, 1.0)
    max_distance_range: tuple[float, float] = (200.0 * math.sqrt(2.0),
                                               1000.0 * math.sqrt(2.0))
    bid_noise: tuple[float, float] = (0.7, 1.3)
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n, self.k) < 1:
            raise ValueError("m, n, and k must all be >= 1")
        for name in ("demand_range", "supply_range", "cost_range",
                     "max_distance_range", "bid_noise"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"{name} is empty")


def implied_valuation_bounds(params: GeneratorParams) -> tuple[float, float]:
    """Analytic range of generated bids, recorded as the valuation bounds.

    Bids are mid-price times bundle size times noise, so the extremes follow
    from the demand range and noise interval.
    """
    mid = (params.cost_range[0] + params.cost_range[1]) / 2.0
    low = mid * params.k * params.demand_range[0] * params.bid_noise[0]
    high = mid * params.k * params.demand_range[1] * params.bid_noise[1]
    return low, high


def generate(params: GeneratorParams) -> Scenario:
    """Draw one scenario; identical params (including seed) give identical
    scenarios."""
    rng = np.random.Generator(np.random.PCG64(params.seed))
    m, n, k = params.m, params.n, params.k
    buyer_pos = rng.uniform(0.0, params.region_side, (m, 2))
    seller_pos = rng.uniform(0.0, params.region_side, (n, 2))
    demands = rng.uniform(*params.demand_range, (m, k))
    max_distances = rng.uniform(*params.max_distance_range, m)
    noise = rng.uniform(*params.bid_noise, m)
    supplies = rng.uniform(*params.supply_range, (n, k))
    asks = rng.uniform(*params.cost_range, (n, k))

    mid = (params.cost_range[0] + params.cost_range[1]) / 2.0
    bids = mid * demands.sum(axis=1) * noise
    dx = buyer_pos[:, 0][:, None] - seller_pos[:, 0][None, :]
    dy = buyer_pos[:, 1][:, None] - seller_pos[:, 1][None, :]
    distances = np.sqrt(dx * dx + dy * dy)

    v_min, v_max = implied_valuation_bounds(params)
    bounds = Bounds(c_min=params.cost_range[0], c_max=params.cost_range[1],
                    v_min=v_min, v_max=v_max,
                    d_min=params.demand_range[0], d_max=params.demand_range[1],
                    h_min=params.supply_range[0], h_max=params.supply_range[1])
    buyers = tuple(
        Buyer(id=i, demand=tuple(demands[i].tolist()), bid=float(bids[i]),
              valuation=float(bids[i]), max_distance=float(max_distances[i]),
              position=(float(buyer_pos[i, 0]), float(buyer_pos[i, 1])))
        for i in range(m))
    sellers = tuple(
        Seller(id=j, supply=tuple(supplies[j].tolist()),
               ask=tuple(asks[j].tolist()), cost=tuple(asks[j].tolist()),
               position=(float(seller_pos[j, 0]), float(seller_pos[j, 1])))
        for j in range(n))
    return Scenario(k=k, buyers=buyers, sellers=sellers,
                    distances=tuple(tuple(row.tolist()) for row in distances),
                    bounds=bounds)


def mix_seed(base: int, *indices: int) -> int:
    """Derive an independent 64-bit seed from a base seed and indices.

    Uses numpy's SeedSequence entropy mixing, so any single trial of a sweep
    can be regenerated in isolation from (base, trial, stream).
    """
    state = np.random.SeedSequence((base,) + indices).generate_state(1, np.uint64)
    return int(state[0])


def _scenario_to_document(scenario: Scenario) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "k": scenario.k,
        "bounds": vars(scenario.bounds).copy(),
        "buyers": [{
            "id": b.id, "demand": list(b.demand), "bid": b.bid,
            "valuation": b.valuation, "max_distance": b.max_distance,
            "position": list(b.position) if b.position else None,
        } for b in scenario.buyers],
        "sellers": [{
            "id": s.id, "supply": list(s.supply), "ask": list(s.ask),
            "cost": list(s.cost),
            "position": list(s.position) if s.position else None,
        } for s in scenario.sellers],
        "distances": [list(row) for row in scenario.distances],
    }


def save(scenario: Scenario, path: Union[str, Path]) -> None:
    """Write the scenario as a versioned JSON document."""
    document = _scenario_to_document(scenario)
    Path(path).write_text(json.dumps(document, indent=1) + "\n")


def _require(document: dict, field: str):
    if field not in document:
        raise ScenarioParseError(f"scenario document is missing field {field!r}")
    return document[field]


def load(path: Union[str, Path]) -> Scenario:
    """Read a scenario document, with explicit format and version checks."""
    text = Path(path).read_text()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioParseError(
            f"{path}: invalid JSON at line {error.lineno}, column "
            f"{error.colno}: {error.msg}") from error
    if not isinstance(document, dict):
        raise ScenarioParseError(f"{path}: top level is not an object")
    if document.get("format") != FORMAT_NAME:
        raise ScenarioParseError(
            f"{path}: not a {FORMAT_NAME} document")
    version = document.get("version")
    if version != FORMAT_VERSION:
        raise ScenarioVersionError(
            f"{path}: format version {version!r} unsupported "
            f"(expected {FORMAT_VERSION})")
    try:
        bounds = Bounds(**_require(document, "bounds"))
        buyers = tuple(
            Buyer(id=entry["id"], demand=tuple(entry["demand"]),
                  bid=entry["bid"], valuation=entry["valuation"],
                  max_distance=entry["max_distance"],
                  position=tuple(entry["position"]) if entry.get("position")
                  else None)
            for entry in _require(document, "buyers"))
        sellers = tuple(
            Seller(id=entry["id"], supply=tuple(entry["supply"]),
                   ask=tuple(entry["ask"]), cost=tuple(entry["cost"]),
                   position=tuple(entry["position"]) if entry.get("position")
                   else None)
            for entry in _require(document, "sellers"))
        distances = tuple(tuple(row) for row in _require(document, "distances"))
        return Scenario(k=_require(document, "k"), buyers=buyers,
                        sellers=sellers, distances=distances, bounds=bounds)
    except (KeyError, TypeError) as error:
        raise ScenarioParseError(f"{path}: malformed field: {error}") from error
