from pathlib import Path

import pytest

from edgeauction import Bounds, Buyer, PriceGrid, Scenario, Seller
from edgeauction.scenario import GeneratorParams, generate, mix_seed

DATA_DIR = Path(__file__).parent / "data"


def make_toy_scenario() -> Scenario:
    """Two buyers, one seller, one resource type.

    Unit prices live on the {0, 0.5, 1} grid; only the first buyer can trade
    profitably, and only at the middle price, so the scored revenues are
    [0, 0.2, 0].  Used as the hand-checkable instance across the suite.
    """
    bounds = Bounds(c_min=0.0, c_max=1.0, v_min=0.0, v_max=2.0,
                    d_min=1.0, d_max=5.0, h_min=4.0, h_max=4.0)
    buyers = (Buyer(0, (2.0,), bid=1.5, valuation=1.5, max_distance=10.0),
              Buyer(1, (3.0,), bid=0.9, valuation=0.9, max_distance=10.0))
    sellers = (Seller(0, (4.0,), ask=(0.4,), cost=(0.4,)),)
    return Scenario(k=1, buyers=buyers, sellers=sellers,
                    distances=((1.0,), (1.0,)), bounds=bounds)


@pytest.fixture
def toy_scenario() -> Scenario:
    return make_toy_scenario()


@pytest.fixture
def toy_grid() -> PriceGrid:
    return PriceGrid(0.0, 1.0, 0.5)


def small_params(seed: int, base_seed: int = 0, **overrides) -> GeneratorParams:
    """Desk-scale generator parameters, sizes varied by the seed."""
    settings = dict(m=3 + seed % 4, n=1 + seed % 3, k=1 + seed % 2,
                    seed=mix_seed(base_seed, seed))
    settings.update(overrides)
    return GeneratorParams(**settings)


def small_scenario(seed: int, **overrides) -> Scenario:
    return generate(small_params(seed, **overrides))
