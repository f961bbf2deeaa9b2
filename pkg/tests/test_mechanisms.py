import dataclasses
import math

import numpy as np
import pytest

from edgeauction import (MechanismConfig, PriceGrid, dpam_distribution,
                         dpam_run, dpam_s_run, expected_revenue,
                         partial_score_sensitivity, run_mechanism,
                         score_sensitivity, sequential_expected_revenue)
from edgeauction.errors import CapacityError
from edgeauction.mechanisms import sequential_level_distribution
from edgeauction.model import Bounds, Buyer, Scenario, Seller

from conftest import make_toy_scenario, small_scenario

TOY_MID_PROBABILITY = math.exp(0.1) / (2.0 + math.exp(0.1))


def toy_config(**overrides):
    settings = dict(epsilon=4.0, grid=PriceGrid(0.0, 1.0, 0.5), seed=11)
    settings.update(overrides)
    return MechanismConfig(**settings)


def test_config_validation(toy_grid):
    with pytest.raises(ValueError):
        MechanismConfig(epsilon=0.0, grid=toy_grid)
    with pytest.raises(ValueError):
        MechanismConfig(epsilon=1.0, grid=toy_grid, variant="vcg")


def test_sensitivity_toy(toy_scenario):
    assert score_sensitivity(toy_scenario) == pytest.approx(4.0)


def test_sensitivity_no_sellers(toy_scenario):
    empty = dataclasses.replace(toy_scenario, sellers=(),
                                distances=((), ()))
    assert score_sensitivity(empty) == 0.0


def test_sensitivity_scales_with_market():
    bounds = Bounds(c_min=0.0, c_max=1.0, v_min=0.0, v_max=10.0,
                    d_min=1.0, d_max=5.0, h_min=20.0, h_max=20.0)
    sellers = tuple(Seller(j, (20.0,) * 3, (0.5,) * 3, (0.5,) * 3)
                    for j in range(50))
    buyers = (Buyer(0, (1.0,) * 3, 1.0, 1.0, 10.0),)
    scenario = Scenario(k=3, buyers=buyers, sellers=sellers,
                        distances=((1.0,) * 50,), bounds=bounds)
    assert score_sensitivity(scenario) == pytest.approx(3000.0)


def test_partial_sensitivity():
    toy = make_toy_scenario()
    wide = dataclasses.replace(
        toy, k=2,
        buyers=tuple(dataclasses.replace(b, demand=b.demand + (1.0,))
                     for b in toy.buyers),
        sellers=(dataclasses.replace(toy.sellers[0], supply=(4.0, 6.0),
                                     ask=(0.4, 0.4), cost=(0.4, 0.4)),),
        bounds=dataclasses.replace(toy.bounds, h_max=6.0))
    assert partial_score_sensitivity(wide, 1) == pytest.approx(4.0)
    assert partial_score_sensitivity(wide, 2) == pytest.approx(10.0)
    assert partial_score_sensitivity(wide, 2) == score_sensitivity(wide)
    with pytest.raises(ValueError):
        partial_score_sensitivity(wide, 3)


def test_toy_distribution_matches_hand_computation(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config())
    assert distribution.revenues == pytest.approx([0.0, 0.2, 0.0])
    side = (1.0 - TOY_MID_PROBABILITY) / 2.0
    assert distribution.probabilities == pytest.approx(
        [side, TOY_MID_PROBABILITY, side], rel=1e-12)
    assert distribution.probabilities.sum() == pytest.approx(1.0, abs=1e-9)


def test_single_point_grid_is_certain(toy_scenario):
    config = toy_config(grid=PriceGrid(0.5, 0.5, 0.1))
    distribution = dpam_distribution(toy_scenario, config)
    assert distribution.probabilities == pytest.approx([1.0])


def test_tiny_budget_approaches_uniform(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config(epsilon=1e-12))
    assert distribution.probabilities == pytest.approx([1 / 3] * 3, abs=1e-12)


def test_grid_capacity_cap(toy_scenario):
    config = toy_config(max_scored_vectors=2)
    with pytest.raises(CapacityError):
        dpam_distribution(toy_scenario, config)


def test_dtam_picks_the_optimal_price(toy_scenario):
    outcome = dpam_run(toy_scenario, toy_config(variant="dtam"))
    assert outcome.price == (0.5,)
    assert outcome.revenue == pytest.approx(0.2)
    assert outcome.allocation.assignment == (0, None)
    assert outcome.buyer_utilities == pytest.approx((0.5, 0.0))
    assert outcome.seller_utilities == pytest.approx((0.2,))


def test_huge_budget_concentrates_on_the_optimum(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config(epsilon=1e6))
    assert distribution.probabilities[1] >= 0.999
    assert np.isfinite(distribution.probabilities).all()


def test_dtam_tie_breaks_to_lexicographically_smallest():
    scenario = small_scenario(0)
    # all asks at the top of the price range: every score is zero
    sellers = tuple(dataclasses.replace(s, ask=(1.0,) * scenario.k)
                    for s in scenario.sellers)
    flat = dataclasses.replace(scenario, sellers=sellers)
    outcome = dpam_run(flat, toy_config(variant="dtam"))
    assert outcome.price == (0.0,) * flat.k
    assert outcome.revenue == 0.0


def test_run_mechanism_dispatch(toy_scenario):
    for variant in ("dpam", "dtam", "dpam_s", "dtam_s"):
        outcome = run_mechanism(toy_scenario, toy_config(variant=variant))
        assert len(outcome.price) == toy_scenario.k
    with pytest.raises(ValueError):
        dpam_run(toy_scenario, toy_config(variant="dpam_s"))
    with pytest.raises(ValueError):
        dpam_s_run(toy_scenario, toy_config(variant="dpam"))


def test_runs_are_seed_reproducible(toy_scenario):
    config = toy_config(variant="dpam", epsilon=0.5)
    assert dpam_run(toy_scenario, config) == dpam_run(toy_scenario, config)
    sequential = toy_config(variant="dpam_s", epsilon=0.5)
    first, _ = dpam_s_run(toy_scenario, sequential)
    second, _ = dpam_s_run(toy_scenario, sequential)
    assert first == second


def test_sequential_equals_joint_for_single_resource(toy_scenario):
    joint = dpam_distribution(toy_scenario, toy_config())
    _, levels = dpam_s_run(toy_scenario, toy_config(variant="dpam_s"))
    assert len(levels) == 1
    np.testing.assert_allclose(levels[0].probabilities, joint.probabilities,
                               rtol=1e-12)
    for seed in range(3):
        scenario = small_scenario(seed, k=1)
        joint = dpam_distribution(scenario, toy_config())
        _, levels = dpam_s_run(scenario, toy_config(variant="dpam_s"))
        np.testing.assert_allclose(levels[0].probabilities,
                                   joint.probabilities, rtol=1e-12)


def test_sequential_toy_argmax(toy_scenario):
    outcome, _ = dpam_s_run(toy_scenario, toy_config(variant="dtam_s"))
    assert outcome.price == (0.5,)
    assert outcome.revenue == pytest.approx(0.2)


def test_sequential_scores_levels_times_grid_not_the_product():
    scenario = small_scenario(1, k=2)
    config = toy_config(variant="dpam_s")
    joint = dpam_distribution(scenario, toy_config())
    _, levels = dpam_s_run(scenario, config)
    grid_size = config.grid.levels
    assert len(joint.probabilities) == grid_size ** 2
    assert sum(len(level.probabilities) for level in levels) == 2 * grid_size


def test_sequential_level_budget_is_split():
    scenario = small_scenario(3, k=2)
    config = toy_config(variant="dpam_s", epsilon=4.0)
    level = sequential_level_distribution(scenario, config, ())
    manual = (4.0 / 2) * level.revenues / (
        2 * partial_score_sensitivity(scenario, 1))
    np.testing.assert_allclose(level.log_weights, manual, rtol=1e-12)


def test_expected_revenue_toy(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config())
    value = expected_revenue(distribution, distribution.revenues)
    assert value == pytest.approx(0.2 * TOY_MID_PROBABILITY, rel=1e-9)


def test_expected_revenue_point_mass(toy_scenario):
    config = toy_config(grid=PriceGrid(0.5, 0.5, 0.1))
    distribution = dpam_distribution(toy_scenario, config)
    assert expected_revenue(distribution, distribution.revenues) == \
        pytest.approx(0.2)


def test_expected_revenue_uniform(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config(epsilon=1e-12))
    assert expected_revenue(distribution, distribution.revenues) == \
        pytest.approx(0.2 / 3, rel=1e-6)


def test_expected_revenue_support_mismatch(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config())
    with pytest.raises(ValueError):
        expected_revenue(distribution, distribution.revenues[:2])


def test_sequential_expected_revenue_matches_single_level(toy_scenario):
    config = toy_config(variant="dpam_s")
    exact = sequential_expected_revenue(toy_scenario, config)
    assert exact == pytest.approx(0.2 * TOY_MID_PROBABILITY, rel=1e-9)


def test_exact_privacy_ratio_bound():
    # neighboring inputs differ in one bid or one full ask vector; the exact
    # selection laws must stay within exp(epsilon) of each other pointwise
    for seed in range(6):
        scenario = small_scenario(seed)
        rng = np.random.default_rng(seed + 100)
        buyers = list(scenario.buyers)
        i = int(rng.integers(scenario.m))
        buyers[i] = dataclasses.replace(
            buyers[i], bid=float(rng.uniform(0.0, scenario.bounds.v_max)))
        bid_neighbor = dataclasses.replace(scenario, buyers=tuple(buyers))
        sellers = list(scenario.sellers)
        j = int(rng.integers(scenario.n))
        sellers[j] = dataclasses.replace(
            sellers[j], ask=tuple(rng.uniform(0.0, 1.0, scenario.k)))
        ask_neighbor = dataclasses.replace(scenario, sellers=tuple(sellers))
        for epsilon in (0.1, 1.0, 4.0):
            config = toy_config(epsilon=epsilon)
            base = dpam_distribution(scenario, config).log_probabilities()
            for neighbor in (bid_neighbor, ask_neighbor):
                other = dpam_distribution(neighbor, config).log_probabilities()
                assert np.abs(base - other).max() <= epsilon + 1e-6


def test_sequential_privacy_composes_across_levels():
    for seed in range(4):
        scenario = small_scenario(seed, k=2)
        buyers = list(scenario.buyers)
        buyers[0] = dataclasses.replace(buyers[0], bid=scenario.bounds.v_max)
        neighbor = dataclasses.replace(scenario, buyers=tuple(buyers))
        epsilon = 2.0
        config = toy_config(epsilon=epsilon, variant="dpam_s")
        outcome, _ = dpam_s_run(scenario, config)
        total = 0.0
        for level in range(scenario.k):
            prefix = outcome.price[:level]
            base = sequential_level_distribution(
                scenario, config, prefix).log_probabilities()
            other = sequential_level_distribution(
                neighbor, config, prefix).log_probabilities()
            gap = float(np.abs(base - other).max())
            assert gap <= epsilon / scenario.k + 1e-6
            total += gap
        assert total <= epsilon + scenario.k * 1e-6


def test_expected_revenue_monotone_in_budget():
    for seed in range(5):
        scenario = small_scenario(seed)
        previous = -np.inf
        for epsilon in (1.0, 10.0, 50.0, 100.0, 200.0):
            distribution = dpam_distribution(scenario, toy_config(epsilon=epsilon))
            value = expected_revenue(distribution, distribution.revenues)
            assert value >= previous - 1e-12
            previous = value


def test_deterministic_variant_dominates_private_expectation():
    for seed in range(5):
        scenario = small_scenario(seed)
        distribution = dpam_distribution(scenario, toy_config(epsilon=4.0))
        best = float(distribution.revenues.max())
        outcome = dpam_run(scenario, toy_config(variant="dtam"))
        assert outcome.revenue == pytest.approx(best, abs=1e-12)
        assert best + 1e-12 >= expected_revenue(distribution,
                                                distribution.revenues)


def test_sampling_frequencies_match_exact_probabilities(toy_scenario):
    distribution = dpam_distribution(toy_scenario, toy_config())
    rng = np.random.Generator(np.random.PCG64(123))
    draws = 100_000
    indices = distribution.sample_indices(rng, draws)
    for t, probability in enumerate(distribution.probabilities):
        frequency = float((indices == t).sum()) / draws
        band = 3.0 * math.sqrt(probability * (1 - probability) / draws)
        assert abs(frequency - probability) <= band


def test_truthful_outcomes_are_individually_rational_and_budget_balanced():
    for seed in range(25):
        scenario = small_scenario(seed)
        for variant in ("dpam", "dtam", "dpam_s", "dtam_s"):
            outcome = run_mechanism(scenario,
                                    toy_config(variant=variant, epsilon=2.0))
            assert outcome.revenue >= -1e-9
            assert min(outcome.buyer_utilities, default=0.0) >= -1e-9
            assert min(outcome.seller_utilities, default=0.0) >= -1e-9
