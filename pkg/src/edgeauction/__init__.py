"""Differentially private combinatorial double auction for edge resource
markets, with deterministic baselines, brute-force references, property
auditors, and a seeded experiment harness."""

__version__ = "0.1.0"

from .errors import CapacityError
from .grid import PriceGrid, enumerate_product, grid_points, product_matrix
from .model import (Allocation, AuctionOutcome, Bounds, Buyer,
                    ConstraintViolation, Scenario, Seller, buyer_utility,
                    platform_revenue, seller_utility, validate_allocation)
from .allocation import (ScoredPrice, assign, score_price,
                         winning_buyer_candidates)
from .mechanisms import (MechanismConfig, PriceDistribution, dpam_distribution,
                         dpam_run, dpam_s_run, expected_revenue,
                         partial_score_sensitivity, run_mechanism,
                         score_sensitivity, sequential_expected_revenue,
                         sequential_level_distribution)
from .oracle import (OracleResult, brute_force_opt, grid_revenue_factor,
                     revenue_bound)
from .audit import (AuditReport, DeviationPlan, audit_dp, audit_ir_budget,
                    audit_truthfulness_expected,
                    audit_truthfulness_fixed_price, dp_log_gap,
                    truthfulness_gain_bound)
from .scenario import (GeneratorParams, ScenarioParseError,
                       ScenarioVersionError, generate, load, mix_seed, save)
from .experiments import (MetricsRow, SweepSpec, emit_results, parse_results,
                          run_sweep)

__all__ = [name for name in dir() if not name.startswith("_")]
