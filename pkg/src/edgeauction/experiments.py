"""Seeded sweep harness over the mechanism variants.

A sweep varies one parameter (granularity, resource types, buyer count, or
privacy budget), holds the rest at documented defaults, and averages the
metrics of many independently generated trials per (variant, value) cell.

Reproducibility: per-trial seeds derive from the base seed with
``scenario.mix_seed(base, trial, stream)`` (stream 0 generates the scenario,
stream 1 drives the mechanism), so any single trial can be rerun in
isolation and identical specs produce identical result files byte for byte
(the wall-clock column can be masked for such comparisons).

Revenue estimators, recorded in the sidecar metadata: the joint private
mechanism reports its exact expected revenue; the sequential one reports
the final level's exact expectation conditional on the sampled prefix; the
deterministic variants report their realized optimum.  Satisfaction is the
realized fraction of served buyers in all variants.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__
from .allocation import score_price
from .errors import CapacityError
from .grid import PriceGrid
from .mechanisms import (DEFAULT_MAX_SCORED_VECTORS, MechanismConfig,
                         dpam_distribution, dpam_run, dpam_s_run,
                         expected_revenue)
from .scenario import GeneratorParams, generate, mix_seed

SWEEP_PARAMETERS = ("granularity", "k", "m", "epsilon")
VARIANT_ORDER = ("dpam", "dtam", "dpam_s", "dtam_s")
RESULT_COLUMNS = ("variant", "swept_parameter", "swept_value",
                  "expected_revenue", "satisfaction", "running_time_s",
                  "trials", "seed")
RESULTS_FORMAT_VERSION = 1

_ESTIMATOR_NOTES = {
    "dpam": "exact expected revenue over the full selection law",
    "dtam": "deterministic grid-optimal revenue",
    "dpam_s": "final-level exact expectation given the sampled prefix",
    "dtam_s": "deterministic per-level argmax revenue",
}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: the varied parameter, its values, and fixed defaults."""

    swept_parameter: str
    values: tuple
    m: int = 100
    n: int = 10
    k: int = 3
    granularity: float = 0.1
    epsilon: float = 200.0
    trials: int = 500
    seed: int = 0
    variants: tuple[str, ...] = VARIANT_ORDER
    max_scored_vectors: int = DEFAULT_MAX_SCORED_VECTORS

    def __post_init__(self):
        if self.swept_parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter "
                             f"{self.swept_parameter!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for variant in self.variants:
            if variant not in VARIANT_ORDER:
                raise ValueError(f"unknown variant {variant!r}")


@dataclass
class MetricsRow:
    """Aggregated metrics of one (variant, swept value) cell.

    A cell skipped on a capacity error keeps ``None`` metrics and zero
    trials.
    """

    variant: str
    swept_parameter: str
    swept_value: Union[int, float]
    expected_revenue: Optional[float]
    satisfaction: Optional[float]
    running_time_s: Optional[float]
    trials: int
    seed: int


def _cell_settings(spec: SweepSpec, value) -> tuple[int, int, int, float, float]:
    m, n, k = spec.m, spec.n, spec.k
    granularity, epsilon = spec.granularity, spec.epsilon
    if spec.swept_parameter == "m":
        m = int(value)
    elif spec.swept_parameter == "k":
        k = int(value)
    elif spec.swept_parameter == "granularity":
        granularity = float(value)
    else:
        epsilon = float(value)
    return m, n, k, granularity, epsilon


def _trial_metrics(scenario, config: MechanismConfig) -> tuple[float, float]:
    """(revenue estimate, realized satisfaction) for one trial."""
    if config.variant == "dpam":
        distribution = dpam_distribution(scenario, config)
        revenue = expected_revenue(distribution, distribution.revenues)
        rng = np.random.Generator(np.random.PCG64(config.seed))
        index = distribution.sample_index(rng)
        price = tuple(float(p) for p in distribution.support[index])
        scored = score_price(scenario, price)
        served = scored.allocation.assigned_count()
    elif config.variant == "dtam":
        outcome = dpam_run(scenario, config)
        revenue = outcome.revenue
        served = outcome.allocation.assigned_count()
    else:
        outcome, distributions = dpam_s_run(scenario, config)
        if config.variant == "dpam_s":
            last = distributions[-1]
            revenue = expected_revenue(last, last.revenues)
        else:
            revenue = outcome.revenue
        served = outcome.allocation.assigned_count()
    return revenue, served / scenario.m


def run_sweep(spec: SweepSpec) -> list[MetricsRow]:
    """Run every (variant, value) cell and aggregate the trial means.

    Trials are independent given their derived seeds; a capacity error in a
    cell marks that row skipped instead of aborting the sweep.
    """
    rows = []
    for variant in (v for v in VARIANT_ORDER if v in spec.variants):
        for value in spec.values:
            m, n, k, granularity, epsilon = _cell_settings(spec, value)
            grid = PriceGrid(0.0, 1.0, granularity)
            revenue_sum = satisfaction_sum = elapsed_sum = 0.0
            completed = 0
            try:
                for trial in range(spec.trials):
                    started = time.perf_counter()
                    params = GeneratorParams(
                        m=m, n=n, k=k, seed=mix_seed(spec.seed, trial, 0))
                    scenario = generate(params)
                    config = MechanismConfig(
                        epsilon=epsilon, grid=grid,
                        seed=mix_seed(spec.seed, trial, 1), variant=variant,
                        max_scored_vectors=spec.max_scored_vectors)
                    revenue, satisfaction = _trial_metrics(scenario, config)
                    elapsed_sum += time.perf_counter() - started
                    revenue_sum += revenue
                    satisfaction_sum += satisfaction
                    completed += 1
            except CapacityError:
                rows.append(MetricsRow(variant, spec.swept_parameter, value,
                                       None, None, None, 0, spec.seed))
                continue
            rows.append(MetricsRow(
                variant, spec.swept_parameter, value,
                revenue_sum / completed, satisfaction_sum / completed,
                elapsed_sum / completed, completed, spec.seed))
    return rows


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        raise TypeError("unexpected boolean in results")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def emit_results(rows: Sequence[MetricsRow], path: Union[str, Path],
                 fmt: str = "csv", mask_running_time: bool = False,
                 spec: Optional[SweepSpec] = None) -> Path:
    """Write rows plus a metadata sidecar; byte-stable given equal inputs.

    ``mask_running_time`` zeroes the wall-clock column so two runs of the
    same spec can be compared byte for byte.
    """
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown results format {fmt!r}")
    path = Path(path)
    records = []
    for row in rows:
        record = dataclasses.asdict(row)
        if mask_running_time and record["running_time_s"] is not None:
            record["running_time_s"] = 0.0
        records.append(record)
    if fmt == "csv":
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            for record in records:
                writer.writerow([_format_value(record[c]) for c in RESULT_COLUMNS])
    else:
        path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    metadata = {
        "results_format_version": RESULTS_FORMAT_VERSION,
        "package_version": __version__,
        "columns": list(RESULT_COLUMNS),
        "revenue_estimators": _ESTIMATOR_NOTES,
        "per_trial_seeds": "SeedSequence((seed, trial, stream)): stream 0 "
                           "generates the scenario, stream 1 drives the "
                           "mechanism",
        "running_time_masked": mask_running_time,
        "spec": dataclasses.asdict(spec) if spec is not None else None,
    }
    _sidecar_path(path).write_text(
        json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    return path


def _parse_swept_value(text: str) -> Union[int, float]:
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_results(path: Union[str, Path]) -> list[MetricsRow]:
    """Read rows back; the inverse of ``emit_results`` for both formats."""
    path = Path(path)
    if path.suffix == ".json":
        records = json.loads(path.read_text())
        return [MetricsRow(**record) for record in records]
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(RESULT_COLUMNS):
            raise ValueError(f"{path}: unexpected results header {header}")
        rows = []
        for record in reader:
            fields = dict(zip(RESULT_COLUMNS, record))
            rows.append(MetricsRow(
                variant=fields["variant"],
                swept_parameter=fields["swept_parameter"],
                swept_value=_parse_swept_value(fields["swept_value"]),
                expected_revenue=float(fields["expected_revenue"])
                if fields["expected_revenue"] else None,
                satisfaction=float(fields["satisfaction"])
                if fields["satisfaction"] else None,
                running_time_s=float(fields["running_time_s"])
                if fields["running_time_s"] else None,
                trials=int(fields["trials"]),
                seed=int(fields["seed"]),
            ))
    return rows
