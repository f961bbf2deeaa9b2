"""Command-line interface.

Subcommands: ``run`` executes a sweep and writes a results file, ``scenario``
generates or validates scenario documents, ``audit`` runs the property
checks, and ``oracle`` prints brute-force references for a small instance.
Exit status is 0 on success and nonzero on any error or failed audit.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .audit import (audit_dp, audit_ir_budget, audit_truthfulness_expected,
                    audit_truthfulness_fixed_price)
from .errors import CapacityError
from .grid import PriceGrid, product_matrix
from .mechanisms import MechanismConfig
from .oracle import evaluate
from .experiments import SweepSpec, emit_results, run_sweep
from .scenario import (GeneratorParams, ScenarioParseError, generate, load,
                       mix_seed, save)


def _parse_values(text: str) -> tuple:
    values = []
    for token in text.split(","):
        token = token.strip()
        try:
            values.append(int(token))
        except ValueError:
            values.append(float(token))
    return tuple(values)


def _add_size_flags(parser, m=5, n=3, k=2, granularity=0.5):
    parser.add_argument("--m", type=int, default=m)
    parser.add_argument("--n", type=int, default=n)
    parser.add_argument("--k", type=int, default=k)
    parser.add_argument("--granularity", type=float, default=granularity)
    parser.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgeauction",
        description="Privacy-preserving double auction for edge resources")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one parameter sweep")
    run.add_argument("--sweep", required=True,
                     choices=("granularity", "k", "m", "epsilon"))
    run.add_argument("--values", required=True, type=_parse_values,
                     help="comma-separated swept values")
    run.add_argument("--m", type=int, default=100)
    run.add_argument("--n", type=int, default=10)
    run.add_argument("--k", type=int, default=3)
    run.add_argument("--granularity", type=float, default=0.1)
    run.add_argument("--epsilon", type=float, default=200.0)
    run.add_argument("--trials", type=int, default=500)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--variants", type=lambda s: tuple(s.split(",")),
                     default=("dpam", "dtam", "dpam_s", "dtam_s"))
    run.add_argument("--out", required=True)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--mask-running-time", action="store_true")

    scenario = sub.add_parser("scenario", help="generate or check scenarios")
    scenario_sub = scenario.add_subparsers(dest="scenario_command",
                                           required=True)
    gen = scenario_sub.add_parser("gen")
    _add_size_flags(gen, m=10, n=3, k=2)
    gen.add_argument("--out", required=True)
    check = scenario_sub.add_parser("validate")
    check.add_argument("path")

    audit = sub.add_parser("audit", help="run a property audit")
    audit_sub = audit.add_subparsers(dest="audit_command", required=True)
    dp = audit_sub.add_parser("dp")
    _add_size_flags(dp)
    dp.add_argument("--epsilon", type=float, default=1.0)
    dp.add_argument("--scenarios", type=int, default=5)
    dp.add_argument("--neighbors", type=int, default=10)
    dp.add_argument("--variant", choices=("dpam", "dpam_s"), default="dpam")
    dp.add_argument("--out")
    truth = audit_sub.add_parser("truthfulness")
    _add_size_flags(truth)
    truth.add_argument("--epsilon", type=float, default=1.0)
    truth.add_argument("--scenarios", type=int, default=5)
    truth.add_argument("--mode", choices=("fixed", "expected"),
                       default="fixed")
    truth.add_argument("--out")
    ir = audit_sub.add_parser("ir")
    _add_size_flags(ir)
    ir.add_argument("--epsilon", type=float, default=1.0)
    ir.add_argument("--scenarios", type=int, default=20)
    ir.add_argument("--out")

    oracle = sub.add_parser("oracle", help="brute-force references")
    _add_size_flags(oracle)
    oracle.add_argument("--epsilon", type=float, default=1.0)
    oracle.add_argument("--scenario", help="scenario file instead of a seed")
    return parser


def _audit_scenarios(args):
    for index in range(args.scenarios):
        params = GeneratorParams(m=args.m, n=args.n, k=args.k,
                                 seed=mix_seed(args.seed, index))
        yield generate(params)


def _report_audit(reports, out_path) -> int:
    passed = all(r.passed for r in reports)
    for report in reports:
        status = "pass" if report.passed else "FAIL"
        print(f"{report.check_name}: {status} "
              f"(instances={report.instances_tested}, "
              f"max_violation={report.max_violation:.3g})")
    if out_path:
        Path(out_path).write_text(json.dumps(
            [r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            spec = SweepSpec(swept_parameter=args.sweep, values=args.values,
                             m=args.m, n=args.n, k=args.k,
                             granularity=args.granularity,
                             epsilon=args.epsilon, trials=args.trials,
                             seed=args.seed, variants=args.variants)
            rows = run_sweep(spec)
            emit_results(rows, args.out, fmt=args.format,
                         mask_running_time=args.mask_running_time, spec=spec)
            print(f"wrote {len(rows)} rows to {args.out}")
            return 0

        if args.command == "scenario":
            if args.scenario_command == "gen":
                params = GeneratorParams(m=args.m, n=args.n, k=args.k,
                                         seed=args.seed)
                save(generate(params), args.out)
                print(f"wrote scenario to {args.out}")
                return 0
            problems = load(args.path).validate()
            for problem in problems:
                print(problem, file=sys.stderr)
            print(f"{args.path}: " + ("ok" if not problems else
                                      f"{len(problems)} problem(s)"))
            return 0 if not problems else 1

        if args.command == "audit":
            grid = PriceGrid(0.0, 1.0, args.granularity)
            config = MechanismConfig(epsilon=args.epsilon, grid=grid)
            if args.audit_command == "dp":
                config = dataclasses.replace(config, variant=args.variant)
                reports = [
                    audit_dp(scn, config, args.neighbors,
                             seed=mix_seed(args.seed, 1000 + i))
                    for i, scn in enumerate(_audit_scenarios(args))]
            elif args.audit_command == "truthfulness":
                reports = []
                for scn in _audit_scenarios(args):
                    if args.mode == "fixed":
                        reports.extend(
                            audit_truthfulness_fixed_price(scn, price)
                            for price in product_matrix(grid, scn.k))
                    else:
                        reports.append(
                            audit_truthfulness_expected(scn, config))
            else:
                reports = [audit_ir_budget(list(_audit_scenarios(args)),
                                           config)]
            return _report_audit(reports, args.out)

        # oracle
        scenario = (load(args.scenario) if args.scenario else
                    generate(GeneratorParams(m=args.m, n=args.n, k=args.k,
                                             seed=args.seed)))
        grid = PriceGrid(scenario.bounds.c_min, scenario.bounds.c_max,
                         args.granularity)
        result = evaluate(scenario, grid, args.epsilon)
        print(json.dumps(dataclasses.asdict(result), indent=2))
        return 0
    except (ScenarioParseError, CapacityError, ValueError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
