"""Command-line entry point.

Subcommands: gen, solve, bounds, verify, sweep.  Human-readable summaries go
to stderr and machine-readable JSON to stdout so outputs can be piped.  All
randomness flows from the explicit --seed flag; --deterministic drops
timestamps so identical invocations produce byte-identical output.

Exit codes: 0 success, 1 infeasible scenario or failed check, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import fairopt, oracle
from .exitpolicy import (
    ThresholdPair,
    UndefinedMetricError,
    UtilityCurve,
    evaluate,
    optimal_thresholds,
    write_sweep_csv,
)
from .fairopt import InfeasibleScenarioError, SolveOptions, allocate_compute_dp
from .link import LinkError
from .scenario import (
    ScenarioConfig,
    ScenarioParseError,
    UEConfig,
    build_bundle,
    bundle_to_dict,
    load_scenario,
    parse_document,
    random_scenario,
    random_scenario_config,
    serialize_document,
    write_bundle,
)
from .trace import TraceParseError, generate_stream, load_stream, save_stream


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _say(message: str) -> None:
    sys.stderr.write(message + "\n")


def cmd_gen(args: argparse.Namespace) -> int:
    config = random_scenario_config(
        n_ues=args.ues,
        n_ens=args.ens,
        seed=args.seed,
        security_levels=args.security_levels,
    )
    out_dir = Path(args.out)
    traces_dir = out_dir / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    file_ues = []
    trace_paths = []
    for i, ue in enumerate(config.ues):
        stream = generate_stream(ue.generator.params, ue.generator.count)
        rel = f"traces/ue_{i:02d}.csv"
        save_stream(stream, out_dir / rel)
        trace_paths.append(rel)
        file_ues.append(
            UEConfig(
                weight=ue.weight,
                security_level=ue.security_level,
                feature_size_bits=ue.feature_size_bits,
                deadline_s=ue.deadline_s,
                channel=ue.channel,
                joules_per_access=ue.joules_per_access,
                access_counts=ue.access_counts,
                trace_file=rel,
            )
        )
    file_config = ScenarioConfig(
        security_levels=config.security_levels,
        bandwidth_cap_hz=config.bandwidth_cap_hz,
        power_cap_w=config.power_cap_w,
        ues=tuple(file_ues),
        ens=config.ens,
        seed=config.seed,
    )
    scenario_path = out_dir / "scenario.json"
    scenario_path.write_text(
        json.dumps(serialize_document(file_config), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    _say(f"wrote scenario with {args.ues} UEs / {args.ens} ENs to {args.out}")
    _emit(
        {
            "command": "gen",
            "scenario": f"{args.out}/scenario.json",
            "traces": trace_paths,
            "seed": args.seed,
        }
    )
    return 0


def _timestamp(deterministic: bool) -> str | None:
    if deterministic:
        return None
    return datetime.now(timezone.utc).isoformat()


def cmd_solve(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    plan, report = fairopt.solve_alternating(scenario, SolveOptions(mode=args.mode))
    counts, metrics = [], []
    for ue, thr in zip(scenario.ues, plan.thresholds):
        c, m = evaluate(ue.stream, thr)
        counts.append(c)
        metrics.append(m)
    config_doc = serialize_document(_reload_config(args.scenario))
    bundle = build_bundle(
        config_doc, plan, report, counts, metrics, created_at=_timestamp(args.deterministic)
    )
    if args.out:
        write_bundle(bundle, args.out)
        _say(f"bundle written to {args.out}")
    _say(
        f"objective {report.objective:.6f} after {report.iterations} rounds; "
        f"gap {report.relative_gap_pct if report.relative_gap_pct is not None else 'n/a'}"
    )
    _emit(bundle_to_dict(bundle))
    return 0


def _reload_config(path: str) -> ScenarioConfig:
    return parse_document(Path(path).read_text(encoding="utf-8"))


def cmd_bounds(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    _, report = fairopt.solve_alternating(scenario, SolveOptions(mode=args.mode))
    _say(
        f"objective {report.objective:.6f}, bounds [{report.lower_bound:.6f}, "
        f"{report.upper_bound:.6f}]"
    )
    _emit(
        {
            "command": "bounds",
            "objective": report.objective,
            "lower_bound": report.lower_bound,
            "upper_bound": report.upper_bound,
            "relative_gap_pct": report.relative_gap_pct,
        }
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    stream = load_stream(args.stream)
    values = [(i + 1) / (args.resolution + 1) for i in range(args.resolution)]
    pairs = [
        ThresholdPair(lo, up) for lo in values for up in values if lo <= up
    ]
    rows = write_sweep_csv(stream, pairs, args.out)
    _say(f"swept {rows} threshold pairs over {len(stream.traces)} events")
    _emit({"command": "sweep", "rows": rows, "out": args.out})
    return 0


def _suite_monotonicity(seed: int) -> tuple[bool, str]:
    from .trace import GeneratorParams

    rng = np.random.default_rng(seed)
    failures = 0
    streams = 0
    for layer_count in (3, 4, 6):
        for _ in range(4):
            params = GeneratorParams(
                layer_count=layer_count,
                critical_prior=float(rng.uniform(0.2, 0.5)),
                critical_drift=float(rng.uniform(0.4, 1.0)),
                normal_drift=-float(rng.uniform(0.4, 1.0)),
                noise_std=float(rng.uniform(0.2, 0.7)),
                seed=int(rng.integers(0, 2**31)),
            )
            stream = generate_stream(params, int(rng.integers(100, 300)))
            report = oracle.check_monotonicity(stream, samples=30, seed=int(rng.integers(0, 2**31)))
            streams += 1
            failures += len(report.failures)
    return failures == 0, f"{streams} streams, {failures} counterexamples"


def _suite_thresholds(seed: int) -> tuple[bool, str]:
    from .trace import GeneratorParams

    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(10):
        params = GeneratorParams(
            layer_count=4,
            critical_prior=float(rng.uniform(0.25, 0.5)),
            critical_drift=float(rng.uniform(0.4, 1.0)),
            normal_drift=-float(rng.uniform(0.4, 1.0)),
            noise_std=float(rng.uniform(0.3, 0.7)),
            seed=int(rng.integers(0, 2**31)),
        )
        stream = generate_stream(params, int(rng.integers(20, 40)))
        budget = int(rng.integers(0, len(stream.traces) + 1))
        _, exact = optimal_thresholds(stream, budget)
        _, brute = oracle.brute_force_thresholds(stream, budget, grid_resolution=31)
        if exact != brute:
            mismatches += 1
    return mismatches == 0, f"10 streams, {mismatches} mismatches"


def _suite_dp(seed: int) -> tuple[bool, str]:
    import itertools

    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(10):
        users = int(rng.integers(2, 5))
        capacity = int(rng.integers(3, 10))
        weights = [float(rng.uniform(0.5, 2.0)) for _ in range(users)]
        curves = []
        for _ in range(users):
            steps = np.sort(rng.uniform(0.0, 1.0, size=capacity + 1))
            curves.append(
                UtilityCurve(
                    utilities=steps,
                    pairs=tuple(ThresholdPair(0.5, 0.5) for _ in range(capacity + 1)),
                )
            )
        split = allocate_compute_dp(weights, curves, capacity)
        value = sum(
            w * math.log(max(c.value(u), fairopt.LOG_UTILITY_FLOOR))
            for w, c, u in zip(weights, curves, split)
        )
        best = -math.inf
        for combo in itertools.product(range(capacity + 1), repeat=users):
            if sum(combo) > capacity:
                continue
            v = sum(
                w * math.log(max(c.value(u), fairopt.LOG_UTILITY_FLOOR))
                for w, c, u in zip(weights, curves, combo)
            )
            best = max(best, v)
        if not value == best:
            mismatches += 1
    return mismatches == 0, f"10 instances, {mismatches} mismatches"


def _suite_plan(seed: int, scenario=None) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    mismatches = 0
    runs = 0
    for k in range(5):
        sc = scenario or random_scenario(
            int(rng.integers(1, 4)),
            int(rng.integers(1, 3)),
            int(rng.integers(0, 2**31)),
            compute_range=(2, 8),
            event_count_range=(20, 40),
            layer_counts=(3,),
        )
        try:
            _, brute_obj = oracle.brute_force_plan(sc)
        except oracle.OracleSizeError:
            continue
        _, report = fairopt.solve_alternating(sc, SolveOptions(mode="exhaustive"))
        runs += 1
        if abs(report.objective - brute_obj) > 1e-9:
            mismatches += 1
        if scenario is not None:
            break
    return mismatches == 0, f"{runs} scenarios, {mismatches} mismatches"


def _suite_sandwich(seed: int, scenario=None) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    violations = 0
    runs = 0
    for _ in range(10):
        sc = scenario or random_scenario(
            int(rng.integers(1, 5)),
            int(rng.integers(1, 4)),
            int(rng.integers(0, 2**31)),
        )
        _, report = fairopt.solve_alternating(sc)
        runs += 1
        if report.objective > report.upper_bound + 1e-9:
            violations += 1
        if scenario is not None:
            break
    return violations == 0, f"{runs} scenarios, {violations} bound violations"


_SUITES = {
    "monotonicity": _suite_monotonicity,
    "thresholds": _suite_thresholds,
    "dp": _suite_dp,
    "plan": _suite_plan,
    "sandwich": _suite_sandwich,
}


def cmd_verify(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario) if args.scenario else None
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    results = {}
    failures = 0
    for name in names:
        runner = _SUITES[name]
        if name in ("plan", "sandwich"):
            passed, detail = runner(args.seed, scenario)
        else:
            passed, detail = runner(args.seed)
        results[name] = {"passed": passed, "detail": detail}
        if not passed:
            failures += 1
        _say(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    _emit({"command": "verify", "seed": args.seed, "suites": results, "failures": failures})
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairedge",
        description="Fairness-aware cooperative edge inference: generate, solve, bound, verify, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random scenario plus trace files")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--ues", type=int, default=3)
    p_gen.add_argument("--ens", type=int, default=2)
    p_gen.add_argument("--security-levels", type=int, default=2)
    p_gen.add_argument("--deterministic", action="store_true")
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve a scenario and emit a result bundle")
    p_solve.add_argument("scenario")
    p_solve.add_argument("--out", default=None, help="bundle output path")
    p_solve.add_argument("--mode", choices=("exhaustive", "local"), default="exhaustive")
    p_solve.add_argument("--deterministic", action="store_true")
    p_solve.set_defaults(func=cmd_solve)

    p_bounds = sub.add_parser("bounds", help="solve and report lower/upper bounds and gap")
    p_bounds.add_argument("scenario")
    p_bounds.add_argument("--mode", choices=("exhaustive", "local"), default="exhaustive")
    p_bounds.add_argument("--deterministic", action="store_true")
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="run property suites against oracles")
    p_verify.add_argument("scenario", nargs="?", default=None)
    p_verify.add_argument(
        "--suite", choices=("all", *_SUITES), default="all"
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--deterministic", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="export threshold-sweep metrics CSV")
    p_sweep.add_argument("stream", help="trace CSV path")
    p_sweep.add_argument("--resolution", type=int, default=25)
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--deterministic", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioParseError, TraceParseError) as err:
        _say(f"error: {err}")
        return 2
    except InfeasibleScenarioError as err:
        _say(f"infeasible: {err}")
        _emit({"error": {"kind": "infeasible", "message": str(err), "blocking_users": err.blocking_users}})
        return 1
    except (LinkError, UndefinedMetricError) as err:
        _say(f"error: {err}")
        _emit({"error": {"kind": "failed-check", "message": str(err)}})
        return 1
    except FileNotFoundError as err:
        _say(f"error: {err}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
