"""Deliberately naive brute-force references for tests and the verify command.

Everything here re-evaluates the first-crossing rule and the allocation
objective directly, pair by pair and plan by plan, without touching the
optimized search structures it is used to validate.  Size guards make the
cost explicit instead of silently slow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import link as linkmod
from .exitpolicy import ThresholdPair, UndefinedMetricError
from .fairopt import (
    LOG_UTILITY_FLOOR,
    AllocationPlan,
    InfeasibleScenarioError,
    Scenario,
)
from .trace import EventStream

_SENTINEL_DELTA = 1e-6


class OracleSizeError(ValueError):
    """The requested enumeration exceeds the oracle budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_candidate_pairs: int = 2_000_000
    max_plan_enumerations: int = 4096

    def __post_init__(self):
        if self.max_candidate_pairs <= 0 or self.max_plan_enumerations <= 0:
            raise ValueError("oracle budgets must be positive")


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of randomized raise-a-threshold checks on true-positive counts."""

    samples: int
    checks: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _pair_counts(matrix: np.ndarray, crit: np.ndarray, lower: float, upper: float) -> tuple[int, int]:
    """True/false positives by direct first-crossing evaluation of every event."""
    below = matrix <= lower
    above = matrix >= upper
    hit = below | above
    has_exit = hit.any(axis=1)
    first = hit.argmax(axis=1)
    rows = np.arange(len(matrix))
    predicted_critical = has_exit & above[rows, first] & ~below[rows, first]
    tp = int(np.count_nonzero(predicted_critical & crit))
    fp = int(np.count_nonzero(predicted_critical & ~crit))
    return tp, fp


def _candidates(matrix: np.ndarray) -> list[float]:
    scores = sorted(set(matrix.ravel().tolist()))
    lo = max(scores[0] - _SENTINEL_DELTA, scores[0] / 2.0)
    hi = min(scores[-1] + _SENTINEL_DELTA, (scores[-1] + 1.0) / 2.0)
    return [lo] + scores + [hi]


def _uniform_grid(resolution: int) -> list[float]:
    return [(i + 1) / (resolution + 1) for i in range(resolution)]


def brute_force_thresholds(
    stream: EventStream,
    offload_budget: int,
    grid_resolution: int,
    budget: OracleBudget = OracleBudget(),
) -> tuple[ThresholdPair, float]:
    """Exhaustive scan of candidate-score pairs plus a uniform grid.

    Returns the best feasible pair under the offload budget, ties resolved
    toward larger thresholds.  The candidate-score portion alone already
    attains the exact optimum, so the grid can only tie it.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    if offload_budget < 0:
        raise ValueError("offload_budget must be >= 0")
    matrix = stream.to_matrix()
    crit = stream.critical_mask()
    positives = int(crit.sum())
    if positives == 0:
        raise UndefinedMetricError("utility undefined: stream has no critical events")

    values = sorted(set(_candidates(matrix) + _uniform_grid(grid_resolution)))
    pair_count = len(values) * (len(values) + 1) // 2
    if pair_count > budget.max_candidate_pairs:
        raise OracleSizeError(f"{pair_count} pairs exceed the oracle budget")

    best: tuple[float, float, float] | None = None
    for lower, upper in itertools.combinations_with_replacement(values, 2):
        tp, fp = _pair_counts(matrix, crit, lower, upper)
        if tp + fp > offload_budget:
            continue
        key = (tp / positives, lower, upper)
        if best is None or key > best:
            best = key
    assert best is not None  # the all-normal pair offloads nothing
    return ThresholdPair(best[1], best[2]), best[0]


def grid_best_utility(
    stream: EventStream,
    offload_budget: int,
    grid_resolution: int,
    budget: OracleBudget = OracleBudget(),
) -> float:
    """Best feasible utility over a uniform grid only (no candidate scores)."""
    matrix = stream.to_matrix()
    crit = stream.critical_mask()
    positives = int(crit.sum())
    if positives == 0:
        raise UndefinedMetricError("utility undefined: stream has no critical events")
    grid = _uniform_grid(grid_resolution)
    if grid_resolution * (grid_resolution + 1) // 2 > budget.max_candidate_pairs:
        raise OracleSizeError("grid exceeds the oracle budget")
    best = 0.0
    for lower, upper in itertools.combinations_with_replacement(grid, 2):
        tp, fp = _pair_counts(matrix, crit, lower, upper)
        if tp + fp <= offload_budget:
            best = max(best, tp / positives)
    return best


def _best_per_budget(
    matrix: np.ndarray, crit: np.ndarray, max_units: int
) -> tuple[list[float], list[ThresholdPair]]:
    """For each budget 0..max_units, the best utility/pair by direct pair scan."""
    positives = int(crit.sum())
    entries = []
    cand = _candidates(matrix)
    for lower, upper in itertools.combinations_with_replacement(cand, 2):
        tp, fp = _pair_counts(matrix, crit, lower, upper)
        entries.append((tp + fp, tp / positives, lower, upper))
    utilities, pairs = [], []
    for w in range(max_units + 1):
        best = max((u, lo, up) for cnt, u, lo, up in entries if cnt <= w)
        utilities.append(best[0])
        pairs.append(ThresholdPair(best[1], best[2]))
    return utilities, pairs


def brute_force_plan(
    scenario: Scenario, budget: OracleBudget = OracleBudget()
) -> tuple[AllocationPlan, float]:
    """Exact optimum by enumerating assignments and integer compute splits.

    Deadline feasibility reuses the link module's minimum-bandwidth search;
    classification counts come from the direct pair scan above.
    """
    n, m = len(scenario.ues), len(scenario.ens)
    if n == 0 or m == 0:
        raise ValueError("scenario must have at least one UE and one EN")
    if m**n > budget.max_plan_enumerations:
        raise OracleSizeError(f"{m**n} assignments exceed the oracle budget")
    for en in scenario.ens:
        if en.compute_units > 12:
            raise OracleSizeError("compute capacities above 12 exceed the oracle budget")

    min_bw: list[float | None] = []
    for ue in scenario.ues:
        try:
            min_bw.append(
                linkmod.min_bandwidth_for_deadline(
                    ue.channel, scenario.power_cap_w, ue.demand, scenario.bandwidth_cap_hz
                )
            )
        except linkmod.LinkError:
            min_bw.append(None)

    max_units = max(en.compute_units for en in scenario.ens)
    per_user: list[tuple[list[float], list[ThresholdPair]]] = []
    for ue in scenario.ues:
        matrix = ue.stream.to_matrix()
        crit = ue.stream.critical_mask()
        if not crit.any():
            raise UndefinedMetricError("utility undefined: a UE stream has no critical events")
        per_user.append(_best_per_budget(matrix, crit, max_units))

    blocked = [i for i in range(n) if min_bw[i] is None]
    if blocked:
        raise InfeasibleScenarioError(
            "no security- and deadline-feasible assignment exists", blocking_users=blocked
        )

    best_objective = -math.inf
    best_assignment: tuple[int, ...] | None = None
    best_units: list[int] | None = None
    best_pairs: list[ThresholdPair] | None = None

    for assignment in itertools.product(range(m), repeat=n):
        if any(scenario.ens[j].security_level > scenario.ues[i].security_level
               for i, j in enumerate(assignment)):
            continue
        feasible = True
        for j in range(m):
            users = [i for i in range(n) if assignment[i] == j]
            if sum(min_bw[i] for i in users) > scenario.ens[j].bandwidth_hz:
                feasible = False
                break
            pool = scenario.ens[j].power_pool_w
            if pool is not None and len(users) * scenario.power_cap_w > pool:
                feasible = False
                break
        if not feasible:
            continue

        objective = 0.0
        units = [0] * n
        pairs: list[ThresholdPair] = [per_user[i][1][0] for i in range(n)]
        for j in range(m):
            users = [i for i in range(n) if assignment[i] == j]
            if not users:
                continue
            cap = scenario.ens[j].compute_units
            best_split_value = -math.inf
            best_split: tuple[int, ...] | None = None
            for split in itertools.product(range(cap + 1), repeat=len(users)):
                if sum(split) > cap:
                    continue
                value = sum(
                    scenario.ues[i].weight
                    * math.log(max(per_user[i][0][w], LOG_UTILITY_FLOOR))
                    for i, w in zip(users, split)
                )
                if value > best_split_value:
                    best_split_value = value
                    best_split = split
            assert best_split is not None
            objective += best_split_value
            for i, w in zip(users, best_split):
                units[i] = w
                pairs[i] = per_user[i][1][w]

        if objective > best_objective:
            best_objective = objective
            best_assignment = assignment
            best_units = units
            best_pairs = pairs

    if best_assignment is None:
        raise InfeasibleScenarioError(
            "no assignment satisfies security and edge-node capacity together",
            blocking_users=[],
        )

    x = np.zeros((n, m), dtype=int)
    bw = np.zeros((n, m))
    power = np.zeros((n, m))
    units_mat = np.zeros((n, m), dtype=int)
    for i, j in enumerate(best_assignment):
        x[i, j] = 1
        bw[i, j] = min_bw[i]
        power[i, j] = scenario.power_cap_w
        units_mat[i, j] = best_units[i]
    plan = AllocationPlan(
        assignment=x,
        bandwidth_hz=bw,
        power_w=power,
        compute_units=units_mat,
        thresholds=tuple(best_pairs),
    )
    return plan, best_objective


def check_monotonicity(stream: EventStream, samples: int, seed: int) -> MonotonicityReport:
    """Raise each threshold by a random amount and confirm tp never grows.

    Any counterexample is reported verbatim: the pair, the perturbed pair and
    the true-positive counts on both sides.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    matrix = stream.to_matrix()
    crit = stream.critical_mask()
    rng = np.random.default_rng(seed)
    failures: list[str] = []
    checks = 0
    for _ in range(samples):
        lower = rng.uniform(0.01, 0.98)
        upper = rng.uniform(lower, 0.99)
        tp_base, _ = _pair_counts(matrix, crit, lower, upper)

        raised_lower = lower + rng.uniform(0.0, upper - lower)
        tp_l, _ = _pair_counts(matrix, crit, raised_lower, upper)
        checks += 1
        if tp_l > tp_base:
            failures.append(
                f"raising lower {lower:.12g}->{raised_lower:.12g} at upper {upper:.12g} "
                f"grew tp {tp_base}->{tp_l}"
            )

        raised_upper = upper + rng.uniform(0.0, 0.999 - upper)
        tp_u, _ = _pair_counts(matrix, crit, lower, raised_upper)
        checks += 1
        if tp_u > tp_base:
            failures.append(
                f"raising upper {upper:.12g}->{raised_upper:.12g} at lower {lower:.12g} "
                f"grew tp {tp_base}->{tp_u}"
            )
    return MonotonicityReport(samples=samples, checks=checks, failures=tuple(failures))
