"""Joint thresholds, assignment and resource allocation with proportional fairness.

The solved problem maximizes a weighted sum of log utilities over per-user
dual thresholds, a single edge-node assignment per user, and bandwidth,
power and integer compute allocations, under per-pair caps, edge capacities,
security clearances, offload deadlines and per-user compute demand.

Utility reacts to the compute allocation only through the offload-count
budget, so the resource subproblem collapses to an integer allocation over
per-user budget-indexed utility curves, with deadline feasibility handled
independently by a minimum-bandwidth search at full transmit power.  That
reduction drives the alternating solver, the grouped bound and the fully
relaxed bound alike.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import link as linkmod
from .exitpolicy import ThresholdPair, UndefinedMetricError, UtilityCurve, evaluate, utility_curve
from .link import ChannelState, EnergyModel, OffloadDemand
from .trace import EventStream

# Floor applied to utilities inside logarithms only; reported metrics are
# never floored.
LOG_UTILITY_FLOOR = 1e-6

# Guard for exhaustive assignment enumeration: at most 2^20 combinations.
_EXHAUSTIVE_GUARD_BITS = 20.0


class InfeasibleScenarioError(Exception):
    """No feasible plan exists; lists the users that block every assignment."""

    def __init__(self, message: str, blocking_users: Sequence[int] = ()):
        if blocking_users:
            message = f"{message} (blocking users: {list(blocking_users)})"
        super().__init__(message)
        self.blocking_users = list(blocking_users)


@dataclass(frozen=True)
class UEProfile:
    """One user device: fairness weight, clearance, demand, channel and stream."""

    weight: float
    security_level: int
    demand: OffloadDemand
    channel: ChannelState
    energy: EnergyModel
    stream: EventStream

    def __post_init__(self):
        if self.weight <= 0.0:
            raise ValueError("weight must be > 0")
        if self.security_level < 1:
            raise ValueError("security_level must be >= 1 (1 is the strictest)")


@dataclass(frozen=True)
class ENProfile:
    """One edge node: bandwidth pool, integer compute units, clearance level."""

    bandwidth_hz: float
    compute_units: int
    security_level: int
    power_pool_w: float | None = None

    def __post_init__(self):
        if self.bandwidth_hz < 0.0:
            raise ValueError("bandwidth_hz must be >= 0")
        if self.compute_units < 0:
            raise ValueError("compute_units must be >= 0")
        if self.security_level < 1:
            raise ValueError("security_level must be >= 1")
        if self.power_pool_w is not None and self.power_pool_w < 0.0:
            raise ValueError("power_pool_w must be >= 0 when present")


@dataclass(frozen=True)
class Scenario:
    """Users, edge nodes and global per-pair caps; level 1 is the strictest."""

    ues: tuple[UEProfile, ...]
    ens: tuple[ENProfile, ...]
    bandwidth_cap_hz: float
    power_cap_w: float
    security_levels: int

    def __post_init__(self):
        object.__setattr__(self, "ues", tuple(self.ues))
        object.__setattr__(self, "ens", tuple(self.ens))
        if self.bandwidth_cap_hz < 0.0 or self.power_cap_w < 0.0:
            raise ValueError("caps must be >= 0")
        if self.security_levels < 1:
            raise ValueError("security_levels must be >= 1")
        for idx, ue in enumerate(self.ues):
            if ue.security_level > self.security_levels:
                raise ValueError(f"ues[{idx}].security_level exceeds security_levels")
        for idx, en in enumerate(self.ens):
            if en.security_level > self.security_levels:
                raise ValueError(f"ens[{idx}].security_level exceeds security_levels")


@dataclass(frozen=True)
class AllocationPlan:
    """One full candidate solution; matrices are (users, edge nodes)."""

    assignment: np.ndarray
    bandwidth_hz: np.ndarray
    power_w: np.ndarray
    compute_units: np.ndarray
    thresholds: tuple[ThresholdPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", np.asarray(self.assignment))
        object.__setattr__(self, "bandwidth_hz", np.asarray(self.bandwidth_hz, dtype=float))
        object.__setattr__(self, "power_w", np.asarray(self.power_w, dtype=float))
        object.__setattr__(self, "compute_units", np.asarray(self.compute_units))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        shape = self.assignment.shape
        if len(shape) != 2:
            raise ValueError("assignment must be a 2-D matrix")
        for name in ("bandwidth_hz", "power_w", "compute_units"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must match the assignment shape")
        if len(self.thresholds) != shape[0]:
            raise ValueError("one threshold pair per user is required")


@dataclass(frozen=True)
class Violation:
    """One failed constraint; `constraint` is a stable machine-readable tag."""

    constraint: str
    message: str


@dataclass(frozen=True)
class UserDiagnostics:
    user: int
    local_energy_j: float
    offload_time_s: float
    offload_energy_j: float


@dataclass(frozen=True)
class SolveReport:
    objective: float
    per_user_utility: tuple[float, ...]
    iterations: int
    feasible: bool
    lower_bound: float
    upper_bound: float
    relative_gap_pct: float | None
    objective_history: tuple[float, ...]
    diagnostics: tuple[UserDiagnostics, ...]


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "exhaustive"
    max_rounds: int = 50
    tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("exhaustive", "local"):
            raise ValueError("mode must be 'exhaustive' or 'local'")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


def _shape_or_raise(plan: AllocationPlan, scenario: Scenario) -> tuple[int, int]:
    n, m = len(scenario.ues), len(scenario.ens)
    if plan.assignment.shape != (n, m):
        raise ValueError(
            f"plan shape {plan.assignment.shape} does not match scenario ({n}, {m})"
        )
    return n, m


def check_feasibility(plan: AllocationPlan, scenario: Scenario) -> list[Violation]:
    """Evaluate every problem constraint literally; empty list means feasible."""
    n, m = _shape_or_raise(plan, scenario)
    x, b, p, w = plan.assignment, plan.bandwidth_hz, plan.power_w, plan.compute_units
    out: list[Violation] = []

    for i in range(n):
        for j in range(m):
            if x[i, j] not in (0, 1):
                out.append(Violation("binary-assignment", f"x[{i},{j}] = {x[i, j]} is not binary"))
            if b[i, j] < 0.0 or p[i, j] < 0.0 or w[i, j] < 0:
                out.append(
                    Violation("nonnegative-allocation", f"negative allocation at pair ({i},{j})")
                )
            if b[i, j] > scenario.bandwidth_cap_hz:
                out.append(
                    Violation("pair-bandwidth-cap", f"b[{i},{j}] exceeds cap {scenario.bandwidth_cap_hz}")
                )
            if p[i, j] > scenario.power_cap_w:
                out.append(
                    Violation("pair-power-cap", f"p[{i},{j}] exceeds cap {scenario.power_cap_w}")
                )
            if x[i, j] == 0 and (b[i, j] != 0.0 or p[i, j] != 0.0 or w[i, j] != 0):
                out.append(
                    Violation("inactive-pair", f"resources allocated on unused pair ({i},{j})")
                )

    for i in range(n):
        row = int(np.sum(x[i]))
        if row != 1:
            out.append(Violation("single-assignment", f"user {i} is assigned {row} edge nodes"))

    for j in range(m):
        en = scenario.ens[j]
        used_b = float(np.sum(x[:, j] * b[:, j]))
        if used_b > en.bandwidth_hz:
            out.append(Violation("en-bandwidth-cap", f"edge node {j} bandwidth {used_b} > {en.bandwidth_hz}"))
        used_w = int(np.sum(x[:, j] * w[:, j]))
        if used_w > en.compute_units:
            out.append(Violation("en-compute-cap", f"edge node {j} compute {used_w} > {en.compute_units}"))
        if en.power_pool_w is not None:
            used_p = float(np.sum(x[:, j] * p[:, j]))
            if used_p > en.power_pool_w:
                out.append(Violation("en-power-pool", f"edge node {j} power {used_p} > {en.power_pool_w}"))

    for i, ue in enumerate(scenario.ues):
        assigned_level = int(np.sum(x[i] * [en.security_level for en in scenario.ens]))
        if assigned_level > ue.security_level:
            out.append(
                Violation(
                    "security-level",
                    f"user {i} (level {ue.security_level}) assigned level-{assigned_level} edge node",
                )
            )

    for i, thr in enumerate(plan.thresholds):
        if not (0.0 < thr.lower <= thr.upper < 1.0):
            out.append(Violation("threshold-range", f"user {i} thresholds out of range"))

    for i, ue in enumerate(scenario.ues):
        b_i = float(np.sum(x[i] * b[i]))
        p_i = float(np.sum(x[i] * p[i]))
        alloc = linkmod.LinkAllocation(bandwidth_hz=b_i, power_w=p_i)
        try:
            t_off = linkmod.offload_time(ue.demand, alloc, ue.channel)
        except linkmod.InsecureLinkError:
            out.append(Violation("deadline", f"user {i} link is insecure (zero secure rate)"))
            continue
        if t_off > ue.demand.deadline_s:
            out.append(
                Violation("deadline", f"user {i} offload time {t_off:.6g}s exceeds {ue.demand.deadline_s}s")
            )

    for i, ue in enumerate(scenario.ues):
        counts, _ = evaluate(ue.stream, plan.thresholds[i])
        granted = int(np.sum(x[i] * w[i]))
        if counts.offloaded > granted:
            out.append(
                Violation(
                    "offload-compute",
                    f"user {i} offloads {counts.offloaded} events but holds {granted} compute units",
                )
            )

    return out


def weighted_log_objective(weights: Sequence[float], utilities: Sequence[float]) -> float:
    """Sum of weight * ln(utility), flooring each utility at LOG_UTILITY_FLOOR."""
    if len(weights) != len(utilities):
        raise ValueError("weights and utilities must align")
    return sum(
        w * math.log(max(u, LOG_UTILITY_FLOOR)) for w, u in zip(weights, utilities)
    )


def per_user_utilities(plan: AllocationPlan, scenario: Scenario) -> list[float]:
    """Exact per-user utilities under the plan's thresholds."""
    values = []
    for ue, thr in zip(scenario.ues, plan.thresholds):
        _, report = evaluate(ue.stream, thr)
        if report.utility is None:
            raise UndefinedMetricError("utility undefined: a UE stream has no critical events")
        values.append(report.utility)
    return values


def objective(plan: AllocationPlan, scenario: Scenario) -> float:
    """Weighted sum of log utilities, floored inside the logarithm only."""
    _shape_or_raise(plan, scenario)
    return weighted_log_objective(
        [ue.weight for ue in scenario.ues], per_user_utilities(plan, scenario)
    )


def allocate_compute_dp(
    weights: Sequence[float], curves: Sequence[UtilityCurve], capacity: int
) -> list[int]:
    """Exact integer compute split maximizing the weighted log-utility sum.

    Dynamic program over (user, remaining units); ties keep the smallest
    allocation for the earlier-indexed user.
    """
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    if len(weights) != len(curves):
        raise ValueError("weights and curves must align")
    count = len(weights)
    if count == 0:
        return []

    values = [
        [weights[u] * math.log(max(curves[u].value(w), LOG_UTILITY_FLOOR)) for w in range(capacity + 1)]
        for u in range(count)
    ]
    best = [[0.0] * (capacity + 1) for _ in range(count + 1)]
    choice = [[0] * (capacity + 1) for _ in range(count)]
    for u in range(count - 1, -1, -1):
        for remaining in range(capacity + 1):
            top_value = -math.inf
            top_units = 0
            for units in range(remaining + 1):
                value = values[u][units] + best[u + 1][remaining - units]
                if value > top_value:
                    top_value = value
                    top_units = units
            best[u][remaining] = top_value
            choice[u][remaining] = top_units

    allocation = []
    remaining = capacity
    for u in range(count):
        units = choice[u][remaining]
        allocation.append(units)
        remaining -= units
    return allocation


def _min_bandwidths(scenario: Scenario) -> tuple[list[float | None], list[str | None]]:
    """Per-user minimum deadline-meeting bandwidth at full power, or failure cause."""
    needs: list[float | None] = []
    causes: list[str | None] = []
    for ue in scenario.ues:
        if scenario.power_cap_w <= 0.0:
            needs.append(None)
            causes.append("zero power cap")
            continue
        try:
            needs.append(
                linkmod.min_bandwidth_for_deadline(
                    ue.channel, scenario.power_cap_w, ue.demand, scenario.bandwidth_cap_hz
                )
            )
            causes.append(None)
        except linkmod.InsecureLinkError:
            needs.append(None)
            causes.append("insecure link")
        except linkmod.DeadlineInfeasibleError:
            needs.append(None)
            causes.append("deadline unreachable within the bandwidth cap")
    return needs, causes


def _feasible_en_sets(scenario: Scenario, min_bw: list[float | None]) -> list[list[int]]:
    sets: list[list[int]] = []
    for i, ue in enumerate(scenario.ues):
        options = []
        if min_bw[i] is not None:
            for j, en in enumerate(scenario.ens):
                if en.security_level > ue.security_level:
                    continue
                if min_bw[i] > en.bandwidth_hz:
                    continue
                if en.power_pool_w is not None and scenario.power_cap_w > en.power_pool_w:
                    continue
                options.append(j)
        sets.append(options)
    return sets


def _build_curves(scenario: Scenario, max_units: int) -> list[UtilityCurve]:
    return [
        utility_curve(ue.stream, min(max_units, len(ue.stream.traces)))
        for ue in scenario.ues
    ]


def _assignment_value(
    assignment: Sequence[int],
    scenario: Scenario,
    curves: Sequence[UtilityCurve],
    min_bw: Sequence[float | None],
) -> tuple[int, float, list[int]]:
    """(capacity overloads, objective, per-user compute units) for one assignment."""
    n, m = len(scenario.ues), len(scenario.ens)
    overloads = 0
    units = [0] * n
    for j in range(m):
        users = [i for i in range(n) if assignment[i] == j]
        if not users:
            continue
        en = scenario.ens[j]
        if sum(min_bw[i] for i in users) > en.bandwidth_hz:
            overloads += 1
        if en.power_pool_w is not None and len(users) * scenario.power_cap_w > en.power_pool_w:
            overloads += 1
        split = allocate_compute_dp(
            [scenario.ues[i].weight for i in users],
            [curves[i] for i in users],
            en.compute_units,
        )
        for i, w in zip(users, split):
            units[i] = w
    total = weighted_log_objective(
        [ue.weight for ue in scenario.ues],
        [curves[i].value(units[i]) for i in range(n)],
    )
    return overloads, total, units


def _greedy_assignment(
    scenario: Scenario,
    feasible: Sequence[Sequence[int]],
    min_bw: Sequence[float | None],
) -> list[int]:
    """Start each user on the roomiest feasible node, preferring stricter security."""
    remaining_bw = [en.bandwidth_hz for en in scenario.ens]
    remaining_slots = [
        math.inf if en.power_pool_w is None or scenario.power_cap_w == 0
        else en.power_pool_w // scenario.power_cap_w
        for en in scenario.ens
    ]
    assignment = []
    for i in range(len(scenario.ues)):
        ranked = sorted(
            feasible[i],
            key=lambda j: (-scenario.ens[j].compute_units, scenario.ens[j].security_level, j),
        )
        pick = None
        for j in ranked:
            if min_bw[i] <= remaining_bw[j] and remaining_slots[j] >= 1:
                pick = j
                break
        if pick is None:
            pick = ranked[0]  # overloaded start; local moves may repair it
        assignment.append(pick)
        remaining_bw[pick] -= min_bw[i]
        remaining_slots[pick] -= 1
    return assignment


def assignment_search(
    scenario: Scenario,
    utility_curves: Sequence[UtilityCurve],
    mode: str = "exhaustive",
    *,
    min_bandwidth: Sequence[float | None] | None = None,
    start: Sequence[int] | None = None,
) -> np.ndarray:
    """Pick one edge node per user maximizing the weighted log-utility sum.

    Exhaustive mode enumerates every security-feasible combination (guarded
    to 2^20; beyond that it silently falls back to local mode).  Local mode
    starts from the greedy assignment (or `start`) and applies single-user
    reassignment moves until none improves.  `min_bandwidth` may carry
    precomputed per-user deadline bandwidths.
    """
    if mode not in ("exhaustive", "local"):
        raise ValueError("mode must be 'exhaustive' or 'local'")
    n, m = len(scenario.ues), len(scenario.ens)
    if n == 0 or m == 0:
        raise ValueError("scenario must have at least one UE and one EN")
    min_bw = list(min_bandwidth) if min_bandwidth is not None else _min_bandwidths(scenario)[0]
    feasible = _feasible_en_sets(scenario, min_bw)
    blocked = [i for i, options in enumerate(feasible) if not options]
    if blocked:
        raise InfeasibleScenarioError(
            "some users have no security- and deadline-feasible edge node",
            blocking_users=blocked,
        )

    if mode == "exhaustive" and n * math.log2(m) <= _EXHAUSTIVE_GUARD_BITS:
        best_score: tuple[int, float] | None = None
        best_assignment: tuple[int, ...] | None = None
        for combo in itertools.product(*feasible):
            overloads, value, _ = _assignment_value(combo, scenario, utility_curves, min_bw)
            if overloads:
                continue
            if best_score is None or (0, value) > best_score:
                best_score = (0, value)
                best_assignment = combo
        if best_assignment is None:
            raise InfeasibleScenarioError(
                "no assignment satisfies edge-node bandwidth and power capacities"
            )
        chosen = list(best_assignment)
    else:
        chosen = list(start) if start is not None else _greedy_assignment(scenario, feasible, min_bw)
        overloads, value, _ = _assignment_value(chosen, scenario, utility_curves, min_bw)
        score = (-overloads, value)
        for _ in range(10_000):
            best_move = None
            best_move_score = score
            for i in range(n):
                for j in feasible[i]:
                    if j == chosen[i]:
                        continue
                    candidate = chosen.copy()
                    candidate[i] = j
                    c_over, c_value, _ = _assignment_value(candidate, scenario, utility_curves, min_bw)
                    c_score = (-c_over, c_value)
                    if c_score > best_move_score:
                        best_move_score = c_score
                        best_move = (i, j)
            if best_move is None:
                break
            chosen[best_move[0]] = best_move[1]
            score = best_move_score
        if score[0] < 0:
            raise InfeasibleScenarioError(
                "local search found no assignment within edge-node capacities"
            )

    x = np.zeros((n, m), dtype=int)
    for i, j in enumerate(chosen):
        x[i, j] = 1
    return x


def solve_alternating(
    scenario: Scenario, opts: SolveOptions | None = None
) -> tuple[AllocationPlan, SolveReport]:
    """Block-coordinate solve: thresholds, then assignment, then resources.

    Per-user exact threshold selection is precomputed as a budget-indexed
    utility curve; each round re-optimizes the assignment given the curves
    and then splits each edge node's compute units exactly.  Rounds repeat
    until the objective improves by less than `tol` (at most `max_rounds`);
    the objective sequence is non-decreasing by construction.
    """
    opts = opts or SolveOptions()
    n, m = len(scenario.ues), len(scenario.ens)
    if n == 0 or m == 0:
        raise ValueError("scenario must have at least one UE and one EN")

    min_bw, causes = _min_bandwidths(scenario)
    feasible = _feasible_en_sets(scenario, min_bw)
    blocked = [i for i, options in enumerate(feasible) if not options]
    if blocked:
        detail = "; ".join(
            f"user {i}: {causes[i] or 'no edge node clears security and bandwidth'}"
            for i in blocked
        )
        raise InfeasibleScenarioError(f"infeasible scenario: {detail}", blocking_users=blocked)

    total_units = sum(en.compute_units for en in scenario.ens)
    curves = _build_curves(scenario, total_units)

    history: list[float] = []
    assignment: list[int] | None = None
    units: list[int] = [0] * n
    for _ in range(opts.max_rounds):
        x = assignment_search(
            scenario, curves, opts.mode, min_bandwidth=min_bw, start=assignment
        )
        assignment = [int(np.argmax(x[i])) for i in range(n)]
        _, current, units = _assignment_value(assignment, scenario, curves, min_bw)
        history.append(current)
        if len(history) > 1 and current - history[-2] < opts.tol:
            break

    bandwidth = np.zeros((n, m))
    power = np.zeros((n, m))
    compute = np.zeros((n, m), dtype=int)
    x = np.zeros((n, m), dtype=int)
    thresholds = []
    for i, j in enumerate(assignment):
        x[i, j] = 1
        bandwidth[i, j] = min_bw[i]
        power[i, j] = scenario.power_cap_w
        compute[i, j] = units[i]
        thresholds.append(curves[i].pair(units[i]))
    plan = AllocationPlan(
        assignment=x,
        bandwidth_hz=bandwidth,
        power_w=power,
        compute_units=compute,
        thresholds=tuple(thresholds),
    )

    utilities = tuple(curves[i].value(units[i]) for i in range(n))
    final = history[-1]
    lb = lower_bound(scenario, _curves=curves)
    ub = upper_bound(scenario, _curves=curves)
    gap = relative_gap(final, lb) if lb != 0.0 else None

    diagnostics = []
    for i, ue in enumerate(scenario.ues):
        alloc = linkmod.LinkAllocation(bandwidth_hz=min_bw[i], power_w=scenario.power_cap_w)
        t_off = linkmod.offload_time(ue.demand, alloc, ue.channel)
        diagnostics.append(
            UserDiagnostics(
                user=i,
                local_energy_j=linkmod.local_inference_energy(ue.energy),
                offload_time_s=t_off,
                offload_energy_j=scenario.power_cap_w * t_off,
            )
        )

    report = SolveReport(
        objective=final,
        per_user_utility=utilities,
        iterations=len(history),
        feasible=True,
        lower_bound=lb,
        upper_bound=ub,
        relative_gap_pct=gap,
        objective_history=tuple(history),
        diagnostics=tuple(diagnostics),
    )
    return plan, report


def _pooled_value(
    user_idx: Sequence[int],
    scenario: Scenario,
    bandwidth_total: float,
    compute_total: int,
    power_total: float | None,
    curves: Sequence[UtilityCurve],
) -> float:
    """Pooled-capacity allocation value over one user group.

    Users are admitted greedily by ascending bandwidth need; users whose link
    fails or who do not fit the pooled bandwidth/power contribute the floor
    utility.
    """
    needs: list[tuple[float, int]] = []
    floored: list[int] = []
    for i in user_idx:
        ue = scenario.ues[i]
        if scenario.power_cap_w <= 0.0:
            floored.append(i)
            continue
        try:
            bw = linkmod.min_bandwidth_for_deadline(
                ue.channel, scenario.power_cap_w, ue.demand, scenario.bandwidth_cap_hz
            )
        except linkmod.LinkError:
            floored.append(i)
            continue
        needs.append((bw, i))

    needs.sort()
    served: list[int] = []
    remaining_bw = bandwidth_total
    remaining_power = power_total
    for bw, i in needs:
        if bw > remaining_bw:
            floored.append(i)
            continue
        if remaining_power is not None and scenario.power_cap_w > remaining_power:
            floored.append(i)
            continue
        served.append(i)
        remaining_bw -= bw
        if remaining_power is not None:
            remaining_power -= scenario.power_cap_w

    served.sort()
    split = allocate_compute_dp(
        [scenario.ues[i].weight for i in served],
        [curves[i] for i in served],
        compute_total,
    )
    total = sum(
        scenario.ues[i].weight * math.log(max(curves[i].value(w), LOG_UTILITY_FLOOR))
        for i, w in zip(served, split)
    )
    total += sum(scenario.ues[i].weight * math.log(LOG_UTILITY_FLOOR) for i in floored)
    return total


def _ensure_curves(scenario: Scenario, curves: Sequence[UtilityCurve] | None) -> Sequence[UtilityCurve]:
    if curves is not None:
        return curves
    total_units = sum(en.compute_units for en in scenario.ens)
    return _build_curves(scenario, total_units)


def lower_bound(scenario: Scenario, *, _curves: Sequence[UtilityCurve] | None = None) -> float:
    """Bound from pooling capacities within each exact security level.

    A level that has users but no edge node contributes floor utilities and
    emits a warning.  Grouping both restricts (exact-level matching) and
    relaxes (pooled capacity), so no ordering against the solver objective is
    asserted.
    """
    if not scenario.ues:
        return 0.0
    curves = _ensure_curves(scenario, _curves)
    total = 0.0
    for level in sorted({ue.security_level for ue in scenario.ues}):
        users = [i for i, ue in enumerate(scenario.ues) if ue.security_level == level]
        nodes = [en for en in scenario.ens if en.security_level == level]
        if not nodes:
            warnings.warn(
                f"security level {level} has users but no edge node; floor utilities used",
                RuntimeWarning,
                stacklevel=2,
            )
            total += sum(
                scenario.ues[i].weight * math.log(LOG_UTILITY_FLOOR) for i in users
            )
            continue
        pools = [en.power_pool_w for en in nodes]
        power_total = None if any(p is None for p in pools) else float(sum(pools))
        total += _pooled_value(
            users,
            scenario,
            bandwidth_total=float(sum(en.bandwidth_hz for en in nodes)),
            compute_total=int(sum(en.compute_units for en in nodes)),
            power_total=power_total,
            curves=curves,
        )
    return total


def upper_bound(scenario: Scenario, *, _curves: Sequence[UtilityCurve] | None = None) -> float:
    """Bound from merging every edge node and dropping security and assignment."""
    if not scenario.ues:
        return 0.0
    curves = _ensure_curves(scenario, _curves)
    pools = [en.power_pool_w for en in scenario.ens]
    power_total = None if any(p is None for p in pools) or not pools else float(sum(pools))
    return _pooled_value(
        range(len(scenario.ues)),
        scenario,
        bandwidth_total=float(sum(en.bandwidth_hz for en in scenario.ens)),
        compute_total=int(sum(en.compute_units for en in scenario.ens)),
        power_total=power_total,
        curves=curves,
    )


def relative_gap(u_alg: float, u_lb: float) -> float:
    """Percentage excess of the solver objective over the grouped bound."""
    if u_lb == 0.0:
        raise UndefinedMetricError("relative gap undefined for a zero lower bound")
    return (u_alg - u_lb) / abs(u_lb) * 100.0


def fairness_check(
    utilities: Sequence[float],
    alternatives: Sequence[Sequence[float]],
    weights: Sequence[float],
) -> np.ndarray:
    """Weighted aggregate proportional change toward each alternative.

    The solution is proportionally fair with respect to the sampled
    alternatives when every aggregate is <= 1e-9.
    """
    u = np.asarray(utilities, dtype=float)
    w = np.asarray(weights, dtype=float)
    if u.shape != w.shape:
        raise ValueError("utilities and weights must align")
    if np.any(u <= 0.0):
        raise ValueError("all utilities must be > 0")
    out = []
    for alt in alternatives:
        a = np.asarray(alt, dtype=float)
        if a.shape != u.shape:
            raise ValueError("alternative utility vector has wrong length")
        out.append(float(np.sum(w * (a - u) / u)))
    return np.asarray(out)
