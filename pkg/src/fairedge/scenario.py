"""Scenario documents, random scenario generation, and result bundles.

A scenario document is JSON with explicit unit suffixes (Hz, W, bits,
seconds, joules).  Each user carries exactly one trace source: a CSV file
(resolved relative to the document) or generator settings.  Solver outputs
are persisted as schema-versioned, digest-stamped JSON bundles.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from jsonschema import Draft202012Validator

from .exitpolicy import ConfusionCounts, MetricsReport, ThresholdPair
from .fairopt import (
    AllocationPlan,
    ENProfile,
    Scenario,
    SolveReport,
    UEProfile,
    UserDiagnostics,
)
from .link import ChannelState, EnergyModel, LinkAllocation, OffloadDemand, secrecy_rate
from .trace import GeneratorParams, generate_stream, load_stream

BUNDLE_SCHEMA_VERSION = 1


class ScenarioParseError(ValueError):
    """Invalid scenario document; the message names the offending field path."""

    def __init__(self, message: str, path: str = ""):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class BundleSchemaError(ValueError):
    """Result bundle does not match the supported schema or version."""


@dataclass(frozen=True)
class GeneratorSpec:
    params: GeneratorParams
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")


@dataclass(frozen=True)
class UEConfig:
    weight: float
    security_level: int
    feature_size_bits: float
    deadline_s: float
    channel: ChannelState
    joules_per_access: float
    access_counts: tuple[int, ...]
    trace_file: str | None = None
    generator: GeneratorSpec | None = None

    def __post_init__(self):
        if (self.trace_file is None) == (self.generator is None):
            raise ValueError("exactly one of trace_file or generator is required")


@dataclass(frozen=True)
class ENConfig:
    bandwidth_hz: float
    compute_units: int
    security_level: int
    power_pool_w: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated mirror of a scenario document."""

    security_levels: int
    bandwidth_cap_hz: float
    power_cap_w: float
    ues: tuple[UEConfig, ...]
    ens: tuple[ENConfig, ...]
    seed: int | None = None


def _expect(mapping: Any, key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise ScenarioParseError("expected an object", path)
    if key not in mapping:
        raise ScenarioParseError("missing required field", f"{path}.{key}" if path else key)
    return mapping[key]


def _number(mapping: dict, key: str, path: str, minimum: float | None = None,
            exclusive: bool = False) -> float:
    value = _expect(mapping, key, path)
    field = f"{path}.{key}" if path else key
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"expected a number, got {value!r}", field)
    value = float(value)
    if minimum is not None:
        if exclusive and not value > minimum:
            raise ScenarioParseError(f"must be > {minimum}, got {value}", field)
        if not exclusive and not value >= minimum:
            raise ScenarioParseError(f"must be >= {minimum}, got {value}", field)
    return value


def _integer(mapping: dict, key: str, path: str, minimum: int | None = None) -> int:
    value = _expect(mapping, key, path)
    field = f"{path}.{key}" if path else key
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"expected an integer, got {value!r}", field)
    if minimum is not None and value < minimum:
        raise ScenarioParseError(f"must be >= {minimum}, got {value}", field)
    return value


def _parse_channel(doc: Any, path: str) -> ChannelState:
    gain = _number(doc, "gain", path, minimum=0.0)
    noise = _number(doc, "noise_psd_w_per_hz", path, minimum=0.0, exclusive=True)
    eav_gain = _number(doc, "eavesdropper_gain", path, minimum=0.0)
    eav_noise = _number(doc, "eavesdropper_noise_psd_w_per_hz", path, minimum=0.0, exclusive=True)
    return ChannelState(
        gain=gain,
        noise_psd=noise,
        eavesdropper_gain=eav_gain,
        eavesdropper_noise_psd=eav_noise,
    )


def _parse_generator(doc: Any, path: str) -> GeneratorSpec:
    params = GeneratorParams(
        layer_count=_integer(doc, "layer_count", path, minimum=1),
        critical_prior=_number(doc, "critical_prior", path, minimum=0.0),
        critical_drift=_number(doc, "critical_drift", path),
        normal_drift=_number(doc, "normal_drift", path),
        noise_std=_number(doc, "noise_std", path, minimum=0.0),
        seed=_integer(doc, "seed", path, minimum=0),
    )
    if params.critical_prior > 1.0:
        raise ScenarioParseError("must be <= 1", f"{path}.critical_prior")
    return GeneratorSpec(params=params, count=_integer(doc, "count", path, minimum=0))


def _parse_ue(doc: Any, security_levels: int, path: str) -> UEConfig:
    weight = _number(doc, "weight", path, minimum=0.0, exclusive=True)
    level = _integer(doc, "security_level", path, minimum=1)
    if level > security_levels:
        raise ScenarioParseError(
            f"must be <= security_levels ({security_levels})", f"{path}.security_level"
        )
    feature_bits = _number(doc, "feature_size_bits", path, minimum=0.0, exclusive=True)
    deadline = _number(doc, "deadline_s", path, minimum=0.0, exclusive=True)
    channel = _parse_channel(_expect(doc, "channel", path), f"{path}.channel")
    energy_doc = _expect(doc, "energy", path)
    gamma = _number(energy_doc, "joules_per_access", f"{path}.energy", minimum=0.0)
    counts_raw = _expect(energy_doc, "access_counts", f"{path}.energy")
    if not isinstance(counts_raw, list) or any(
        isinstance(c, bool) or not isinstance(c, int) or c < 0 for c in counts_raw
    ):
        raise ScenarioParseError(
            "expected a list of non-negative integers", f"{path}.energy.access_counts"
        )
    trace_doc = _expect(doc, "trace", path)
    if not isinstance(trace_doc, dict) or len(trace_doc) != 1:
        raise ScenarioParseError(
            "expected exactly one of 'file' or 'generator'", f"{path}.trace"
        )
    trace_file = None
    generator = None
    if "file" in trace_doc:
        if not isinstance(trace_doc["file"], str) or not trace_doc["file"]:
            raise ScenarioParseError("expected a file path string", f"{path}.trace.file")
        trace_file = trace_doc["file"]
    elif "generator" in trace_doc:
        generator = _parse_generator(trace_doc["generator"], f"{path}.trace.generator")
    else:
        raise ScenarioParseError(
            "expected exactly one of 'file' or 'generator'", f"{path}.trace"
        )
    return UEConfig(
        weight=weight,
        security_level=level,
        feature_size_bits=feature_bits,
        deadline_s=deadline,
        channel=channel,
        joules_per_access=gamma,
        access_counts=tuple(counts_raw),
        trace_file=trace_file,
        generator=generator,
    )


def _parse_en(doc: Any, security_levels: int, path: str) -> ENConfig:
    bandwidth = _number(doc, "bandwidth_hz", path, minimum=0.0)
    units = _integer(doc, "compute_units", path, minimum=0)
    level = _integer(doc, "security_level", path, minimum=1)
    if level > security_levels:
        raise ScenarioParseError(
            f"must be <= security_levels ({security_levels})", f"{path}.security_level"
        )
    pool = None
    if "power_pool_w" in doc and doc["power_pool_w"] is not None:
        pool = _number(doc, "power_pool_w", path, minimum=0.0)
    return ENConfig(
        bandwidth_hz=bandwidth, compute_units=units, security_level=level, power_pool_w=pool
    )


def parse_document(document: str | dict) -> ScenarioConfig:
    """Validate a scenario document (JSON text or parsed object) completely.

    Any defect raises ScenarioParseError naming the field path; a returned
    config is fully valid.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise ScenarioParseError(f"invalid JSON: {err}") from None
    if not isinstance(document, dict):
        raise ScenarioParseError("document must be a JSON object")

    levels = _integer(document, "security_levels", "", minimum=1)
    bandwidth_cap = _number(document, "bandwidth_cap_hz", "", minimum=0.0)
    power_cap = _number(document, "power_cap_w", "", minimum=0.0)
    seed = None
    if "seed" in document and document["seed"] is not None:
        seed = _integer(document, "seed", "", minimum=0)

    ues_doc = _expect(document, "ues", "")
    ens_doc = _expect(document, "ens", "")
    if not isinstance(ues_doc, list) or not ues_doc:
        raise ScenarioParseError("expected a non-empty list", "ues")
    if not isinstance(ens_doc, list) or not ens_doc:
        raise ScenarioParseError("expected a non-empty list", "ens")

    try:
        ues = tuple(_parse_ue(doc, levels, f"ues[{i}]") for i, doc in enumerate(ues_doc))
        ens = tuple(_parse_en(doc, levels, f"ens[{i}]") for i, doc in enumerate(ens_doc))
    except ValueError as err:
        if isinstance(err, ScenarioParseError):
            raise
        raise ScenarioParseError(str(err)) from None

    return ScenarioConfig(
        security_levels=levels,
        bandwidth_cap_hz=bandwidth_cap,
        power_cap_w=power_cap,
        ues=ues,
        ens=ens,
        seed=seed,
    )


def serialize_document(config: ScenarioConfig) -> dict:
    """Canonical document for a config; parse(serialize(c)) == c."""
    doc: dict[str, Any] = {
        "security_levels": config.security_levels,
        "bandwidth_cap_hz": config.bandwidth_cap_hz,
        "power_cap_w": config.power_cap_w,
        "ues": [],
        "ens": [],
    }
    if config.seed is not None:
        doc["seed"] = config.seed
    for ue in config.ues:
        entry: dict[str, Any] = {
            "weight": ue.weight,
            "security_level": ue.security_level,
            "feature_size_bits": ue.feature_size_bits,
            "deadline_s": ue.deadline_s,
            "channel": {
                "gain": ue.channel.gain,
                "noise_psd_w_per_hz": ue.channel.noise_psd,
                "eavesdropper_gain": ue.channel.eavesdropper_gain,
                "eavesdropper_noise_psd_w_per_hz": ue.channel.eavesdropper_noise_psd,
            },
            "energy": {
                "joules_per_access": ue.joules_per_access,
                "access_counts": list(ue.access_counts),
            },
        }
        if ue.trace_file is not None:
            entry["trace"] = {"file": ue.trace_file}
        else:
            spec = ue.generator
            entry["trace"] = {
                "generator": {
                    "layer_count": spec.params.layer_count,
                    "critical_prior": spec.params.critical_prior,
                    "critical_drift": spec.params.critical_drift,
                    "normal_drift": spec.params.normal_drift,
                    "noise_std": spec.params.noise_std,
                    "seed": spec.params.seed,
                    "count": spec.count,
                }
            }
        doc["ues"].append(entry)
    for en in config.ens:
        entry = {
            "bandwidth_hz": en.bandwidth_hz,
            "compute_units": en.compute_units,
            "security_level": en.security_level,
        }
        if en.power_pool_w is not None:
            entry["power_pool_w"] = en.power_pool_w
        doc["ens"].append(entry)
    return doc


def realize(config: ScenarioConfig, base_dir: str | Path = ".") -> Scenario:
    """Materialize profiles and event streams from a validated config."""
    base = Path(base_dir)
    ues = []
    for ue in config.ues:
        if ue.trace_file is not None:
            stream = load_stream(base / ue.trace_file)
        else:
            stream = generate_stream(ue.generator.params, ue.generator.count)
        ues.append(
            UEProfile(
                weight=ue.weight,
                security_level=ue.security_level,
                demand=OffloadDemand(
                    feature_size_bits=ue.feature_size_bits, deadline_s=ue.deadline_s
                ),
                channel=ue.channel,
                energy=EnergyModel(
                    joules_per_access=ue.joules_per_access, access_counts=ue.access_counts
                ),
                stream=stream,
            )
        )
    ens = [
        ENProfile(
            bandwidth_hz=en.bandwidth_hz,
            compute_units=en.compute_units,
            security_level=en.security_level,
            power_pool_w=en.power_pool_w,
        )
        for en in config.ens
    ]
    return Scenario(
        ues=tuple(ues),
        ens=tuple(ens),
        bandwidth_cap_hz=config.bandwidth_cap_hz,
        power_cap_w=config.power_cap_w,
        security_levels=config.security_levels,
    )


def parse_scenario(document: str | dict, base_dir: str | Path = ".") -> Scenario:
    """Parse and materialize in one step."""
    return realize(parse_document(document), base_dir=base_dir)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario document file; trace files resolve relative to it."""
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)


def random_scenario_config(
    n_ues: int,
    n_ens: int,
    seed: int,
    *,
    security_levels: int = 2,
    advantage_probability: float = 1.0,
    event_count_range: tuple[int, int] = (30, 60),
    layer_counts: Sequence[int] = (3, 4),
    compute_range: tuple[int, int] = (3, 10),
    power_pool_probability: float = 0.0,
) -> ScenarioConfig:
    """Deterministic random scenario; defaults are calibrated to be solvable.

    Each user's channel satisfies the secrecy-advantage condition with the
    given probability; per-user generator sub-seeds are redrawn until the
    stream contains both classes, keeping rate metrics well defined.
    """
    if n_ues < 1 or n_ens < 1:
        raise ValueError("n_ues and n_ens must be >= 1")
    if not 0.0 <= advantage_probability <= 1.0:
        raise ValueError("advantage_probability must be in [0, 1]")
    rng = np.random.default_rng(seed)
    noise_psd = 1e-13

    ues = []
    for _ in range(n_ues):
        gain = 10.0 ** rng.uniform(-6.0, -5.0)
        if rng.random() < advantage_probability:
            eav_gain = gain * rng.uniform(0.05, 0.5)
        else:
            eav_gain = gain * rng.uniform(1.0, 2.0)
        channel = ChannelState(
            gain=gain,
            noise_psd=noise_psd,
            eavesdropper_gain=eav_gain,
            eavesdropper_noise_psd=noise_psd,
        )
        count = int(rng.integers(event_count_range[0], event_count_range[1] + 1))
        base = dict(
            layer_count=int(rng.choice(list(layer_counts))),
            critical_prior=float(rng.uniform(0.25, 0.5)),
            critical_drift=float(rng.uniform(0.5, 1.0)),
            normal_drift=-float(rng.uniform(0.5, 1.0)),
            noise_std=float(rng.uniform(0.3, 0.7)),
        )
        params = None
        while params is None:
            candidate = GeneratorParams(seed=int(rng.integers(0, 2**31)), **base)
            stats_stream = generate_stream(candidate, count)
            labels = {t.true_label for t in stats_stream.traces}
            if len(labels) == 2:
                params = candidate
        ues.append(
            UEConfig(
                weight=float(rng.uniform(0.5, 2.0)),
                security_level=int(rng.integers(1, security_levels + 1)),
                feature_size_bits=float(rng.uniform(1e4, 4e4)),
                deadline_s=float(rng.uniform(0.2, 0.8)),
                channel=channel,
                joules_per_access=float(rng.uniform(1e-10, 1e-9)),
                access_counts=tuple(
                    int(rng.integers(10_000, 1_000_000)) for _ in range(int(rng.integers(2, 5)))
                ),
                generator=GeneratorSpec(params=params, count=count),
            )
        )

    ens = []
    for j in range(n_ens):
        pool = None
        if rng.random() < power_pool_probability:
            pool = float(rng.uniform(0.2, 1.0))
        ens.append(
            ENConfig(
                bandwidth_hz=float(rng.uniform(4e6, 8e6)),
                compute_units=int(rng.integers(compute_range[0], compute_range[1] + 1)),
                # The first node always offers the strictest clearance so no
                # user is blocked by security alone.
                security_level=1 if j == 0 else int(rng.integers(1, security_levels + 1)),
                power_pool_w=pool,
            )
        )

    return ScenarioConfig(
        security_levels=security_levels,
        bandwidth_cap_hz=2e6,
        power_cap_w=0.1,
        ues=tuple(ues),
        ens=tuple(ens),
        seed=seed,
    )


def random_scenario(n_ues: int, n_ens: int, seed: int, **kwargs) -> Scenario:
    """Materialized random scenario; see random_scenario_config for knobs."""
    return realize(random_scenario_config(n_ues, n_ens, seed, **kwargs))


def max_secrecy_rate(scenario: Scenario, user: int) -> float:
    """Secure rate of one user's link at the per-pair bandwidth and power caps."""
    ue = scenario.ues[user]
    alloc = LinkAllocation(
        bandwidth_hz=scenario.bandwidth_cap_hz, power_w=scenario.power_cap_w
    )
    return secrecy_rate(alloc, ue.channel)


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_digest(config_doc: dict) -> str:
    """SHA-256 over the canonical JSON form of a scenario document."""
    return hashlib.sha256(canonical_json(config_doc).encode("utf-8")).hexdigest()


_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}

BUNDLE_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "config", "config_digest", "plan", "report", "metrics"],
    "properties": {
        "schema_version": {"type": "integer"},
        "config": {"type": "object"},
        "config_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "created_at": {"type": "string"},
        "plan": {
            "type": "object",
            "required": ["assignment", "bandwidth_hz", "power_w", "compute_units", "thresholds"],
            "properties": {
                "assignment": _MATRIX,
                "bandwidth_hz": _MATRIX,
                "power_w": _MATRIX,
                "compute_units": _MATRIX,
                "thresholds": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["lower", "upper"],
                        "properties": {
                            "lower": {"type": "number"},
                            "upper": {"type": "number"},
                        },
                    },
                },
            },
        },
        "report": {
            "type": "object",
            "required": [
                "objective",
                "per_user_utility",
                "iterations",
                "feasible",
                "lower_bound",
                "upper_bound",
                "relative_gap_pct",
                "objective_history",
                "diagnostics",
            ],
            "properties": {
                "objective": {"type": "number"},
                "per_user_utility": {"type": "array", "items": {"type": "number"}},
                "iterations": {"type": "integer"},
                "feasible": {"type": "boolean"},
                "lower_bound": {"type": "number"},
                "upper_bound": {"type": "number"},
                "relative_gap_pct": {"type": ["number", "null"]},
                "objective_history": {"type": "array", "items": {"type": "number"}},
                "diagnostics": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["user", "local_energy_j", "offload_time_s", "offload_energy_j"],
                    },
                },
            },
        },
        "metrics": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["tp", "fp", "tn", "fn", "car", "fpr", "fnr", "ofr", "utility"],
                "properties": {
                    "tp": {"type": "integer"},
                    "fp": {"type": "integer"},
                    "tn": {"type": "integer"},
                    "fn": {"type": "integer"},
                    "car": {"type": ["number", "null"]},
                    "fpr": {"type": ["number", "null"]},
                    "fnr": {"type": ["number", "null"]},
                    "ofr": {"type": ["number", "null"]},
                    "utility": {"type": ["number", "null"]},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ResultBundle:
    """Solver output plus the config that produced it, digest-stamped."""

    config: dict
    config_digest: str
    plan: AllocationPlan
    report: SolveReport
    counts: tuple[ConfusionCounts, ...]
    metrics: tuple[MetricsReport, ...]
    created_at: str | None = None
    schema_version: int = BUNDLE_SCHEMA_VERSION


def build_bundle(
    config_doc: dict,
    plan: AllocationPlan,
    report: SolveReport,
    counts: Sequence[ConfusionCounts],
    metrics: Sequence[MetricsReport],
    created_at: str | None = None,
) -> ResultBundle:
    return ResultBundle(
        config=config_doc,
        config_digest=config_digest(config_doc),
        plan=plan,
        report=report,
        counts=tuple(counts),
        metrics=tuple(metrics),
        created_at=created_at,
    )


def bundle_to_dict(bundle: ResultBundle) -> dict:
    payload: dict[str, Any] = {
        "schema_version": bundle.schema_version,
        "config": bundle.config,
        "config_digest": bundle.config_digest,
        "plan": {
            "assignment": bundle.plan.assignment.astype(int).tolist(),
            "bandwidth_hz": bundle.plan.bandwidth_hz.tolist(),
            "power_w": bundle.plan.power_w.tolist(),
            "compute_units": bundle.plan.compute_units.astype(int).tolist(),
            "thresholds": [
                {"lower": thr.lower, "upper": thr.upper} for thr in bundle.plan.thresholds
            ],
        },
        "report": {
            "objective": bundle.report.objective,
            "per_user_utility": list(bundle.report.per_user_utility),
            "iterations": bundle.report.iterations,
            "feasible": bundle.report.feasible,
            "lower_bound": bundle.report.lower_bound,
            "upper_bound": bundle.report.upper_bound,
            "relative_gap_pct": bundle.report.relative_gap_pct,
            "objective_history": list(bundle.report.objective_history),
            "diagnostics": [
                {
                    "user": d.user,
                    "local_energy_j": d.local_energy_j,
                    "offload_time_s": d.offload_time_s,
                    "offload_energy_j": d.offload_energy_j,
                }
                for d in bundle.report.diagnostics
            ],
        },
        "metrics": [
            {
                "tp": c.tp,
                "fp": c.fp,
                "tn": c.tn,
                "fn": c.fn,
                "car": m.car,
                "fpr": m.fpr,
                "fnr": m.fnr,
                "ofr": m.ofr,
                "utility": m.utility,
            }
            for c, m in zip(bundle.counts, bundle.metrics)
        ],
    }
    if bundle.created_at is not None:
        payload["created_at"] = bundle.created_at
    return payload


def bundle_from_dict(payload: dict, verify_digest: bool = True) -> ResultBundle:
    version = payload.get("schema_version")
    if version != BUNDLE_SCHEMA_VERSION:
        raise BundleSchemaError(
            f"unsupported bundle schema version {version!r}, expected {BUNDLE_SCHEMA_VERSION}"
        )
    errors = sorted(Draft202012Validator(BUNDLE_SCHEMA).iter_errors(payload), key=str)
    if errors:
        raise BundleSchemaError(f"bundle does not match the schema: {errors[0].message}")
    if verify_digest and config_digest(payload["config"]) != payload["config_digest"]:
        warnings.warn(
            "bundle config digest mismatch; the config or digest was modified",
            RuntimeWarning,
            stacklevel=2,
        )
    plan_doc = payload["plan"]
    plan = AllocationPlan(
        assignment=np.asarray(plan_doc["assignment"], dtype=int),
        bandwidth_hz=np.asarray(plan_doc["bandwidth_hz"], dtype=float),
        power_w=np.asarray(plan_doc["power_w"], dtype=float),
        compute_units=np.asarray(plan_doc["compute_units"], dtype=int),
        thresholds=tuple(
            ThresholdPair(t["lower"], t["upper"]) for t in plan_doc["thresholds"]
        ),
    )
    rep = payload["report"]
    report = SolveReport(
        objective=rep["objective"],
        per_user_utility=tuple(rep["per_user_utility"]),
        iterations=rep["iterations"],
        feasible=rep["feasible"],
        lower_bound=rep["lower_bound"],
        upper_bound=rep["upper_bound"],
        relative_gap_pct=rep["relative_gap_pct"],
        objective_history=tuple(rep["objective_history"]),
        diagnostics=tuple(
            UserDiagnostics(
                user=d["user"],
                local_energy_j=d["local_energy_j"],
                offload_time_s=d["offload_time_s"],
                offload_energy_j=d["offload_energy_j"],
            )
            for d in rep["diagnostics"]
        ),
    )
    counts = tuple(
        ConfusionCounts(tp=m["tp"], fp=m["fp"], tn=m["tn"], fn=m["fn"])
        for m in payload["metrics"]
    )
    metrics = tuple(
        MetricsReport(car=m["car"], fpr=m["fpr"], fnr=m["fnr"], ofr=m["ofr"], utility=m["utility"])
        for m in payload["metrics"]
    )
    return ResultBundle(
        config=payload["config"],
        config_digest=payload["config_digest"],
        plan=plan,
        report=report,
        counts=counts,
        metrics=metrics,
        created_at=payload.get("created_at"),
    )


def write_bundle(bundle: ResultBundle, path: str | Path) -> None:
    """Persist as deterministic JSON (sorted keys, stable float repr)."""
    text = json.dumps(bundle_to_dict(bundle), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def read_bundle(path: str | Path) -> ResultBundle:
    """Load and validate a bundle; digest tampering emits a warning."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise BundleSchemaError(f"invalid bundle JSON: {err}") from None
    return bundle_from_dict(payload)
