"""Event streams with per-layer confidence scores.

A stream is an ordered collection of independent events; each event carries a
ground-truth label (critical or normal) and one confidence score per
classifier layer, every score strictly inside (0, 1).  Streams either come
from the synthetic generator below (a class-conditional logit random walk) or
from trace CSV files, so real classifier outputs can be plugged in unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

CRITICAL = "critical"
NORMAL = "normal"
LABELS = (CRITICAL, NORMAL)

# Scores exactly 0 or 1 would make strict threshold comparisons ambiguous;
# generator output is clamped just inside the open interval.
_CONF_CLAMP = 1e-12


class TraceParseError(ValueError):
    """Malformed trace CSV content; carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class LayerLogits:
    """Raw two-class outputs of one classifier layer for one event."""

    critical_logit: float
    normal_logit: float

    def __post_init__(self):
        if not (math.isfinite(self.critical_logit) and math.isfinite(self.normal_logit)):
            raise ValueError("logits must be finite")


@dataclass(frozen=True)
class ConfidenceTrace:
    """One event: ground-truth label plus per-layer critical-class confidences."""

    event_id: int
    true_label: str
    confidences: tuple[float, ...]

    def __post_init__(self):
        if self.true_label not in LABELS:
            raise ValueError(f"unknown label {self.true_label!r}")
        object.__setattr__(self, "confidences", tuple(float(c) for c in self.confidences))
        if len(self.confidences) < 1:
            raise ValueError("trace needs at least one layer")
        for c in self.confidences:
            if not 0.0 < c < 1.0:
                raise ValueError(f"confidence {c!r} outside open interval (0, 1)")

    @property
    def is_critical(self) -> bool:
        return self.true_label == CRITICAL


@dataclass(frozen=True)
class EventStream:
    """Ordered events sharing a common layer count; event ids are unique."""

    traces: tuple[ConfidenceTrace, ...]
    layer_count: int

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        seen = set()
        for t in self.traces:
            if len(t.confidences) != self.layer_count:
                raise ValueError(
                    f"event {t.event_id} has {len(t.confidences)} layers, expected {self.layer_count}"
                )
            if t.event_id in seen:
                raise ValueError(f"duplicate event_id {t.event_id}")
            seen.add(t.event_id)

    def __len__(self) -> int:
        return len(self.traces)

    def to_matrix(self) -> np.ndarray:
        """Confidence scores as an (events, layers) float array."""
        if not self.traces:
            return np.empty((0, self.layer_count), dtype=float)
        return np.array([t.confidences for t in self.traces], dtype=float)

    def critical_mask(self) -> np.ndarray:
        return np.array([t.is_critical for t in self.traces], dtype=bool)


@dataclass(frozen=True)
class GeneratorParams:
    """Synthetic stream generator settings.

    Per event, the critical-vs-normal logit difference follows a random walk:
    each layer adds a class-dependent drift plus Gaussian noise, so deeper
    layers tend to be more confident about the true class.
    """

    layer_count: int
    critical_prior: float
    critical_drift: float
    normal_drift: float
    noise_std: float
    seed: int

    def __post_init__(self):
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        if not 0.0 <= self.critical_prior <= 1.0:
            raise ValueError("critical_prior must be in [0, 1]")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be >= 0")


class StreamStats(NamedTuple):
    total: int
    critical: int
    normal: int


def confidence_from_logits(logits: LayerLogits) -> float:
    """Two-class softmax probability of the critical class.

    Computed with the max logit subtracted first so large magnitudes cannot
    overflow the exponentials.
    """
    m = max(logits.critical_logit, logits.normal_logit)
    e_crit = math.exp(logits.critical_logit - m)
    e_norm = math.exp(logits.normal_logit - m)
    return e_crit / (e_crit + e_norm)


def generate_stream(params: GeneratorParams, count: int) -> EventStream:
    """Draw `count` synthetic events; identical params and seed reproduce the stream exactly."""
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(params.seed)
    traces = []
    for event_id in range(count):
        critical = rng.random() < params.critical_prior
        drift = params.critical_drift if critical else params.normal_drift
        steps = drift + params.noise_std * rng.standard_normal(params.layer_count)
        logit = 0.0
        confs = []
        for step in steps:
            logit += step
            c = confidence_from_logits(LayerLogits(logit, 0.0))
            confs.append(min(max(c, _CONF_CLAMP), 1.0 - _CONF_CLAMP))
        traces.append(
            ConfidenceTrace(
                event_id=event_id,
                true_label=CRITICAL if critical else NORMAL,
                confidences=tuple(confs),
            )
        )
    return EventStream(traces=tuple(traces), layer_count=params.layer_count)


def stream_stats(stream: EventStream) -> StreamStats:
    """Event counts: total, critical, normal.  total == critical + normal always."""
    critical = sum(1 for t in stream.traces if t.is_critical)
    return StreamStats(len(stream.traces), critical, len(stream.traces) - critical)


def _header(layer_count: int) -> str:
    cols = ",".join(f"c_{q}" for q in range(1, layer_count + 1))
    return f"event_id,label,{cols}"


def save_stream(stream: EventStream, path: str | Path) -> None:
    """Write the trace CSV (UTF-8, LF endings, 12 significant digits)."""
    lines = [_header(stream.layer_count)]
    for t in stream.traces:
        confs = ",".join(format(c, ".12g") for c in t.confidences)
        lines.append(f"{t.event_id},{t.true_label},{confs}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_stream(path: str | Path) -> EventStream:
    """Parse a trace CSV; any defect raises TraceParseError naming the line."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise TraceParseError("empty file, expected a header row", line=1)
    head = lines[0].split(",")
    if len(head) < 3 or head[0] != "event_id" or head[1] != "label":
        raise TraceParseError("header must be event_id,label,c_1,...,c_L", line=1)
    layer_count = len(head) - 2
    for q, name in enumerate(head[2:], start=1):
        if name != f"c_{q}":
            raise TraceParseError(f"confidence column {q} must be named c_{q}, got {name!r}", line=1)

    traces = []
    seen: set[int] = set()
    for lineno, row in enumerate(lines[1:], start=2):
        parts = row.split(",")
        if len(parts) != layer_count + 2:
            raise TraceParseError(
                f"expected {layer_count + 2} fields, got {len(parts)}", line=lineno
            )
        try:
            event_id = int(parts[0])
        except ValueError:
            raise TraceParseError(f"bad event_id {parts[0]!r}", line=lineno) from None
        if event_id in seen:
            raise TraceParseError(f"duplicate event_id {event_id}", line=lineno)
        seen.add(event_id)
        label = parts[1]
        if label not in LABELS:
            raise TraceParseError(f"unknown label {label!r}", line=lineno)
        confs = []
        for raw in parts[2:]:
            try:
                value = float(raw)
            except ValueError:
                raise TraceParseError(f"bad confidence {raw!r}", line=lineno) from None
            if not math.isfinite(value) or not 0.0 < value < 1.0:
                raise TraceParseError(
                    f"confidence {raw} outside open interval (0, 1)", line=lineno
                )
            confs.append(value)
        traces.append(ConfidenceTrace(event_id=event_id, true_label=label, confidences=tuple(confs)))
    return EventStream(traces=tuple(traces), layer_count=layer_count)
