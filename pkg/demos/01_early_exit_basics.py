"""Walkthrough: per-layer confidences, the first-crossing rule, and the five rates.

Run:  python3 demos/01_early_exit_basics.py
"""

from fairedge import (
    ConfidenceTrace,
    GeneratorParams,
    LayerLogits,
    ThresholdPair,
    classify,
    confidence_from_logits,
    evaluate,
    generate_stream,
    stream_stats,
)

# A confidence score is the two-class softmax of a layer's raw outputs.
print("== confidence scores ==")
for crit, norm in [(0.0, 0.0), (1.0, 0.0), (-2.0, 1.5)]:
    c = confidence_from_logits(LayerLogits(crit, norm))
    print(f"  logits ({crit:+.1f}, {norm:+.1f}) -> confidence {c:.4f}")

# The dual-threshold rule scans layers in order: at or below the lower
# threshold exits as normal, at or above the upper exits as critical
# (and the event is offloaded), otherwise the next layer decides; an event
# that never leaves the band is conservatively normal at the last layer.
print("\n== first-crossing decisions ==")
thr = ThresholdPair(lower=0.2, upper=0.8)
for confs in [(0.9, 0.5, 0.5), (0.5, 0.1, 0.9), (0.5, 0.5, 0.5)]:
    trace = ConfidenceTrace(0, "critical", confs)
    d = classify(trace, thr)
    print(f"  scores {confs} -> {d.predicted_label} at layer {d.exit_layer}"
          f"{' (offloaded)' if d.offloaded else ''}")

# Synthetic streams follow a class-conditional logit random walk: critical
# events drift toward confidence 1, normal events toward 0.
params = GeneratorParams(
    layer_count=4,
    critical_prior=0.35,
    critical_drift=0.8,
    normal_drift=-0.8,
    noise_std=0.5,
    seed=7,
)
stream = generate_stream(params, 200)
stats = stream_stats(stream)
print(f"\n== generated stream: {stats.total} events "
      f"({stats.critical} critical / {stats.normal} normal) ==")

print(f"{'lower':>7} {'upper':>7} {'CAR':>7} {'FPR':>7} {'FNR':>7} {'OFR':>7} {'utility':>8}")
for lower, upper in [(0.1, 0.9), (0.2, 0.8), (0.3, 0.7), (0.4, 0.6)]:
    counts, m = evaluate(stream, ThresholdPair(lower, upper))
    print(f"{lower:>7.2f} {upper:>7.2f} {m.car:>7.3f} {m.fpr:>7.3f} "
          f"{m.fnr:>7.3f} {m.ofr:>7.3f} {m.utility:>8.3f}")

print("\nTighter bands offload more (higher OFR) and catch more critical "
      "events (higher utility); the allocation problem trades this against "
      "edge-node compute budgets.")
