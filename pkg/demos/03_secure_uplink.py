"""Walkthrough: secure uplink rates, offload cost, and deadline feasibility.

An eavesdropper observing the same band caps the usable rate at the excess
of the legitimate Shannon rate over the eavesdropper's; a zero excess means
the link is refused.  Deadline feasibility reduces to the smallest bandwidth
whose secure rate moves the feature payload in time.

Run:  python3 demos/03_secure_uplink.py
"""

from fairedge import (
    ChannelState,
    EnergyModel,
    InsecureLinkError,
    LinkAllocation,
    OffloadDemand,
    eavesdropper_rate,
    local_inference_energy,
    min_bandwidth_for_deadline,
    offload_energy,
    offload_time,
    secrecy_rate,
    uplink_rate,
)

channel = ChannelState(
    gain=2e-6,
    noise_psd=1e-13,
    eavesdropper_gain=4e-7,
    eavesdropper_noise_psd=1e-13,
)

print("== rates vs bandwidth at 0.1 W ==")
print(f"{'bandwidth':>11} {'uplink':>12} {'eavesdropper':>13} {'secure':>12}")
for bandwidth in (1e4, 1e5, 5e5, 1e6, 2e6):
    alloc = LinkAllocation(bandwidth_hz=bandwidth, power_w=0.1)
    print(f"{bandwidth:>11.0f} {uplink_rate(alloc, channel):>12.0f} "
          f"{eavesdropper_rate(alloc, channel):>13.0f} {secrecy_rate(alloc, channel):>12.0f}")

demand = OffloadDemand(feature_size_bits=2e4, deadline_s=0.05)
needed = min_bandwidth_for_deadline(channel, power_w=0.1, demand=demand, max_bandwidth_hz=2e6)
alloc = LinkAllocation(bandwidth_hz=needed, power_w=0.1)
print(f"\nsmallest deadline-meeting bandwidth: {needed:,.0f} Hz")
print(f"  offload time  {offload_time(demand, alloc, channel)*1e3:.3f} ms "
      f"(deadline {demand.deadline_s*1e3:.0f} ms)")
print(f"  offload energy {offload_energy(demand, alloc, channel)*1e3:.3f} mJ per event")

local = EnergyModel(joules_per_access=1e-9, access_counts=(120_000, 240_000, 480_000))
print(f"  local inference energy {local_inference_energy(local)*1e3:.3f} mJ per event")

# A dominant eavesdropper makes every bandwidth insecure.
hostile = ChannelState(
    gain=1e-6, noise_psd=1e-13, eavesdropper_gain=2e-6, eavesdropper_noise_psd=1e-13
)
try:
    min_bandwidth_for_deadline(hostile, power_w=0.1, demand=demand, max_bandwidth_hz=2e6)
except InsecureLinkError as err:
    print(f"\nhostile channel refused: {err}")
