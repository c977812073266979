"""
Watching the constellation sweep the relay's visibility cone
============================================================

The default scenario puts a quasi-stationary relay platform 20 km above the
sub-satellite point on the +x axis and staggers ten low orbits so their ground
passes succeed each other. This script propagates the constellation for one
episode and prints, slot by slot (downsampled), which satellites clear the
10 degree elevation mask, then summarizes pass structure per satellite.
"""
import numpy as np

from sagin_aoi import SaginEnv, default_config

cfg = default_config()
env = SaginEnv(cfg, seed=0)

print(f"{cfg.num_satellites} satellites, altitudes "
      f"{cfg.altitude_range_m[0]/1e3:.0f}..{cfg.altitude_range_m[1]/1e3:.0f} km, "
      f"mask {cfg.min_elevation_deg:.0f} deg, {cfg.episode_slots} slots of "
      f"{cfg.slot_duration_s:.0f} s")
print()

# orbital periods straight from the elements
for i, el in enumerate(env.elements):
    print(f"  sat {i}: altitude {el.altitude/1e3:7.1f} km  period {el.period/60.0:6.1f} min  "
          f"inclination {np.degrees(el.inclination):5.1f} deg")
print()

# roll the episode with no selections; we only care about geometry here
visible_by_slot = []
for _ in range(cfg.episode_slots):
    visible_by_slot.append(env.visible)
    env.step(None)

# a strip chart in text: one row per 25 slots, one column per satellite
print("visibility (rows: every 25th slot, columns: satellites, '#' = visible)")
for t in range(0, cfg.episode_slots, 25):
    row = "".join("#" if i in visible_by_slot[t] else "." for i in range(cfg.num_satellites))
    print(f"  t={t:4d}  {row}")
print()

counts = np.array([len(v) for v in visible_by_slot])
print(f"visible per slot: mean {counts.mean():.2f}, min {counts.min()}, max {counts.max()}")

# contiguous visibility runs = passes
for i in range(cfg.num_satellites):
    mask = np.array([i in v for v in visible_by_slot])
    runs = []
    in_run = False
    begin = 0
    for t, vis in enumerate(mask):
        if vis and not in_run:
            begin, in_run = t, True
        elif not vis and in_run:
            runs.append((begin, t - 1))
            in_run = False
    if in_run:
        runs.append((begin, len(mask) - 1))
    spans = ", ".join(f"{a}..{b}" for a, b in runs) or "none"
    print(f"  sat {i}: {len(runs)} pass(es) at slots {spans}")
