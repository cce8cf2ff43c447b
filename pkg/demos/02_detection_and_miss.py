#!/usr/bin/env python3
"""The sensor detection kernel and what a network fails to see.

A sensor detects best directly overhead (probability rho) and its
performance falls off with the squared distance; a network of sensors
misses a target only if every sensor misses.  The miss-probability
profile is the quantity every objective computation integrates against.

Run from the repository root:  python demos/02_detection_and_miss.py
"""

from pathlib import Path

import numpy as np

from voidplan import SensorModel, SensorNetwork, detection_prob, miss_prob

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = SensorModel(rho=0.95, sigma_l=0.05)

# One sensor: 95% overhead, essentially blind past half a kilometre.
for d in (0.0, 0.1, 0.25, 0.5, 1.0):
    p = detection_prob(model, 0.0, d)
    print(f"detection at {d:4.2f} km offset: {p:0.4f}")

# A small network: coverage multiplies, gaps remain between sensors.
net = SensorNetwork((4.0, 9.0, 9.4, 14.0), model)
s = np.linspace(0.0, 18.5, 1001)
miss = miss_prob(net, s)
print(f"\nnetwork {net.positions}")
print(f"deepest coverage (min miss): {miss.min():0.4f} "
      f"(two sensors near 9 km stack: 0.05 x lone sensor leftovers)")
print(f"uncovered corridor fraction (miss > 0.99): {(miss > 0.99).mean():0.2f}")

# Empty network misses everything, and adding sensors only ever helps.
empty = SensorNetwork((), model)
assert miss_prob(empty, 7.7) == 1.0
grown = empty
for a in (4.0, 9.0, 14.0):
    grown = grown.with_sensor(a)
    print(f"after sensor at {a:4.1f} km: mean miss over corridor = "
          f"{miss_prob(grown, s).mean():0.3f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.plot(s, miss, "k-", lw=1.2, label="network miss probability")
    for i, a in enumerate(net.positions):
        ax.axvline(a, color="C0", ls=":", lw=0.8,
                   label="sensor" if i == 0 else None)
    ax.set_xlabel("position (km)")
    ax.set_ylabel("P(all sensors miss)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(OUT / "02_miss_profile.png", dpi=120)
    print(f"\nplot written: {OUT / '02_miss_profile.png'}")
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
