#!/usr/bin/env python3
"""Error bounds for the two approximations, checked against sampling.

For any non-negative count X with mean mu and variance sigma2, the
Jensen-bound error J sits in [0, J_up] and the corrected-approximation
error in [-exp(-mu) sigma2 / 2, sigma2 * tail_margin(mu) / mu^2].  The
corrected window is provably the narrower one; this demo sweeps the
margins, then measures actual gaps on a synthetic field and watches them
land inside their windows.

Run from the repository root:  python demos/04_error_bounds.py
"""

from pathlib import Path

import numpy as np

from voidplan import (
    GridDomain,
    MaternKernel,
    SensorModel,
    SensorNetwork,
    corrected_gap_bounds,
    dominance_check,
    jensen_gap_upper,
    measure_gaps,
    synthesize_field,
    tail_margin,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# ---------------------------------------------------------------------------
# Bound geometry: the corrected window is strictly inside the Jensen one.
# ---------------------------------------------------------------------------
mu = np.linspace(0.01, 8.0, 400)
sigma2 = 1.0
j_up = jensen_gap_upper(mu, sigma2)
c_low, c_up = corrected_gap_bounds(mu, sigma2)

print("per unit variance, worst-case error windows:")
for m in (0.25, 1.0, 4.0):
    i = np.searchsorted(mu, m)
    print(f"  mu={mu[i]:.2f}: jensen [0, {j_up[i]:.4f}]  "
          f"corrected [{c_low[i]:.4f}, {c_up[i]:.4f}]")

report = dominance_check(mu, sigma2)
print(f"\ndominance margins positive everywhere: {bool(report.both_ok.all())}")
print(f"tail margin at mu=1: {tail_margin(1.0):.6f} "
      "(the corrected bound's numerator)")

# ---------------------------------------------------------------------------
# Measured gaps on a real field: Monte-Carlo vs the approximations.
# ---------------------------------------------------------------------------
domain = GridDomain(0.0, 18.5, 0.05)
field = synthesize_field(domain, MaternKernel(1.5, 1.5, 0.3), "trimodal")
model = SensorModel(0.95, 0.05)
net = SensorNetwork((3.1, 6.0, 9.1, 12.0, 15.0), model)

diag = measure_gaps(field, net, samples=20_000, mode="correlated", seed=5)
print(f"\nmeasured jensen gap:    {diag.measured_jensen_gap:+.5f}")
print(f"measured corrected gap: {diag.measured_corrected_gap:+.5f}")
print("with bounds at the sample moments of X "
      f"(mu={diag.sample_mu_x:.3f}, var={diag.sample_sigma2_x:.3f}):")
print(f"  jensen gap    {diag.sample_jensen_gap:+.5f} in "
      f"[0, {diag.sample_jensen_gap_upper:.5f}]")
print(f"  corrected gap {diag.sample_corrected_gap:+.5f} in "
      f"[{diag.sample_corrected_gap_lower:+.5f}, {diag.sample_corrected_gap_upper:.5f}]")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.fill_between(mu, 0.0, j_up, color="0.85", label="jensen error window")
    ax.fill_between(mu, c_low, c_up, color="C1", alpha=0.5,
                    label="corrected error window")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("mean undetected count mu")
    ax.set_ylabel("approximation error (per unit variance)")
    ax.legend()
    ax.set_title("the corrected window is strictly narrower at its worst")
    fig.tight_layout()
    fig.savefig(OUT / "04_bound_windows.png", dpi=120)
    print(f"\nplot written: {OUT / '04_bound_windows.png'}")
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
