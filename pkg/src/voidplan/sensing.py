"""Sensor detection model and network-level miss probability.

A sensor at ``a`` detects a target at ``s`` with probability
``rho * exp(-(a - s)^2 / sigma_l)``: ``rho`` is the peak detection
probability and ``sigma_l`` (km^2) sets how fast performance falls off
with distance.  A network misses a target only if every sensor misses it,
so the miss probability is the product of the per-sensor complements.

Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SensorModel", "SensorNetwork", "detection_prob", "miss_prob"]


@dataclass(frozen=True)
class SensorModel:
    """Squared-exponential detection kernel (``rho`` in [0, 1],
    ``sigma_l`` > 0 in km^2)."""

    rho: float
    sigma_l: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.sigma_l <= 0:
            raise ValueError("sigma_l must be positive")


@dataclass(frozen=True)
class SensorNetwork:
    """Ordered sensor positions (km) sharing one detection model.

    The network may be empty, and positions may repeat; a duplicated
    sensor simply multiplies in its miss factor twice.
    """

    positions: tuple[float, ...]
    model: SensorModel

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "positions", tuple(float(a) for a in self.positions)
        )
        if not all(np.isfinite(self.positions)):
            raise ValueError("sensor positions must be finite")

    def __len__(self) -> int:
        return len(self.positions)

    def with_sensor(self, position_km: float) -> "SensorNetwork":
        """New network with one sensor appended."""
        return SensorNetwork(self.positions + (float(position_km),), self.model)


def detection_prob(model: SensorModel, s, a):
    """Probability that a sensor at ``a`` detects a target at ``s``.

    Symmetric in (s, a); vectorizes over either argument.
    """
    s = np.asarray(s, dtype=float)
    a = np.asarray(a, dtype=float)
    out = model.rho * np.exp(-((a - s) ** 2) / model.sigma_l)
    return float(out) if out.ndim == 0 else out


def miss_prob(net: SensorNetwork, s):
    """Probability that every sensor in the network misses a target at
    ``s``; 1 for an empty network."""
    s = np.asarray(s, dtype=float)
    out = np.ones(s.shape if s.ndim else ())
    for a in net.positions:
        out = out * (1.0 - detection_prob(net.model, s, a))
    return float(out) if out.ndim == 0 else out
