"""Void-probability objective: analytic moments, approximations and the
Monte-Carlo ground truth.

The undetected-target count for a network ``a`` over the corridor is

    X = time_ratio * integral( lambda(s) * miss(s) ds )

with ``miss(s)`` the network miss probability.  Targets arrive as a
Poisson process given lambda, so the probability of detecting every
arrival (the void probability) is ``E[exp(-X)]`` over the random
intensity.  This module provides:

* ``expected_undetected`` / ``variance_undetected`` - the closed-form
  first two moments of X from the field's pointwise mean/variance,
* ``jensen_lower_bound`` - ``exp(-mu_X)``, a guaranteed lower bound,
* ``variance_corrected_approx`` - ``exp(-mu_X) * (1 + sigma2_X / 2)``,
  the second-order correction that accounts for intensity uncertainty,
* ``mc_void_probability`` - the sampling estimate of ``E[exp(-X)]``,
* ``covariance_exact_variance`` - a double-integral diagnostic for what
  Var(X) actually is under the kernel's correlation, reported alongside
  the pointwise closed form (which ignores cross-point covariance).

All integrals use the trapezoid weights of the field grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import IntensityField, kernel_gram, sample_log_gaussian_field
from .sensing import SensorNetwork, miss_prob

__all__ = [
    "MomentPair",
    "McEstimate",
    "expected_undetected",
    "variance_undetected",
    "undetected_moments",
    "jensen_lower_bound",
    "variance_corrected_approx",
    "intensity_sample_matrix",
    "undetected_count_samples",
    "mc_void_probability",
    "covariance_exact_variance",
]


@dataclass(frozen=True)
class MomentPair:
    """Mean and variance of the undetected-target count X."""

    mu_x: float
    sigma2_x: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.mu_x) and self.mu_x >= 0):
            raise ValueError("mu_x must be finite and non-negative")
        if not (np.isfinite(self.sigma2_x) and self.sigma2_x >= 0):
            raise ValueError("sigma2_x must be finite and non-negative")


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo void-probability estimate with its standard error."""

    value: float
    std_error: float
    samples: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("value must lie in [0, 1]")
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def _check_positions(field: IntensityField, net: SensorNetwork) -> None:
    if net.positions and not np.all(field.domain.contains(np.array(net.positions))):
        raise ValueError("sensor positions must lie inside the field domain")


def _weighted_miss(field: IntensityField, net: SensorNetwork) -> np.ndarray:
    """Quadrature weights times the network miss profile on the grid."""
    _check_positions(field, net)
    return field.domain.quadrature_weights * miss_prob(net, field.domain.points)


def _undetected_from_rows(rows: np.ndarray, weighted_miss: np.ndarray, time_ratio: float):
    """X for each intensity row; the single dot-product path shared by the
    analytic mean and the Monte-Carlo samples."""
    return time_ratio * (rows @ weighted_miss)


def expected_undetected(field: IntensityField, net: SensorNetwork) -> float:
    """Expected undetected-target count ``mu_X``."""
    return float(_undetected_from_rows(field.mean, _weighted_miss(field, net), field.time_ratio))


def variance_undetected(field: IntensityField, net: SensorNetwork) -> float:
    """Closed-form variance ``sigma2_X``: the integral of the pointwise
    intensity variance against the squared miss profile.

    Cross-point covariance of the intensity is deliberately not included
    here; see :func:`covariance_exact_variance` for that diagnostic.
    """
    wm = _weighted_miss(field, net)
    miss = miss_prob(net, field.domain.points)
    return float(field.time_ratio**2 * ((wm * miss) @ field.variance))


def undetected_moments(field: IntensityField, net: SensorNetwork) -> MomentPair:
    """Both closed-form moments of X as a :class:`MomentPair`."""
    return MomentPair(
        mu_x=expected_undetected(field, net),
        sigma2_x=variance_undetected(field, net),
    )


def jensen_lower_bound(mu_x: float) -> float:
    """``exp(-mu_X)``: lower bound on the void probability by convexity."""
    if mu_x < 0:
        raise ValueError("mu_x must be non-negative")
    return float(np.exp(-mu_x))


def variance_corrected_approx(moments: MomentPair) -> float:
    """``exp(-mu_X) * (1 + sigma2_X / 2)``.

    Strictly above the Jensen bound whenever ``sigma2_x > 0``.  The value
    is an approximation, not a probability, and can exceed 1; it is
    returned unclamped.
    """
    return float(np.exp(-moments.mu_x) * (1.0 + 0.5 * moments.sigma2_x))


def intensity_sample_matrix(
    field: IntensityField, samples: int, mode: str = "correlated", seed=None
) -> np.ndarray:
    """Matrix of ``samples`` intensity realizations (one per row).

    The rows depend only on (field, mode, seed, row index), never on any
    sensor network, so one matrix can be reused to evaluate many candidate
    networks against common random numbers.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    return sample_log_gaussian_field(field, mode=mode, seed=seed, size=samples)


def undetected_count_samples(
    field: IntensityField,
    net: SensorNetwork,
    samples: int,
    mode: str = "correlated",
    seed=None,
    intensity_rows: np.ndarray | None = None,
) -> np.ndarray:
    """Monte-Carlo draws of X, one per intensity realization.

    Pass ``intensity_rows`` (from :func:`intensity_sample_matrix`) to
    evaluate several networks against the same draws.
    """
    if intensity_rows is None:
        if mode == "degenerate":
            # Every draw is the mean field; compute the one value through
            # the same dot product as expected_undetected so the two are
            # bit-identical.
            if samples < 1:
                raise ValueError("samples must be at least 1")
            x = _undetected_from_rows(
                field.mean, _weighted_miss(field, net), field.time_ratio
            )
            return np.full(int(samples), x)
        intensity_rows = intensity_sample_matrix(field, samples, mode=mode, seed=seed)
    return _undetected_from_rows(
        intensity_rows, _weighted_miss(field, net), field.time_ratio
    )


def _sample_moments(x: np.ndarray) -> tuple[float, float]:
    """Sample mean/variance of X with an exact zero for constant draws
    (np.var of bit-identical values picks up mean-subtraction noise)."""
    if len(x) == 1 or np.all(x == x[0]):
        return float(x[0]), 0.0
    return float(x.mean()), float(x.var(ddof=1))


def _estimate_from_counts(x: np.ndarray) -> McEstimate:
    p = np.exp(-x)
    m = len(p)
    if m == 1 or np.all(p == p[0]):
        return McEstimate(value=float(p[0]), std_error=0.0, samples=m)
    return McEstimate(
        value=float(p.mean()), std_error=float(p.std(ddof=1) / np.sqrt(m)), samples=m
    )


def mc_void_probability(
    field: IntensityField,
    net: SensorNetwork,
    samples: int,
    mode: str = "correlated",
    seed=None,
) -> McEstimate:
    """Estimate the void probability ``E[exp(-X)]`` by sampling.

    Deterministic for a fixed (field, net, samples, mode, seed).  In
    ``degenerate`` mode every draw equals the mean field, so the value is
    exactly ``exp(-expected_undetected(...))`` with zero standard error.
    """
    x = undetected_count_samples(field, net, samples, mode=mode, seed=seed)
    return _estimate_from_counts(x)


def covariance_exact_variance(field: IntensityField, net: SensorNetwork) -> float:
    """Var(X) under the kernel's correlation structure.

    Double-integral of the intensity covariance against the miss profile:
    ``time_ratio^2 * sum_ij w_i w_j Cov(lambda_i, lambda_j) miss_i miss_j``
    with ``Cov`` from the lognormal marginals and the kernel correlation.
    Compare with :func:`variance_undetected`, which integrates only the
    pointwise variance.  Requires a field kernel.
    """
    if field.kernel is None:
        raise ValueError("field has no kernel; exact covariance unavailable")
    u = _weighted_miss(field, net)
    _, log_var = field.log_normal_params
    sd = np.sqrt(log_var)
    corr = kernel_gram(field.kernel, field.domain.points) / field.kernel.marginal_variance
    log_cov = sd[:, None] * sd[None, :] * corr
    cov = field.mean[:, None] * field.mean[None, :] * np.expm1(log_cov)
    return float(field.time_ratio**2 * (u @ cov @ u))
