"""Gridded arrival-intensity fields over a 1-D corridor.

The arrival process is a Cox process: the intensity function lambda(s) is
itself random, with log(lambda) Gaussian.  This module represents such a
field on a uniform grid by its pointwise mean and variance (the quantities
every downstream computation consumes), plus an optional Matern kernel
that describes the spatial correlation of the log-field and is used only
when drawing whole-field samples.

Three ways to obtain a field:

* ``load_field`` - read a precomputed mean/variance field from JSON.
* ``synthesize_field`` - build one from a log-mean profile and a kernel
  (lognormal moment identities give the mean/variance arrays).
* ``estimate_field_from_arrivals`` - kernel-smooth historical arrival
  positions into a mean intensity with a heuristic pointwise variance.
  This is moment smoothing, not Bayesian posterior inference.

Sampling (``sample_log_gaussian_field``) matches the pointwise lognormal
marginals exactly: the exponentiated Gaussian at grid point i has mean
``mean[i]`` and variance ``variance[i]``; cross-point correlation comes
from the kernel when requested.
"""

from __future__ import annotations

import csv
import json
import numbers
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn, kv, ndtr

__all__ = [
    "GridDomain",
    "MaternKernel",
    "IntensityField",
    "ArrivalRecord",
    "matern_cov",
    "kernel_gram",
    "sample_log_gaussian_field",
    "synthesize_field",
    "estimate_field_from_arrivals",
    "trimodal_log_profile",
    "random_bump_log_profile",
    "load_field",
    "save_field",
    "load_arrivals",
]

SAMPLING_MODES = ("correlated", "independent", "degenerate")

# Jitter schedule for repairing near-PSD correlation matrices, relative to
# the mean diagonal entry.
_JITTER_START = 1e-10
_JITTER_FACTOR = 10.0
_JITTER_MAX = 1e-4

# Grid-point count uses floor((end-start)/spacing) + 1; the epsilon keeps
# exact divisions (18.5 / 0.05) from losing the last point to rounding.
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class GridDomain:
    """Uniform closed 1-D grid over ``[start_km, end_km]``.

    The grid holds ``floor((end_km - start_km) / spacing_km) + 1`` points at
    ``start_km + i * spacing_km``; the last point can fall short of
    ``end_km`` when the length is not a multiple of the spacing.
    """

    start_km: float
    end_km: float
    spacing_km: float

    def __post_init__(self) -> None:
        if not np.isfinite([self.start_km, self.end_km, self.spacing_km]).all():
            raise ValueError("domain parameters must be finite")
        if self.end_km <= self.start_km:
            raise ValueError("end_km must be greater than start_km")
        if self.spacing_km <= 0:
            raise ValueError("spacing_km must be positive")
        if self.spacing_km > self.end_km - self.start_km:
            raise ValueError("spacing_km must not exceed the domain length")

    @property
    def length_km(self) -> float:
        return self.end_km - self.start_km

    @property
    def num_points(self) -> int:
        return int((self.end_km - self.start_km) / self.spacing_km + _GRID_EPS) + 1

    @cached_property
    def points(self) -> np.ndarray:
        pts = self.start_km + self.spacing_km * np.arange(self.num_points)
        pts.setflags(write=False)
        return pts

    @cached_property
    def quadrature_weights(self) -> np.ndarray:
        """Trapezoid weights on the uniform grid: spacing at interior
        points, half spacing at the two endpoints."""
        w = np.full(self.num_points, self.spacing_km)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.setflags(write=False)
        return w

    def contains(self, position_km) -> np.ndarray | bool:
        x = np.asarray(position_km, dtype=float)
        inside = (x >= self.start_km) & (x <= self.end_km)
        return bool(inside) if inside.ndim == 0 else inside

    def to_dict(self) -> dict:
        return {
            "start_km": self.start_km,
            "end_km": self.end_km,
            "spacing_km": self.spacing_km,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GridDomain":
        return cls(
            start_km=float(payload["start_km"]),
            end_km=float(payload["end_km"]),
            spacing_km=float(payload["spacing_km"]),
        )


@dataclass(frozen=True)
class MaternKernel:
    """Stationary Matern covariance for the log-intensity field.

    ``smoothness`` is the shape parameter, ``range_km`` the spatial range,
    and ``marginal_std`` the pointwise standard deviation; the internal
    scale is ``sqrt(8 * smoothness) / range_km``.
    """

    smoothness: float
    range_km: float
    marginal_std: float

    def __post_init__(self) -> None:
        if self.smoothness <= 0:
            raise ValueError("smoothness must be positive")
        if self.range_km <= 0:
            raise ValueError("range_km must be positive")
        if self.marginal_std <= 0:
            raise ValueError("marginal_std must be positive")

    @property
    def scale_per_km(self) -> float:
        return float(np.sqrt(8.0 * self.smoothness) / self.range_km)

    @property
    def marginal_variance(self) -> float:
        return self.marginal_std**2

    def to_dict(self) -> dict:
        return {
            "smoothness": self.smoothness,
            "range_km": self.range_km,
            "marginal_std": self.marginal_std,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MaternKernel":
        return cls(
            smoothness=float(payload["smoothness"]),
            range_km=float(payload["range_km"]),
            marginal_std=float(payload["marginal_std"]),
        )


def matern_cov(kernel: MaternKernel, s, s_other):
    """Matern covariance between positions ``s`` and ``s_other`` (km).

    Evaluates ``sigma^2 * 2^(1-z) / Gamma(z) * (k*d)^z * K_z(k*d)`` with
    ``d = |s - s_other|`` and scale ``k = sqrt(8 z) / range``.  The
    coincident-point value is the analytic limit ``sigma^2``, not a
    numerical evaluation of the Bessel form.
    """
    s = np.asarray(s, dtype=float)
    s_other = np.asarray(s_other, dtype=float)
    scalar = s.ndim == 0 and s_other.ndim == 0
    d = np.atleast_1d(np.abs(s - s_other))

    z = kernel.smoothness
    arg = kernel.scale_per_km * d
    out = np.full(d.shape, kernel.marginal_variance)
    # Below ~1e-8 the Bessel form equals the limit to double precision but
    # the naive product is 0 * inf; branch on the argument instead.
    far = arg > 1e-8
    a = arg[far]
    out[far] = (
        kernel.marginal_variance
        * (2.0 ** (1.0 - z) / gamma_fn(z))
        * a**z
        * kv(z, a)
    )
    # kv underflows to 0 for large arguments, which is the correct limit;
    # clip the occasional -1e-22 from rounding.
    np.clip(out, 0.0, None, out=out)
    return float(out[0]) if scalar else out.reshape(np.broadcast_shapes(s.shape, s_other.shape))


def kernel_gram(kernel: MaternKernel, points: np.ndarray) -> np.ndarray:
    """Covariance matrix of the kernel on a set of grid positions."""
    pts = np.asarray(points, dtype=float)
    return matern_cov(kernel, pts[:, None], pts[None, :])


@dataclass(frozen=True)
class ArrivalRecord:
    """One historical target arrival at ``position_km``."""

    position_km: float


@dataclass(frozen=True, eq=False)
class IntensityField:
    """Pointwise mean/variance of the arrival intensity on a grid.

    ``mean`` and ``variance`` are per-grid-point moments of lambda(s) in
    arrivals per km per collection period (and its square).  They are the
    single source of truth for all analytic computations; the optional
    ``kernel`` only shapes correlated sampling.  ``time_ratio`` scales the
    collection period to the period of interest.

    Instances are immutable (arrays are locked) and safe to share across
    threads; sampling takes explicit seeds.
    """

    domain: GridDomain
    mean: np.ndarray = dataclass_field(repr=False)
    variance: np.ndarray = dataclass_field(repr=False)
    kernel: MaternKernel | None = None
    time_ratio: float = 1.0

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float)
        variance = np.array(self.variance, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", variance)
        n = self.domain.num_points
        if mean.shape != (n,) or variance.shape != (n,):
            raise ValueError(
                f"mean/variance must have shape ({n},) to match the domain grid"
            )
        if not np.isfinite(mean).all() or not np.isfinite(variance).all():
            raise ValueError("mean/variance must be finite")
        if (mean < 0).any():
            raise ValueError("mean intensity must be non-negative")
        if (variance < 0).any():
            raise ValueError("intensity variance must be non-negative")
        if not (np.isfinite(self.time_ratio) and self.time_ratio > 0):
            raise ValueError("time_ratio must be positive")
        mean.setflags(write=False)
        variance.setflags(write=False)

    @property
    def num_points(self) -> int:
        return self.domain.num_points

    @cached_property
    def log_normal_params(self) -> tuple[np.ndarray, np.ndarray]:
        """Gaussian (mean, variance) of log-lambda matching the pointwise
        lognormal moments.  Zero-mean points must carry zero variance."""
        bad = (self.mean == 0) & (self.variance > 0)
        if bad.any():
            raise ValueError(
                "lognormal moment matching undefined where mean == 0 and variance > 0"
            )
        positive = self.mean > 0
        log_var = np.zeros_like(self.mean)
        log_mean = np.zeros_like(self.mean)
        m = self.mean[positive]
        log_var[positive] = np.log1p(self.variance[positive] / m**2)
        log_mean[positive] = np.log(m) - 0.5 * log_var[positive]
        return log_mean, log_var

    @cached_property
    def correlation_cholesky(self) -> np.ndarray:
        """Lower Cholesky factor of the kernel correlation matrix on the
        grid, with an escalating diagonal jitter as a PSD repair."""
        if self.kernel is None:
            raise ValueError("field has no kernel; correlated sampling unavailable")
        corr = kernel_gram(self.kernel, self.domain.points)
        corr /= self.kernel.marginal_variance
        return _cholesky_with_jitter(corr)

    def to_dict(self) -> dict:
        payload = {
            "domain": self.domain.to_dict(),
            "time_ratio": self.time_ratio,
            "mean": self.mean.tolist(),
            "variance": self.variance.tolist(),
        }
        if self.kernel is not None:
            payload["kernel"] = self.kernel.to_dict()
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "IntensityField":
        kernel = payload.get("kernel")
        return cls(
            domain=GridDomain.from_dict(payload["domain"]),
            mean=np.asarray(payload["mean"], dtype=float),
            variance=np.asarray(payload["variance"], dtype=float),
            kernel=MaternKernel.from_dict(kernel) if kernel is not None else None,
            time_ratio=float(payload.get("time_ratio", 1.0)),
        )


def _cholesky_with_jitter(matrix: np.ndarray) -> np.ndarray:
    scale = float(np.mean(np.diag(matrix)))
    jitter = 0.0
    while True:
        try:
            return np.linalg.cholesky(
                matrix if jitter == 0.0 else matrix + jitter * scale * np.eye(len(matrix))
            )
        except np.linalg.LinAlgError:
            jitter = _JITTER_START if jitter == 0.0 else jitter * _JITTER_FACTOR
            if jitter > _JITTER_MAX:
                raise RuntimeError(
                    "correlation matrix not factorizable even with maximum "
                    f"diagonal jitter {_JITTER_MAX:g}"
                ) from None


def _standard_normal_rows(seed, rows: int, cols: int) -> np.ndarray:
    """Draw ``rows`` independent N(0,1) vectors, one RNG substream per row.

    Row j depends only on (seed, j), so row sets are reproducible whether
    rows are generated serially, in parallel, or as a prefix of a larger
    draw.
    """
    children = np.random.SeedSequence(seed).spawn(rows)
    out = np.empty((rows, cols))
    for j, child in enumerate(children):
        out[j] = np.random.default_rng(child).standard_normal(cols)
    return out


def sample_log_gaussian_field(
    field: IntensityField,
    mode: str = "correlated",
    seed=None,
    size: int | None = None,
) -> np.ndarray:
    """Draw intensity realizations over the grid.

    Modes:

    * ``correlated`` - exponentiated Gaussian whose pointwise marginals
      reproduce ``field.mean``/``field.variance`` exactly and whose
      cross-point correlation is the field kernel's.
    * ``independent`` - same marginals, no cross-point correlation.
    * ``degenerate`` - the mean array itself (zero-variance oracle mode).

    Returns one array of shape ``(num_points,)`` when ``size`` is None,
    else ``(size, num_points)`` with row ``j`` drawn from the RNG
    substream ``(seed, j)``.

    Raises ``ValueError`` for an unknown mode, a zero-mean/positive-
    variance point, or correlated sampling without a kernel, and
    ``RuntimeError`` if the correlation matrix cannot be factorized.
    """
    if mode not in SAMPLING_MODES:
        raise ValueError(f"mode must be one of {SAMPLING_MODES}, got {mode!r}")
    rows = 1 if size is None else int(size)
    if rows < 1:
        raise ValueError("size must be at least 1")

    if mode == "degenerate":
        out = np.tile(field.mean, (rows, 1))
    else:
        log_mean, log_var = field.log_normal_params
        z = _standard_normal_rows(seed, rows, field.num_points)
        if mode == "correlated":
            z = z @ field.correlation_cholesky.T
        log_sample = log_mean + np.sqrt(log_var) * z
        # Where the marginal is deterministic, return the mean bit-exactly
        # instead of exp(log(mean)).
        out = np.where(log_var > 0, np.exp(log_sample), field.mean)
    return out[0] if size is None else out


def trimodal_log_profile(domain: GridDomain) -> Callable[[np.ndarray], np.ndarray]:
    """Default synthetic log-mean profile: a quiet corridor with three
    high-traffic zones, scaled to the domain length."""
    length = domain.length_km
    centers = domain.start_km + length * np.array([0.17, 0.49, 0.81])
    widths = length * np.array([0.043, 0.059, 0.049])
    heights = np.array([3.4, 4.0, 3.6])
    base = np.log(0.05)

    def profile(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        bumps = heights * np.exp(-((s[..., None] - centers) ** 2) / (2.0 * widths**2))
        return base + bumps.sum(axis=-1)

    return profile


def random_bump_log_profile(
    domain: GridDomain, seed=None
) -> Callable[[np.ndarray], np.ndarray]:
    """Random mixture-of-bumps log-mean profile for synthetic instances."""
    rng = np.random.default_rng(seed)
    n_bumps = int(rng.integers(2, 6))
    length = domain.length_km
    centers = domain.start_km + length * rng.uniform(0.05, 0.95, n_bumps)
    widths = length * rng.uniform(0.03, 0.09, n_bumps)
    heights = rng.uniform(2.0, 4.5, n_bumps)
    base = np.log(0.05)

    def profile(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        bumps = heights * np.exp(-((s[..., None] - centers) ** 2) / (2.0 * widths**2))
        return base + bumps.sum(axis=-1)

    return profile


def synthesize_field(
    domain: GridDomain,
    kernel: MaternKernel,
    log_mean_profile="trimodal",
    time_ratio: float = 1.0,
    seed=None,
) -> IntensityField:
    """Build a synthetic field from a log-mean profile and a kernel.

    ``log_mean_profile`` may be a callable mapping positions to log-mean
    values, a constant, ``"trimodal"`` (the default three-zone profile) or
    ``"random"`` (seeded random bumps; the only use of ``seed``).  The
    mean/variance arrays follow from the lognormal identities with
    pointwise log-variance equal to the kernel marginal variance, so the
    result is deterministic given its inputs.
    """
    if callable(log_mean_profile):
        profile = log_mean_profile
    elif isinstance(log_mean_profile, str):
        if log_mean_profile == "trimodal":
            profile = trimodal_log_profile(domain)
        elif log_mean_profile == "random":
            profile = random_bump_log_profile(domain, seed)
        else:
            raise ValueError(
                "log_mean_profile string must be 'trimodal' or 'random', "
                f"got {log_mean_profile!r}"
            )
    elif isinstance(log_mean_profile, numbers.Real):
        level = float(log_mean_profile)

        def profile(s, _level=level):
            return np.full(np.shape(s), _level)

    else:
        raise TypeError("log_mean_profile must be callable, a number, or a string")

    log_mean = np.asarray(profile(domain.points), dtype=float)
    log_var = kernel.marginal_variance
    mean = np.exp(log_mean + 0.5 * log_var)
    variance = np.expm1(log_var) * np.exp(2.0 * log_mean + log_var)
    return IntensityField(
        domain=domain, mean=mean, variance=variance, kernel=kernel, time_ratio=time_ratio
    )


def estimate_field_from_arrivals(
    records: Sequence[ArrivalRecord],
    domain: GridDomain,
    bandwidth_km: float,
    time_ratio: float = 1.0,
    variance_floor: float = 1e-8,
) -> IntensityField:
    """Smooth historical arrivals into an intensity field.

    Each arrival contributes a Gaussian kernel of width ``bandwidth_km``,
    renormalized to unit mass inside the domain so the smoothed mean
    integrates to the number of arrivals.  Pointwise variance is the
    moment heuristic ``mean / effective count``, where the effective count
    is the kernel-weighted number of arrivals near the point, floored at
    ``variance_floor``.  This is a smoothing estimate of the first two
    moments, not a Bayesian posterior.

    Records outside the domain are ignored; at least one must fall inside.
    """
    if bandwidth_km <= 0:
        raise ValueError("bandwidth_km must be positive")
    if variance_floor <= 0:
        raise ValueError("variance_floor must be positive")
    if len(records) == 0:
        raise ValueError("no arrival records supplied")

    positions = np.array(
        [getattr(r, "position_km", r) for r in records], dtype=float
    )
    positions = positions[
        (positions >= domain.start_km) & (positions <= domain.end_km)
    ]
    if positions.size == 0:
        raise ValueError("all arrival records fall outside the domain")

    pts = domain.points
    h = bandwidth_km
    sq = (pts[:, None] - positions[None, :]) ** 2 / (2.0 * h * h)
    profile = np.exp(-sq)
    # Unit-mass renormalization per record: divide by the kernel mass that
    # stays inside [start, end].
    inside_mass = ndtr((domain.end_km - positions) / h) - ndtr(
        (domain.start_km - positions) / h
    )
    density = profile / (np.sqrt(2.0 * np.pi) * h)
    mean = (density / inside_mass).sum(axis=1)

    effective_count = profile.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        variance = np.where(effective_count > 0, mean / effective_count, 0.0)
    variance = np.maximum(variance, variance_floor)
    return IntensityField(
        domain=domain, mean=mean, variance=variance, kernel=None, time_ratio=time_ratio
    )


def save_field(field: IntensityField, path) -> None:
    """Write a field to JSON (sorted keys, so output is reproducible)."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(field.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_field(path) -> IntensityField:
    """Read a field written by :func:`save_field`."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    return IntensityField.from_dict(payload)


def load_arrivals(path) -> list[ArrivalRecord]:
    """Read arrival positions from a single-column CSV.

    The file must start with a ``position_km`` header row; every following
    non-empty row holds one position in km.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty arrivals file") from None
        if len(header) != 1 or header[0].strip().lower() != "position_km":
            raise ValueError(f"{path}: expected a single 'position_km' header column")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 1:
                raise ValueError(f"{path}:{lineno}: expected exactly one column")
            try:
                records.append(ArrivalRecord(position_km=float(row[0])))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: could not parse position {row[0]!r}"
                ) from None
    if not records:
        raise ValueError(f"{path}: no arrival rows found")
    return records
