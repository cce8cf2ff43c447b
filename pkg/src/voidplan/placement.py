"""Greedy sensor placement with an exhaustive small-instance oracle.

``greedy_place`` adds sensors one at a time, each time scanning every
candidate position and keeping the one that maximizes the chosen
surrogate objective (the Jensen lower bound or the variance-corrected
approximation).  Candidate scans reuse a running miss-probability profile
so a full greedy step costs O(candidates * grid), and ties go to the
smallest position, making traces deterministic.

``exhaustive_place`` enumerates every size-n multiset of candidates (the
same feasible set greedy searches, since re-picking a position is
allowed) and returns the true optimum.  It exists to measure greedy's
optimality ratio on instances small enough to enumerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np

from .field import GridDomain, IntensityField
from .objective import (
    MomentPair,
    _estimate_from_counts,
    _sample_moments,
    expected_undetected,
    intensity_sample_matrix,
    jensen_lower_bound,
    variance_corrected_approx,
    variance_undetected,
)
from .sensing import SensorModel, SensorNetwork, detection_prob

__all__ = [
    "SURROGATES",
    "CandidateSet",
    "PlacementTrace",
    "greedy_place",
    "exhaustive_place",
]

SURROGATES = ("jensen", "variance_corrected")

DEFAULT_EXHAUSTIVE_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Discrete candidate positions, stored sorted ascending."""

    positions: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        pos = np.sort(np.asarray(self.positions, dtype=float))
        if pos.size == 0:
            raise ValueError("candidate set must not be empty")
        if not np.isfinite(pos).all():
            raise ValueError("candidate positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return len(self.positions)

    @classmethod
    def from_grid(cls, domain: GridDomain, spacing_km: float | None = None) -> "CandidateSet":
        """Candidates on the domain grid, optionally at a coarser spacing."""
        if spacing_km is None:
            return cls(domain.points)
        coarse = GridDomain(domain.start_km, domain.end_km, spacing_km)
        return cls(coarse.points)


@dataclass(eq=False)
class PlacementTrace:
    """Greedy run record: chosen positions plus per-step evaluation curves.

    Index k of every curve describes the network after k+1 placements.
    Monte-Carlo curves are present only when the run was asked to estimate
    them; all draws in one trace share the same intensity samples, so the
    mc curve is smooth in n by common random numbers.
    """

    surrogate: str
    chosen: np.ndarray
    mu_curve: np.ndarray
    sigma2_curve: np.ndarray
    jensen_curve: np.ndarray
    corrected_curve: np.ndarray
    objective_curve: np.ndarray
    mc_curve: np.ndarray | None = None
    mc_se_curve: np.ndarray | None = None
    mc_mu_curve: np.ndarray | None = None
    mc_sigma2_curve: np.ndarray | None = None

    @property
    def has_mc(self) -> bool:
        return self.mc_curve is not None

    @property
    def gap_jensen_curve(self) -> np.ndarray:
        """Measured Jensen gap after each placement (needs mc curves)."""
        self._require_mc()
        return self.mc_curve - self.jensen_curve

    @property
    def gap_corrected_curve(self) -> np.ndarray:
        """Measured corrected gap after each placement (needs mc curves)."""
        self._require_mc()
        return self.mc_curve - self.corrected_curve

    def _require_mc(self) -> None:
        if not self.has_mc:
            raise ValueError("trace was built without Monte-Carlo curves")


def _detection_matrix(model: SensorModel, candidates: np.ndarray, points: np.ndarray):
    return detection_prob(model, points[None, :], candidates[:, None])


def greedy_place(
    field: IntensityField,
    model: SensorModel,
    candidates: CandidateSet,
    count: int,
    surrogate: str = "variance_corrected",
    mc_samples: int = 0,
    mc_mode: str = "correlated",
    mc_seed=None,
) -> PlacementTrace:
    """Place ``count`` sensors greedily, maximizing ``surrogate``.

    Set ``mc_samples`` > 0 to also record the Monte-Carlo void-probability
    estimate (value, standard error, and sample moments of the undetected
    count) after every placement; the same ``mc_samples`` intensity draws
    are reused for all steps.

    Deterministic: ties in the candidate scan go to the smallest position,
    and Monte-Carlo curves depend only on (field, mc_mode, mc_seed).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if surrogate not in SURROGATES:
        raise ValueError(f"surrogate must be one of {SURROGATES}, got {surrogate!r}")
    if not np.all(field.domain.contains(candidates.positions)):
        raise ValueError("candidate positions must lie inside the field domain")

    points = field.domain.points
    w = field.domain.quadrature_weights
    ratio = field.time_ratio
    weighted_mean = ratio * (w * field.mean)
    weighted_var = ratio**2 * (w * field.variance)
    one_minus_det = 1.0 - _detection_matrix(model, candidates.positions, points)

    rows = None
    if mc_samples and mc_mode != "degenerate":
        rows = intensity_sample_matrix(field, mc_samples, mode=mc_mode, seed=mc_seed)

    miss = np.ones(len(points))
    net = SensorNetwork((), model)
    chosen = np.empty(count)
    mu_curve = np.empty(count)
    sigma2_curve = np.empty(count)
    jensen_curve = np.empty(count)
    corrected_curve = np.empty(count)
    mc_curve = np.empty(count) if mc_samples else None
    mc_se_curve = np.empty(count) if mc_samples else None
    mc_mu_curve = np.empty(count) if mc_samples else None
    mc_sigma2_curve = np.empty(count) if mc_samples else None

    for k in range(count):
        cand_miss = miss[None, :] * one_minus_det
        mu_cand = cand_miss @ weighted_mean
        if surrogate == "jensen":
            values = np.exp(-mu_cand)
        else:
            sigma2_cand = (cand_miss * cand_miss) @ weighted_var
            values = np.exp(-mu_cand) * (1.0 + 0.5 * sigma2_cand)
        best = int(np.argmax(values))  # first max = smallest position

        miss = cand_miss[best]
        net = net.with_sensor(candidates.positions[best])
        chosen[k] = candidates.positions[best]
        # Curves are recomputed through the public objective functions so
        # they match what a caller would evaluate on the chosen network.
        mu_curve[k] = expected_undetected(field, net)
        sigma2_curve[k] = variance_undetected(field, net)
        jensen_curve[k] = jensen_lower_bound(mu_curve[k])
        corrected_curve[k] = variance_corrected_approx(
            MomentPair(mu_curve[k], sigma2_curve[k])
        )
        if mc_samples:
            if rows is None:  # degenerate mode: one deterministic draw
                x = np.full(mc_samples, ratio * (field.mean @ (w * miss)))
            else:
                x = ratio * (rows @ (w * miss))
            est = _estimate_from_counts(x)
            mc_curve[k] = est.value
            mc_se_curve[k] = est.std_error
            mc_mu_curve[k], mc_sigma2_curve[k] = _sample_moments(x)

    objective_curve = jensen_curve if surrogate == "jensen" else corrected_curve
    return PlacementTrace(
        surrogate=surrogate,
        chosen=chosen,
        mu_curve=mu_curve,
        sigma2_curve=sigma2_curve,
        jensen_curve=jensen_curve,
        corrected_curve=corrected_curve,
        objective_curve=objective_curve.copy(),
        mc_curve=mc_curve,
        mc_se_curve=mc_se_curve,
        mc_mu_curve=mc_mu_curve,
        mc_sigma2_curve=mc_sigma2_curve,
    )


def exhaustive_place(
    field: IntensityField,
    model: SensorModel,
    candidates: CandidateSet,
    count: int,
    surrogate: str = "variance_corrected",
    budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
) -> tuple[SensorNetwork, float]:
    """True optimum over all size-``count`` multisets of candidates.

    Raises ``ValueError`` when the enumeration would exceed ``budget``
    combinations; shrink the candidate set or the sensor count.  Ties go
    to the lexicographically smallest position tuple.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if surrogate not in SURROGATES:
        raise ValueError(f"surrogate must be one of {SURROGATES}, got {surrogate!r}")
    if not np.all(field.domain.contains(candidates.positions)):
        raise ValueError("candidate positions must lie inside the field domain")
    n_combos = math.comb(len(candidates) + count - 1, count)
    if n_combos > budget:
        raise ValueError(
            f"{n_combos} candidate combinations exceed the budget {budget}; "
            "shrink the candidate set or sensor count"
        )

    points = field.domain.points
    w = field.domain.quadrature_weights
    ratio = field.time_ratio
    weighted_mean = ratio * (w * field.mean)
    weighted_var = ratio**2 * (w * field.variance)
    one_minus_det = 1.0 - _detection_matrix(model, candidates.positions, points)

    best_value = -np.inf
    best_combo: tuple[int, ...] | None = None
    for combo in combinations_with_replacement(range(len(candidates)), count):
        miss = one_minus_det[combo[0]].copy()
        for idx in combo[1:]:
            miss *= one_minus_det[idx]
        mu = miss @ weighted_mean
        if surrogate == "jensen":
            value = np.exp(-mu)
        else:
            value = np.exp(-mu) * (1.0 + 0.5 * ((miss * miss) @ weighted_var))
        if value > best_value:
            best_value = value
            best_combo = combo

    positions = tuple(float(candidates.positions[i]) for i in best_combo)
    return SensorNetwork(positions, model), float(best_value)
