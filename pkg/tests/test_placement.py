"""Greedy placement, its trace, and the exhaustive oracle."""

import numpy as np
import pytest

from voidplan.field import GridDomain, MaternKernel, synthesize_field
from voidplan.objective import (
    MomentPair,
    expected_undetected,
    jensen_lower_bound,
    mc_void_probability,
    variance_corrected_approx,
    variance_undetected,
)
from voidplan.placement import CandidateSet, exhaustive_place, greedy_place
from voidplan.sensing import SensorModel, SensorNetwork


KERNEL = MaternKernel(1.5, 0.8, 0.3)
MODEL = SensorModel(0.95, 0.05)


def single_bump_field(center=2.0):
    domain = GridDomain(0.0, 4.0, 0.05)

    def profile(s):
        s = np.asarray(s, float)
        return np.log(0.05) + 3.0 * np.exp(-((s - center) ** 2) / (2 * 0.3**2))

    return synthesize_field(domain, kernel=KERNEL, log_mean_profile=profile)


def twin_bump_field():
    domain = GridDomain(0.0, 4.0, 0.05)

    def profile(s):
        s = np.asarray(s, float)
        bumps = 3.0 * np.exp(-((s - 1.0) ** 2) / (2 * 0.15**2))
        bumps += 3.0 * np.exp(-((s - 3.0) ** 2) / (2 * 0.15**2))
        return np.log(0.05) + bumps

    return synthesize_field(domain, kernel=KERNEL, log_mean_profile=profile)


def surrogate_value(field, net, surrogate):
    mu = expected_undetected(field, net)
    if surrogate == "jensen":
        return jensen_lower_bound(mu)
    return variance_corrected_approx(MomentPair(mu, variance_undetected(field, net)))


class TestCandidateSet:
    def test_positions_sorted(self):
        cs = CandidateSet(np.array([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(cs.positions, [1.0, 2.0, 3.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            CandidateSet(np.array([]))

    def test_from_grid_default_and_coarse(self):
        domain = GridDomain(0.0, 4.0, 0.05)
        assert len(CandidateSet.from_grid(domain)) == domain.num_points
        coarse = CandidateSet.from_grid(domain, spacing_km=0.5)
        assert len(coarse) == 9


class TestGreedy:
    def test_first_sensor_lands_on_the_bump(self):
        # Brute-force oracle: evaluate the surrogate for every single
        # candidate through the public objective functions.
        field = single_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        for surrogate in ("jensen", "variance_corrected"):
            values = [
                surrogate_value(field, SensorNetwork((a,), MODEL), surrogate)
                for a in candidates.positions
            ]
            best = candidates.positions[int(np.argmax(values))]
            trace = greedy_place(field, MODEL, candidates, 1, surrogate=surrogate)
            assert trace.chosen[0] == best
            assert abs(trace.chosen[0] - 2.0) <= 0.05

    def test_twin_bumps_get_one_sensor_each(self):
        field = twin_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        trace = greedy_place(field, MODEL, candidates, 2, surrogate="jensen")
        # Tie between the symmetric bumps resolves to the smaller position.
        assert trace.chosen[0] == pytest.approx(1.0, abs=0.051)
        assert trace.chosen[1] == pytest.approx(3.0, abs=0.051)

        # Brute force over all candidate pairs agrees.
        best_pair, best_value = None, -np.inf
        for i, a in enumerate(candidates.positions):
            for b in candidates.positions[i:]:
                v = surrogate_value(field, SensorNetwork((a, b), MODEL), "jensen")
                if v > best_value:
                    best_value, best_pair = v, (a, b)
        assert sorted(trace.chosen) == pytest.approx(sorted(best_pair))

    def test_zero_variance_field_makes_surrogates_agree(self):
        field = single_bump_field()
        from voidplan.field import IntensityField

        flat = IntensityField(
            field.domain, field.mean, np.zeros(field.num_points), kernel=None
        )
        candidates = CandidateSet.from_grid(field.domain)
        t_j = greedy_place(flat, MODEL, candidates, 4, surrogate="jensen")
        t_c = greedy_place(flat, MODEL, candidates, 4, surrogate="variance_corrected")
        np.testing.assert_array_equal(t_j.chosen, t_c.chosen)

    def test_trace_is_deterministic(self):
        field = twin_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        kwargs = dict(
            surrogate="variance_corrected", mc_samples=200, mc_mode="correlated", mc_seed=5
        )
        a = greedy_place(field, MODEL, candidates, 3, **kwargs)
        b = greedy_place(field, MODEL, candidates, 3, **kwargs)
        np.testing.assert_array_equal(a.chosen, b.chosen)
        np.testing.assert_array_equal(a.mc_curve, b.mc_curve)
        np.testing.assert_array_equal(a.objective_curve, b.objective_curve)

    def test_jensen_objective_curve_never_decreases(self):
        field = twin_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        trace = greedy_place(field, MODEL, candidates, 6, surrogate="jensen")
        assert (np.diff(trace.objective_curve) >= -1e-15).all()

    def test_curves_match_objective_functions(self):
        field = twin_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        trace = greedy_place(field, MODEL, candidates, 3, surrogate="variance_corrected")
        for k in range(3):
            net = SensorNetwork(tuple(trace.chosen[: k + 1]), MODEL)
            assert trace.mu_curve[k] == expected_undetected(field, net)
            assert trace.sigma2_curve[k] == variance_undetected(field, net)

    def test_mc_curve_matches_standalone_estimates(self):
        field = twin_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        trace = greedy_place(
            field, MODEL, candidates, 3,
            surrogate="jensen", mc_samples=400, mc_mode="correlated", mc_seed=11,
        )
        for k in range(3):
            net = SensorNetwork(tuple(trace.chosen[: k + 1]), MODEL)
            est = mc_void_probability(field, net, 400, mode="correlated", seed=11)
            assert est.value == trace.mc_curve[k]
            assert est.std_error == trace.mc_se_curve[k]

    def test_gap_curves_need_mc(self):
        field = single_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        trace = greedy_place(field, MODEL, candidates, 2)
        assert not trace.has_mc
        with pytest.raises(ValueError, match="Monte-Carlo"):
            _ = trace.gap_jensen_curve

    def test_input_validation(self):
        field = single_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        with pytest.raises(ValueError):
            greedy_place(field, MODEL, candidates, 0)
        with pytest.raises(ValueError, match="surrogate"):
            greedy_place(field, MODEL, candidates, 1, surrogate="optimal")
        with pytest.raises(ValueError, match="inside"):
            greedy_place(field, MODEL, CandidateSet(np.array([99.0])), 1)


class TestExhaustive:
    def test_single_sensor_agrees_with_greedy(self):
        field = single_bump_field()
        candidates = CandidateSet(field.domain.points[::8])
        for surrogate in ("jensen", "variance_corrected"):
            trace = greedy_place(field, MODEL, candidates, 1, surrogate=surrogate)
            net, value = exhaustive_place(field, MODEL, candidates, 1, surrogate=surrogate)
            assert net.positions[0] == trace.chosen[0]
            assert value == pytest.approx(trace.objective_curve[0], rel=1e-13)

    def test_greedy_never_beats_exhaustive(self):
        field = twin_bump_field()
        candidates = CandidateSet(field.domain.points[::8])
        trace = greedy_place(field, MODEL, candidates, 2, surrogate="jensen")
        _, best = exhaustive_place(field, MODEL, candidates, 2, surrogate="jensen")
        assert trace.objective_curve[-1] <= best + 1e-15

    def test_budget_exceeded_is_explicit(self):
        field = single_bump_field()
        candidates = CandidateSet.from_grid(field.domain)
        with pytest.raises(ValueError, match="budget"):
            exhaustive_place(field, MODEL, candidates, 5)

    def test_greedy_optimality_ratio_on_small_instances(self):
        # Trimmed version of the acceptance sweep: randomized fields and
        # candidate subsets, greedy value at least 63.2% of optimal.
        rng = np.random.default_rng(2024)
        domain = GridDomain(0.0, 6.0, 0.05)
        for trial in range(5):
            field = synthesize_field(domain, KERNEL, "random", seed=100 + trial)
            n_cands = int(rng.integers(6, 13))
            idx = rng.choice(domain.num_points, size=n_cands, replace=False)
            candidates = CandidateSet(domain.points[idx])
            count = int(rng.integers(1, 4))
            trace = greedy_place(field, MODEL, candidates, count, surrogate="jensen")
            _, best = exhaustive_place(field, MODEL, candidates, count, surrogate="jensen")
            assert trace.objective_curve[-1] / best >= 0.632
