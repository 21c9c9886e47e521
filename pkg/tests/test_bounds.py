import math

import numpy as np
import pytest

from binarymr import (
    EmptyStratum,
    ObservedJoint,
    SimConfig,
    ace_bounds,
    binary_outcome_ace,
    binary_outcome_counts,
    joint_from_counts,
    null_test_consistency,
    simulate,
)
from binarymr.rng import substream_seeds
from _oracles import (
    random_feasible_joint,
    random_unconstrained_joint,
    vertex_enumeration_bounds,
)


def perfect_compliance_joint():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.0
    p[1, 1, 1] = 1.0
    return ObservedJoint(p)


class TestObservedJoint:
    def test_validates_shape_and_range(self):
        with pytest.raises(ValueError):
            ObservedJoint(np.zeros((2, 2)))
        bad = np.full((2, 2, 2), 0.25)
        bad[0, 0, 0] = -0.1
        bad[0, 1, 1] = 0.6
        with pytest.raises(ValueError):
            ObservedJoint(bad)

    def test_validates_stratum_sums(self):
        p = np.full((2, 2, 2), 0.25)
        p[1, 1, 1] = 0.3
        with pytest.raises(ValueError, match="sum"):
            ObservedJoint(p)

    def test_read_only(self):
        joint = ObservedJoint(np.full((2, 2, 2), 0.25))
        with pytest.raises(ValueError):
            joint.p[0, 0, 0] = 0.5


class TestJointFromCounts:
    def test_uniform(self):
        counts = np.full((2, 2, 2), 7)
        joint = joint_from_counts(counts)
        assert np.allclose(joint.p, 0.25)

    def test_empty_stratum(self):
        counts = np.zeros((2, 2, 2), dtype=int)
        counts[0] = 5
        with pytest.raises(EmptyStratum, match="g=1"):
            joint_from_counts(counts)

    def test_pattern(self):
        counts = np.array([[[10, 0], [0, 10]], [[0, 10], [10, 0]]])
        joint = joint_from_counts(counts)
        assert joint.p[0, 0, 0] == 0.5
        assert joint.p[0, 1, 1] == 0.5
        assert joint.p[0, 0, 1] == 0.0
        assert joint.p[1, 0, 1] == 0.5
        assert joint.p[1, 1, 0] == 0.5

    def test_negative_counts_rejected(self):
        counts = np.full((2, 2, 2), 1)
        counts[0, 0, 0] = -1
        with pytest.raises(ValueError):
            joint_from_counts(counts)


class TestAceBounds:
    def test_perfect_compliance_pins_unit_effect(self):
        result = ace_bounds(perfect_compliance_joint())
        assert result.feasible
        assert result.lower == pytest.approx(1.0, abs=1e-9)
        assert result.upper == pytest.approx(1.0, abs=1e-9)

    def test_no_instrument_outcome_association_contains_null(self):
        p = np.array([[[0.3, 0.2], [0.1, 0.4]]] * 2)
        result = ace_bounds(ObservedJoint(p))
        assert result.feasible
        assert result.lower <= 0.0 <= result.upper

    def test_matches_vertex_enumeration_oracle(self):
        rng = np.random.default_rng(515)
        checked_feasible = 0
        checked_infeasible = 0
        for i in range(60):
            p = random_feasible_joint(rng) if i % 2 == 0 else random_unconstrained_joint(rng)
            result = ace_bounds(ObservedJoint(p))
            lo, hi, feasible = vertex_enumeration_bounds(p)
            assert result.feasible == feasible
            if feasible:
                checked_feasible += 1
                assert result.lower == pytest.approx(lo, abs=1e-9)
                assert result.upper == pytest.approx(hi, abs=1e-9)
                assert -1.0 - 1e-9 <= result.lower <= result.upper <= 1.0 + 1e-9
            else:
                checked_infeasible += 1
                assert math.isnan(result.lower) and math.isnan(result.upper)
        assert checked_feasible >= 30
        assert checked_infeasible >= 1

    def test_detects_incompatible_joint(self):
        # under g=0 everyone is exposed with outcome 1; under g=1 exposed with outcome 0
        p = np.zeros((2, 2, 2))
        p[0, 1, 1] = 1.0
        p[1, 1, 0] = 1.0
        result = ace_bounds(ObservedJoint(p))
        assert not result.feasible

    def test_instrument_relabel_invariance(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            p = random_feasible_joint(rng)
            swapped = p[::-1].copy()
            a = ace_bounds(ObservedJoint(p))
            b = ace_bounds(ObservedJoint(swapped))
            assert a.lower == pytest.approx(b.lower, abs=1e-9)
            assert a.upper == pytest.approx(b.upper, abs=1e-9)

    def test_width_at_most_one_when_instrument_shifts_exposure(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            p = random_feasible_joint(rng)
            exposure_shift = abs(p[1].sum(axis=1)[1] - p[0].sum(axis=1)[1])
            result = ace_bounds(ObservedJoint(p))
            if result.feasible and exposure_shift > 1e-6:
                assert result.upper - result.lower <= 1.0 + 1e-9

    def test_true_ace_inside_bounds_on_simulated_data(self):
        # exclusion holds by construction when the latent pathway is off
        config = SimConfig(
            n=100_000, maf=0.3, gamma=1.0, tau=1.0, kappa=1.0, beta_step=0.8, lam=1.0
        )
        threshold = 0.5
        inside = 0
        reps = 40
        for seed in substream_seeds(7, reps):
            ledger = simulate(
                SimConfig(**{**config.__dict__, "seed": int(seed)})
            )
            joint = joint_from_counts(binary_outcome_counts(ledger, threshold))
            result = ace_bounds(joint)
            truth = binary_outcome_ace(ledger, threshold)
            if result.feasible and result.lower - 1e-6 <= truth <= result.upper + 1e-6:
                inside += 1
        assert inside >= reps - 1


class TestNullTestConsistency:
    def test_symmetric_joint(self):
        p = np.array([[[0.3, 0.2], [0.1, 0.4]]] * 2)
        assert null_test_consistency(ObservedJoint(p))

    def test_perfect_compliance_joint(self):
        assert not null_test_consistency(perfect_compliance_joint())
