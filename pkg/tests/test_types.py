"""Core data types: ranking, normalization, container validation."""

from __future__ import annotations

import numpy as np
import pytest

from baylime import (
    Explanation,
    ExplanationEnsemble,
    Instance,
    InvalidInputError,
    PerturbationSet,
    ShapeError,
    normalize_coefficients,
    rank_features,
)
from baylime.types import BINARY_MASK, CATEGORICAL, NUMERICAL


class TestRankFeatures:
    def test_worked_example(self):
        ranks = rank_features([0.036, -0.599, 0.799, 0.044])
        assert ranks.tolist() == [4, 2, 1, 3]

    def test_rank_one_is_largest_magnitude(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            c = rng.normal(size=rng.integers(1, 12))
            ranks = rank_features(c)
            assert np.argmax(np.abs(c)) == np.argmin(ranks)
            assert sorted(ranks.tolist()) == list(range(1, c.size + 1))

    def test_ties_break_toward_lower_index(self):
        assert rank_features([0.5, -0.5, 0.5]).tolist() == [1, 2, 3]

    def test_sign_is_ignored(self):
        assert rank_features([-3.0, 2.0]).tolist() == [1, 2]

    def test_all_zero_vector_ranks_everything_first(self):
        assert rank_features([0.0, 0.0, 0.0]).tolist() == [1, 1, 1]

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            rank_features([1.0, np.nan])

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            rank_features([])


class TestNormalizeCoefficients:
    def test_unit_norm(self):
        out = normalize_coefficients([3.0, 4.0])
        assert out.tolist() == [0.6, 0.8]

    def test_zero_stays_zero(self):
        assert normalize_coefficients([0.0, 0.0]).tolist() == [0.0, 0.0]

    def test_preserves_signs(self):
        out = normalize_coefficients([-3.0, 4.0])
        assert out[0] < 0 < out[1]


class TestInstance:
    def test_round_trip(self):
        inst = Instance([1.0, 0.0, 2.0],
                        (NUMERICAL, BINARY_MASK, CATEGORICAL),
                        ("a", "b", "c"))
        assert inst.m == 3
        assert inst.values.flags.writeable is False

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            Instance([1.0, 2.0], (NUMERICAL,), ("a", "b"))

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            Instance([1.0], ("mystery",), ("a",))


class TestPerturbationSet:
    def test_shapes_and_views(self):
        pset = PerturbationSet(rows=[[1.0, 2.0]], labels=[3.0],
                               weights=[0.5], seed=4)
        assert (pset.n, pset.m) == (1, 2)
        assert pset.rows.flags.writeable is False

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(InvalidInputError):
            PerturbationSet(rows=[[1.0]], labels=[1.0], weights=[0.0], seed=0)

    def test_rejects_mismatched_labels(self):
        with pytest.raises(ShapeError):
            PerturbationSet(rows=[[1.0], [2.0]], labels=[1.0],
                            weights=[1.0, 1.0], seed=0)

    def test_with_weights_replaces(self):
        pset = PerturbationSet(rows=[[1.0], [2.0]], labels=[1.0, 2.0],
                               weights=[1.0, 1.0], seed=0)
        reweighted = pset.with_weights([0.25, 0.5])
        assert reweighted.weights.tolist() == [0.25, 0.5]
        assert pset.weights.tolist() == [1.0, 1.0]


class TestExplanation:
    def test_from_coefficients_derives_fields(self):
        exp = Explanation.from_coefficients([3.0, -4.0], kernel_width=0.75,
                                            n_samples=100, seed=9)
        assert exp.importances.tolist() == [0.6, 0.8]
        assert exp.ranks.tolist() == [2, 1]
        assert exp.seed == 9

    def test_zero_coefficients_allowed(self):
        exp = Explanation.from_coefficients([0.0, 0.0], kernel_width=1.0,
                                            n_samples=10)
        assert exp.importances.tolist() == [0.0, 0.0]
        assert exp.ranks.tolist() == [1, 1]

    def test_rejects_denormalized_importances(self):
        with pytest.raises(InvalidInputError):
            Explanation(coefficients=np.array([1.0, 1.0]),
                        importances=np.array([1.0, 1.0]),
                        ranks=np.array([1, 2]), kernel_width=1.0,
                        n_samples=10)


class TestExplanationEnsemble:
    @staticmethod
    def _run(coefficients):
        return Explanation.from_coefficients(coefficients, kernel_width=1.0,
                                             n_samples=10)

    def test_matrices(self):
        ensemble = ExplanationEnsemble((self._run([0.8, 0.6]),
                                        self._run([0.6, 0.8])))
        assert ensemble.k == 2 and ensemble.m == 2
        assert ensemble.rank_matrix().tolist() == [[1, 2], [2, 1]]
        np.testing.assert_allclose(ensemble.importance_matrix(),
                                   [[0.8, 0.6], [0.6, 0.8]])

    def test_needs_two_runs(self):
        with pytest.raises(InvalidInputError):
            ExplanationEnsemble((self._run([1.0]),))

    def test_rejects_mixed_m(self):
        with pytest.raises(ShapeError):
            ExplanationEnsemble((self._run([1.0]), self._run([1.0, 2.0])))
