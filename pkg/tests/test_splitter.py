import math

import numpy as np
import pytest

from cdtree import (
    Bounds,
    ColumnKind,
    DataFrame,
    FitConfig,
    Schema,
    best_split_for_node,
    candidate_thresholds,
    evaluate_candidate,
    histogram_nll_bits,
    fit_histogram,
    optimal_histogram,
    rissanen_code_length,
)
from cdtree.splitter import split_code_bits
from conftest import padded_bounds


class TestCandidateThresholds:
    def test_level_one_quantiles(self):
        vals = np.arange(1.0, 13.0)
        assert list(candidate_thresholds(vals, d=1, c=5)) == [2, 4, 6, 8, 10]

    def test_level_two_quantiles(self):
        vals = np.arange(1.0, 13.0)
        assert list(candidate_thresholds(vals, d=2, c=5)) == list(range(2, 12))

    def test_constant_column_is_unsplittable(self):
        assert len(candidate_thresholds(np.full(9, 7.0), d=1, c=5)) == 0
        assert len(candidate_thresholds(np.full(9, 7.0), d=4, c=5)) == 0

    def test_rejects_empty_column(self):
        with pytest.raises(ValueError):
            candidate_thresholds(np.array([]), d=1, c=5)

    def test_strictly_increasing_and_below_max(self):
        rng = np.random.default_rng(5)
        for d in (1, 2, 3):
            vals = rng.normal(size=40)
            ths = candidate_thresholds(vals, d=d, c=5)
            assert (np.diff(ths) > 0).all()
            assert (ths < vals.max()).all()

    def test_order_does_not_matter(self):
        rng = np.random.default_rng(9)
        vals = rng.uniform(0, 1, 30)
        a = candidate_thresholds(vals, d=2, c=5)
        b = candidate_thresholds(rng.permutation(vals), d=2, c=5)
        assert np.array_equal(a, b)


def _frame(features, target, kinds=None):
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[0] == 1 and len(target) != 1:
        features = features.T
    m = features.shape[1]
    kinds = kinds or ["continuous"] * m
    schema = Schema(
        columns=tuple((f"x{i + 1}", ColumnKind(k)) for i, k in enumerate(kinds)),
        target_name="y",
    )
    return DataFrame(schema=schema, features=features, target=target)


def step_frame(n, seed, extra_noise=0):
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0, 1, n)
    y = rng.uniform(0, 0.5, n) + np.where(x1 <= 0.5, 0.0, 0.5)
    cols = [x1] + [rng.standard_normal(n) for _ in range(extra_noise)]
    return _frame(np.column_stack(cols), y)


class TestEvaluateCandidate:
    def test_one_sided_partition_rejected(self, cache):
        frame = _frame(np.linspace(0, 1, 10), np.linspace(0, 1, 10))
        assert (
            evaluate_candidate(frame, 0, 2.0, Bounds(-0.1, 1.1), FitConfig(), cache)
            is None
        )

    def test_binary_partition_conserves_rows(self, cache):
        rng = np.random.default_rng(1)
        flags = np.array([0.0] * 6 + [1.0] * 4)
        frame = _frame(flags, rng.uniform(0, 1, 10), kinds=["binary"])
        left, right = evaluate_candidate(
            frame, 0, 0.5, Bounds(-0.1, 1.1), FitConfig(), cache
        )
        left_n = int((flags <= 0.5).sum())
        assert left_n == 6
        assert (
            fit_histogram(frame.target[flags <= 0.5], Bounds(-0.1, 1.1), left.h).n
            + fit_histogram(frame.target[flags > 0.5], Bounds(-0.1, 1.1), right.h).n
            == 10
        )

    def test_step_split_cuts_data_bits(self, cache):
        frame = step_frame(400, seed=2)
        bounds = padded_bounds(frame.target)
        parent = optimal_histogram(frame.target, bounds, 30, cache)
        left, right = evaluate_candidate(frame, 0, 0.5, bounds, FitConfig(), cache)
        assert left.nll_bits + right.nll_bits < parent.nll_bits

    def test_min_leaf_enforced(self, cache):
        frame = _frame(np.linspace(0, 1, 10), np.linspace(0, 1, 10))
        config = FitConfig(min_leaf=4)
        bounds = Bounds(-0.1, 1.1)
        # threshold at the 2nd order statistic leaves one child too small
        assert evaluate_candidate(frame, 0, float(np.sort(frame.features[:, 0])[1]), bounds, config, cache) is None


class TestSplitCodeBits:
    def test_binary_cost(self):
        assert split_code_bits(4, 5, ColumnKind.BINARY, None) == pytest.approx(
            math.log2(4) + 1
        )

    def test_continuous_cost(self):
        expected = math.log2(3) + rissanen_code_length(2) + math.log2(5) + 1
        assert split_code_bits(3, 5, ColumnKind.CONTINUOUS, 2) == pytest.approx(expected)


class TestBestSplit:
    def test_constant_feature_offers_nothing(self, cache):
        rng = np.random.default_rng(3)
        y = rng.uniform(0, 1, 50)
        frame = _frame(np.full(50, 2.0), y)
        bounds = padded_bounds(y)
        current = optimal_histogram(y, bounds, 30, cache)
        assert (
            best_split_for_node(frame, bounds, FitConfig(), cache, current, 1.0)
            is None
        )

    def test_tiny_uniform_node_keeps_the_leaf(self, cache):
        rng = np.random.default_rng(4)
        y = rng.uniform(0, 1, 5)
        frame = _frame(rng.uniform(0, 1, 5), y)
        bounds = padded_bounds(y)
        current = optimal_histogram(y, bounds, 30, cache)
        structure = rissanen_code_length(2) - rissanen_code_length(1)
        proposal = best_split_for_node(frame, bounds, FitConfig(), cache, current, structure)
        assert proposal is None

    def test_step_data_beats_noise_features(self, cache):
        frame = step_frame(2000, seed=7, extra_noise=20)
        bounds = padded_bounds(frame.target)
        current = optimal_histogram(frame.target, bounds, 30, cache)
        proposal = best_split_for_node(
            frame, bounds, FitConfig(), cache, current, 1.0
        )
        assert proposal is not None
        assert proposal.condition.feature_index == 0
        assert 0.45 <= proposal.condition.threshold <= 0.55
        assert proposal.delta_bits < 0

    def test_deterministic(self, cache):
        frame = step_frame(300, seed=8, extra_noise=3)
        bounds = padded_bounds(frame.target)
        current = optimal_histogram(frame.target, bounds, 30, cache)
        a = best_split_for_node(frame, bounds, FitConfig(), cache, current, 1.0)
        b = best_split_for_node(frame, bounds, FitConfig(), cache, current, 1.0)
        assert a == b

    def test_partition_conservation_over_candidates(self, cache):
        frame = step_frame(200, seed=9)
        bounds = padded_bounds(frame.target)
        col = frame.features[:, 0]
        for d in (1, 2):
            for s in candidate_thresholds(col, d=d, c=5):
                pair = evaluate_candidate(frame, 0, float(s), bounds, FitConfig(), cache)
                assert pair is not None
                n_left = int((col <= s).sum())
                assert 0 < n_left < frame.n
