import math

import numpy as np
import pytest

from cdtree import (
    Bounds,
    CdTree,
    ColumnKind,
    DataError,
    DataFrame,
    FitConfig,
    FittedHistogram,
    Internal,
    Leaf,
    Schema,
    SplitCondition,
    count_irrelevant_splits,
    cross_validate,
    evaluate_nll,
    fit,
    histogram_nll_bits,
    leaf_count,
    make_step_dataset,
    total_mdl_score,
)
from test_splitter import step_frame


def uniform_tree():
    bounds = Bounds(0.0, 1.0)
    return CdTree(
        schema=Schema((("x1", ColumnKind.CONTINUOUS),), "y"),
        bounds=bounds,
        root=Leaf(FittedHistogram(bounds=bounds, h=1, counts=[4], n=4)),
        config=FitConfig(),
    )


def frame_for(tree, x, y):
    return DataFrame(schema=tree.schema, features=np.asarray(x), target=np.asarray(y))


class TestEvaluateNll:
    def test_uniform_leaf_scores_zero(self):
        tree = uniform_tree()
        test = frame_for(tree, [[0.2], [0.8]], [0.3, 0.6])
        report = evaluate_nll(tree, test)
        assert report.mean_nll_nats == 0.0
        assert report.zero_density_events == 0

    def test_zero_density_event_clamped_and_counted(self):
        tree = uniform_tree()
        test = frame_for(tree, [[0.2], [0.8]], [0.3, 1.5])
        report = evaluate_nll(tree, test)
        assert report.zero_density_events == 1
        # the clamped row adds 10*ln(10) =~ 23.026 to the NLL sum
        assert report.mean_nll_nats == pytest.approx(10 * math.log(10) / 2, abs=1e-9)

    def test_disabled_clamp_matches_when_no_events(self):
        frame = step_frame(300, seed=31)
        tree, _ = fit(frame, FitConfig())
        clamped = evaluate_nll(tree, frame)
        raw = evaluate_nll(tree, frame, clamp_floor_nats=-math.inf)
        assert clamped.zero_density_events == 0
        assert raw.mean_nll_nats == clamped.mean_nll_nats

    def test_step_fit_approaches_the_true_loss(self):
        train = step_frame(2000, seed=32)
        test = step_frame(2000, seed=33)
        tree, _ = fit(train, FitConfig())
        report = evaluate_nll(tree, test)
        assert abs(report.mean_nll_nats - (-math.log(2))) < 0.15

    def test_schema_mismatch_rejected(self):
        tree = uniform_tree()
        other = make_step_dataset(5, 1, seed=0)
        with pytest.raises(DataError):
            evaluate_nll(tree, other)

    def test_nats_consistent_with_bits(self):
        # a tree scored on its own training data: summing per-row log
        # densities in nats must equal the bit-valued data term * ln 2
        frame = step_frame(400, seed=34)
        tree, _ = fit(frame, FitConfig())
        report = evaluate_nll(tree, frame)
        score = total_mdl_score(tree, frame)
        assert report.zero_density_events == 0
        assert report.mean_nll_nats * frame.n == pytest.approx(
            score.data_nll_bits * math.log(2), rel=1e-9
        )


class TestCrossValidate:
    def test_partition_arithmetic(self):
        frame = make_step_dataset(100, 0, seed=1)
        report = cross_validate(frame, 5, FitConfig(), seed=2)
        assert [r.n_test for r in report.fold_reports] == [20] * 5
        assert len(report.fold_leaf_counts) == 5

    def test_deterministic(self):
        frame = make_step_dataset(100, 0, seed=1)
        a = cross_validate(frame, 5, FitConfig(), seed=2)
        b = cross_validate(frame, 5, FitConfig(), seed=2)
        assert a == b

    def test_step_folds_agree(self):
        frame = make_step_dataset(1500, 0, seed=3)
        report = cross_validate(frame, 5, FitConfig(), seed=4)
        assert report.sd_nll_nats < 0.1
        nlls = [r.mean_nll_nats for r in report.fold_reports]
        assert report.mean_nll_nats == pytest.approx(float(np.mean(nlls)), rel=1e-12)
        assert report.sd_nll_nats == pytest.approx(float(np.std(nlls, ddof=1)), rel=1e-12)
        assert report.mean_leaves == pytest.approx(
            float(np.mean(report.fold_leaf_counts)), rel=1e-12
        )


class TestTreeReports:
    def test_leaf_count(self):
        assert leaf_count(uniform_tree()) == 1
        frame = step_frame(1000, seed=35)
        tree, trace = fit(frame, FitConfig())
        assert leaf_count(tree) == 1 + len(trace.records)

    def test_count_irrelevant_splits(self):
        bounds = Bounds(0.0, 1.0)
        schema = Schema(
            (("x1", ColumnKind.CONTINUOUS), ("noise_1", ColumnKind.CONTINUOUS)), "y"
        )
        leaf = Leaf(FittedHistogram(bounds=bounds, h=1, counts=[1], n=1))
        tree = CdTree(
            schema=schema,
            bounds=bounds,
            root=Internal(SplitCondition(1, ColumnKind.CONTINUOUS, 0.5, 1), leaf, leaf),
            config=FitConfig(),
        )
        assert count_irrelevant_splits(tree, {"noise_1"}) == 1
        assert count_irrelevant_splits(tree, {"x1"}) == 0
        assert count_irrelevant_splits(uniform_tree(), set()) == 0

    def test_unknown_name_rejected(self):
        with pytest.raises(DataError, match="ghost"):
            count_irrelevant_splits(uniform_tree(), {"ghost"})
