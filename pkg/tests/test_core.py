import numpy as np
import pytest

from cdtree import (
    Bounds,
    CdTree,
    ColumnKind,
    DataFrame,
    FitConfig,
    FittedHistogram,
    Internal,
    Leaf,
    MdlScore,
    Schema,
    SplitCondition,
    ValidationError,
    validate,
)
from cdtree.core import iter_internal, iter_leaves


def make_schema(kinds=("continuous", "continuous")):
    return Schema(
        columns=tuple((f"x{i + 1}", ColumnKind(k)) for i, k in enumerate(kinds)),
        target_name="y",
    )


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            Schema(
                columns=(("a", ColumnKind.CONTINUOUS), ("a", ColumnKind.BINARY)),
                target_name="y",
            )

    def test_target_cannot_be_a_feature(self):
        with pytest.raises(ValidationError):
            Schema(columns=(("y", ColumnKind.CONTINUOUS),), target_name="y")

    def test_needs_a_feature(self):
        with pytest.raises(ValidationError):
            Schema(columns=(), target_name="y")


class TestValidate:
    def test_well_formed_frame_passes(self):
        frame = DataFrame(
            schema=make_schema(),
            features=[[0.0, 1.0], [0.5, 2.0], [1.0, 3.0]],
            target=[0.1, 0.2, 0.3],
        )
        validate(frame)

    def test_binary_column_value_reported(self):
        frame = DataFrame(
            schema=make_schema(("continuous", "binary")),
            features=[[0.0, 1.0], [0.5, 0.3], [1.0, 0.0]],
            target=[0.1, 0.2, 0.3],
        )
        with pytest.raises(ValidationError, match="x2"):
            validate(frame)

    def test_length_mismatch_reported(self):
        frame = DataFrame(
            schema=make_schema(),
            features=np.zeros((5, 2)),
            target=np.zeros(4),
        )
        with pytest.raises(ValidationError, match="length mismatch"):
            validate(frame)

    def test_frames_are_immutable(self):
        frame = DataFrame(
            schema=make_schema(), features=np.zeros((2, 2)), target=np.zeros(2)
        )
        with pytest.raises(ValueError):
            frame.features[0, 0] = 1.0


class TestHistogramType:
    def test_counts_must_sum_to_n(self):
        with pytest.raises(ValidationError):
            FittedHistogram(bounds=Bounds(0, 1), h=2, counts=[1, 1], n=3)

    def test_density_normalizes_exactly(self):
        hist = FittedHistogram(bounds=Bounds(0, 1), h=4, counts=[1, 0, 2, 2], n=5)
        assert sum(int(c) for c in hist.counts) == hist.n

    def test_bounds_ordering_enforced(self):
        with pytest.raises(ValidationError):
            Bounds(1.0, 1.0)


class TestSplitCondition:
    def test_continuous_needs_granularity(self):
        with pytest.raises(ValidationError):
            SplitCondition(0, ColumnKind.CONTINUOUS, 0.5, None)

    def test_binary_fixed_at_half(self):
        with pytest.raises(ValidationError):
            SplitCondition(0, ColumnKind.BINARY, threshold=0.7)


def _tiny_tree(k_leaves: int) -> CdTree:
    bounds = Bounds(0.0, 1.0)

    def leaf(n):
        return Leaf(FittedHistogram(bounds=bounds, h=1, counts=[n], n=n))

    schema = make_schema()
    cond = SplitCondition(0, ColumnKind.CONTINUOUS, 0.5, 1)
    if k_leaves == 1:
        root = leaf(3)
    elif k_leaves == 2:
        root = Internal(cond, leaf(1), leaf(2))
    else:
        root = Internal(cond, Internal(cond, leaf(1), leaf(1)), leaf(1))
    return CdTree(schema=schema, bounds=bounds, root=root, config=FitConfig())


class TestTreeShape:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_full_binary_node_count(self, k):
        tree = _tiny_tree(k)
        leaves = sum(1 for _ in iter_leaves(tree.root))
        internal = sum(1 for _ in iter_internal(tree.root))
        assert leaves == k
        assert internal == leaves - 1

    def test_leaves_must_share_global_bounds(self):
        bounds = Bounds(0.0, 1.0)
        stray = Leaf(FittedHistogram(bounds=Bounds(0.0, 2.0), h=1, counts=[1], n=1))
        with pytest.raises(ValidationError, match="bounds"):
            CdTree(schema=make_schema(), bounds=bounds, root=stray, config=FitConfig())

    def test_split_kind_must_match_schema(self):
        bounds = Bounds(0.0, 1.0)
        leaf = Leaf(FittedHistogram(bounds=bounds, h=1, counts=[1], n=1))
        root = Internal(SplitCondition(1, ColumnKind.BINARY), leaf, leaf)
        with pytest.raises(ValidationError, match="kind"):
            CdTree(schema=make_schema(), bounds=bounds, root=root, config=FitConfig())


class TestFitConfig:
    @pytest.mark.parametrize(
        "kwargs", [{"c": 0}, {"g": 0}, {"boundary_pad": -1.0}, {"min_leaf": 0}]
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValidationError):
            FitConfig(**kwargs)


class TestMdlScore:
    def test_total_is_the_component_sum(self):
        score = MdlScore(
            data_nll_bits=-3.5,
            regret_bits=2.0,
            structure_bits=1.5,
            split_bits=0.5,
            bin_count_bits=3.0,
        )
        parts = (
            score.data_nll_bits
            + score.regret_bits
            + score.structure_bits
            + score.split_bits
            + score.bin_count_bits
        )
        assert abs(score.total_bits - parts) <= 1e-9 * abs(parts)

    def test_negative_regret_rejected(self):
        with pytest.raises(ValidationError):
            MdlScore(
                data_nll_bits=0.0,
                regret_bits=-1.0,
                structure_bits=0.0,
                split_bits=0.0,
                bin_count_bits=0.0,
            )
