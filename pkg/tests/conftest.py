import numpy as np
import pytest

from cdtree import Bounds, RegretCache, leaf_score


@pytest.fixture
def cache():
    return RegretCache()


def exhaustive_optimal_h(values, bounds: Bounds, hmax: int, cache: RegretCache):
    """Brute-force bin-count search over h in [1, hmax]; ties to smallest h.

    Independent of the stepped search it checks: plain per-h scoring, no
    bracketing.
    """
    best = None
    for h in range(1, hmax + 1):
        score = leaf_score(values, bounds, h, cache)
        if best is None or score.total_bits < best.total_bits:
            best = score
    return best


def padded_bounds(values, pad=1e-3) -> Bounds:
    arr = np.asarray(values, dtype=np.float64)
    return Bounds(float(arr.min()) - pad, float(arr.max()) + pad)
