import numpy as np
import pytest

from hatt import gaussian_tt


def random_chain(rng, d, hi):
    """Random rank chain (1, ..., 1) with interior entries in 1..hi."""
    return (1,) + tuple(int(rng.integers(1, hi + 1)) for _ in range(d - 1)) + (1,)


def random_pair(rng, d, n, max_rank, seed_base=0):
    """A pair of gaussian TT tensors with independent random rank chains."""
    shape = (n,) * d
    y = gaussian_tt(shape, random_chain(rng, d, max_rank),
                    seed=seed_base + int(rng.integers(0, 2**31)))
    z = gaussian_tt(shape, random_chain(rng, d, max_rank),
                    seed=seed_base + int(rng.integers(0, 2**31)))
    return y, z


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
