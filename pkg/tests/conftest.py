import numpy as np
import pytest

from semirelax import Field, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid_1d():
    return make_grid(1, 256, 40.0)


@pytest.fixture
def grid_2d():
    return make_grid(2, 32, 10.0)


@pytest.fixture
def grid_3d():
    return make_grid(3, 16, 10.0)


def random_field(grid, rng, spectral_decay=True):
    """A random complex field; optionally smoothed so norms of high order
    stay well conditioned."""
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    f = Field(grid, vals, "physical")
    if spectral_decay:
        from semirelax import apply_multiplier

        f = apply_multiplier(
            f, lambda xi: np.exp(-0.5 * sum(np.asarray(k) ** 2 for k in xi)),
            representation="physical",
        )
    return f
