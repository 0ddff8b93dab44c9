import numpy as np
import pytest

from src.errors import DomainError
from src.reference.streams import block_generator, standard_normals, uniforms


def test_uniforms_lie_in_open_interval():
    values = uniforms(block_generator(0, (), 0), 100_000)
    assert values.min() > 0.0
    assert values.max() < 1.0


def test_blocks_are_independent_generators():
    first = uniforms(block_generator(7, (), 0), 10)
    second = uniforms(block_generator(7, (), 1), 10)
    assert not np.array_equal(first, second)


def test_deterministic():
    np.testing.assert_array_equal(standard_normals(2500, 11, (3,), block_size=1000),
                                  standard_normals(2500, 11, (3,), block_size=1000))


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_independent_of_worker_count(workers):
    expected = standard_normals(5000, 11, block_size=700, workers=1)
    np.testing.assert_array_equal(standard_normals(5000, 11, block_size=700, workers=workers), expected)


def test_shorter_run_is_a_prefix():
    long = standard_normals(3000, 4, block_size=1000)
    np.testing.assert_array_equal(standard_normals(10, 4, block_size=1000), long[:10])


def test_moments():
    z = standard_normals(200_000, 99)
    assert abs(z.mean()) < 0.01
    assert z.std() == pytest.approx(1.0, abs=0.01)


def test_negative_seed_rejected():
    with pytest.raises(DomainError):
        standard_normals(10, -1)


def test_empty_draw():
    assert standard_normals(0, 1).size == 0
