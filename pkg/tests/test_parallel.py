import numpy as np
import pytest

from parallel import chunk_bounds, fixed_order_sum, map_chunks, weighted_sum


@pytest.mark.parametrize('size, threads', [(0, 4), (10, 1), (10, 4), (1000, 3), (200_000, 8)])
def test_chunk_bounds_cover_range(size, threads):
    bounds = chunk_bounds(size, threads, min_chunk=16)
    assert bounds[0][0] == 0 and bounds[-1][1] == size
    assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))
    assert len(bounds) <= max(1, threads)


def test_small_inputs_run_in_one_chunk():
    assert chunk_bounds(100, 8) == [(0, 100)]


def test_map_chunks_preserves_order(rng):
    values = rng.random(10_000)
    merged = map_chunks(np.sqrt, [values], threads=4, min_chunk=100)
    assert np.array_equal(merged, np.sqrt(values))


def test_map_chunks_tuple_outputs(rng):
    a, b = rng.random(5000), rng.random(5000)
    total, product = map_chunks(lambda x, y: (x + y, x * y), [a, b], threads=3, min_chunk=64)
    assert np.array_equal(total, a + b)
    assert np.array_equal(product, a * b)


def test_reductions_do_not_depend_on_threads(rng):
    values = rng.standard_normal(300_000)
    one = fixed_order_sum(map_chunks(np.exp, [values], threads=1, min_chunk=1000))
    many = fixed_order_sum(map_chunks(np.exp, [values], threads=7, min_chunk=1000))
    assert one == many


def test_weighted_sum():
    assert weighted_sum([0.25, 0.75], [4.0, 8.0]) == 7.0
