"""Chunked thread-pool execution with order-preserving merges.

Work is split into contiguous index ranges, each range is processed by a worker
thread (numpy releases the GIL inside its kernels) and the partial results are
concatenated back in range order. Reductions are performed once, on the merged
array, so results do not depend on the thread count.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MIN_CHUNK = 65536


def chunk_bounds(size, threads, min_chunk=MIN_CHUNK):
    """Contiguous [start, stop) ranges covering range(size)"""
    if size == 0:
        return [(0, 0)]
    pieces = max(1, min(int(threads), -(-size // min_chunk)))
    edges = np.linspace(0, size, pieces + 1).astype(np.int64)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(pieces)]


def map_chunks(fn, arrays, threads=1, min_chunk=MIN_CHUNK):
    """Apply fn to aligned slices of arrays and merge the outputs in order.

    fn receives one slice per input array and returns an array or a tuple of
    arrays; the merged result has the same structure.
    """
    size = len(arrays[0])
    bounds = chunk_bounds(size, threads, min_chunk)
    if len(bounds) == 1:
        return fn(*arrays)

    def run(bound):
        start, stop = bound
        return fn(*(a[start:stop] for a in arrays))

    with ThreadPoolExecutor(max_workers=len(bounds)) as executor:
        parts = list(executor.map(run, bounds))

    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def fixed_order_sum(values):
    """Pairwise sum of a contiguous float64 array in index order"""
    return float(np.sum(np.ascontiguousarray(values, dtype=np.float64)))


def weighted_sum(weights, values):
    return fixed_order_sum(np.asarray(weights, dtype=np.float64) * np.asarray(values, dtype=np.float64))
