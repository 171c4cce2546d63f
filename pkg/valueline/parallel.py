#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Helpers to spread work among threads and MPI processes.

Every parallel computation in Valueline must produce the same result
regardless of the number of workers. The functions in this module help with
this: work is cut into blocks whose boundaries do not depend on the number of
workers, each block draws random numbers from its own stream (see
:func:`block_rngs`), and results are always reassembled in block order.'''

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List

import numpy as np


def split_into_n(length: int, num_of_segments: int) -> List[int]:
    '''Split a set of `length` elements into `num_of_segments` subsets.

    Segments can be empty when there are more segments than elements.

    Example::

        >>> split_into_n(10, 4)
        [2 3 2 3]
        >>> split_into_n(201, 2)
        [100 101]
    '''
    assert num_of_segments > 0
    assert length >= 0

    start_points = np.array([int(i * length / num_of_segments)
                             for i in range(num_of_segments + 1)])
    return start_points[1:] - start_points[:-1]


def indices_for_rank(length: int, rank: int, num_of_processes: int) -> List[int]:
    '''Return the indices of the elements that process `rank` must handle.

    The range ``[0, length)`` is split in contiguous chunks using
    :func:`split_into_n`.'''

    sizes = split_into_n(length, num_of_processes)
    start = int(np.sum(sizes[:rank]))
    return list(range(start, start + int(sizes[rank])))


def map_ordered(func: Callable[[Any], Any], items: Iterable[Any], threads=1) -> List[Any]:
    '''Apply `func` to each element of `items` and return the results in order.

    If `threads` is larger than one, the calls are spread over a pool of
    threads; the order of the result does not change.'''

    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def block_rngs(seed: int, num_of_blocks: int) -> List[np.random.Generator]:
    '''Return one independent random generator for each block of work.

    The streams depend only on `seed` and on the block index, never on the
    number of workers that will consume them.'''

    children = np.random.SeedSequence(seed).spawn(num_of_blocks)
    return [np.random.default_rng(x) for x in children]


def block_sizes(num_of_items: int, block_size: int) -> List[int]:
    'Cut `num_of_items` into blocks of `block_size` elements (the last may be shorter)'

    assert block_size > 0
    full, rest = divmod(num_of_items, block_size)
    return [block_size] * full + ([rest] if rest else [])
