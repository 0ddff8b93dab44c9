"""
Counter-based random streams.

Every (seed, stream key, block index) triple owns an independent Philox-4x64
generator derived through numpy's SeedSequence. Draws are produced block by block
with a fixed block size, so the values never depend on how many workers fill them.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy.special import ndtri

from src.errors import DomainError
from src.tools.task_distributor import IndexSegment, TaskDistributor

_TWO_POW_53 = float(2 ** 53)


def block_generator(seed: int, stream: Sequence[int], block: int) -> np.random.Generator:
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream) + (int(block),))
    return np.random.Generator(np.random.Philox(sequence))


def uniforms(generator: np.random.Generator, size: int) -> np.ndarray:
    """Open-interval uniforms ((k >> 11) + 1/2) / 2^53 from raw 64-bit outputs."""
    raw = generator.bit_generator.random_raw(size)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO_POW_53


def standard_normals(n: int, seed: int, stream: Sequence[int] = (),
                     block_size: Optional[int] = None, workers: Optional[int] = None) -> np.ndarray:
    """
    Draw n standard normal variates by inverting the normal CDF.

    Args:
        n (int): Number of draws
        seed (int): Non-negative seed
        stream (Sequence[int]): Stream key, e.g. a replication index
        block_size (Optional[int]): Draws per block. Defaults to the configured block size.
        workers (Optional[int]): Worker threads

    Returns:
        np.ndarray: The draws
    """
    if n < 0:
        raise DomainError(f"number of draws must be non-negative, got {n}")
    out = np.empty(n)

    def fill(segment: IndexSegment) -> None:
        generator = block_generator(seed, stream, segment.index)
        out[segment.as_slice()] = ndtri(uniforms(generator, segment.size))

    TaskDistributor(block_size, workers, "normal draws").map(fill, n)
    logger.debug("drew {} normals (seed {}, stream {})", n, seed, tuple(stream))
    return out
