from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, TypeVar

from joblib import Parallel, delayed
from loguru import logger

from src.config import DEFAULTS
from src.errors import KdeError, NumericalFailure

T = TypeVar("T")


@dataclass(frozen=True)
class IndexSegment:
    """
    Represents a block of indices [start_idx, end_idx) and its position among all blocks
    """
    index: int
    start_idx: int
    end_idx: int

    @property
    def size(self) -> int:
        return self.end_idx - self.start_idx

    def as_slice(self) -> slice:
        return slice(self.start_idx, self.end_idx)


class TaskDistributor:
    """
    Splits an index range into fixed-size blocks and evaluates a handler on each block,
    serially or on a joblib thread pool.

    Block boundaries depend only on the block size, never on the worker count, and
    results come back in block order. Reductions over the blocks are therefore
    identical for every worker count.
    """
    def __init__(self,
                 block_size: Optional[int] = None,
                 workers: Optional[int] = None,
                 description: str = "Task Distributor"):
        """
        Initialize the TaskDistributor.

        Args:
            block_size (Optional[int]): Indices per block. Defaults to the configured block size.
            workers (Optional[int]): Number of worker threads. Defaults to the configured worker count.
            description (str): Name used in log messages
        """
        self._block_size = block_size or DEFAULTS.block_size
        self._workers = workers or DEFAULTS.workers
        self._description = description

    @property
    def workers(self) -> int:
        return self._workers

    def segment(self, total: int) -> List[IndexSegment]:
        """
        Cut [0, total) into consecutive blocks of at most ``block_size`` indices.

        Args:
            total (int): Number of indices

        Returns:
            List[IndexSegment]: Blocks in ascending order
        """
        if total < 0:
            raise ValueError(f"total must be non-negative, got {total}")
        return [
            IndexSegment(index=i, start_idx=start, end_idx=min(start + self._block_size, total))
            for i, start in enumerate(range(0, total, self._block_size))
        ]

    def _run_block(self, handler: Callable[[IndexSegment], T], segment: IndexSegment) -> T:
        try:
            return handler(segment)
        except KdeError:
            raise
        except Exception as e:
            raise NumericalFailure(
                f"{self._description}: block {segment.index} [{segment.start_idx}, {segment.end_idx}) failed: {e}"
            ) from e

    def map(self, handler: Callable[[IndexSegment], T], total: int) -> List[T]:
        """
        Evaluate ``handler`` on every block of [0, total).

        Args:
            handler (Callable[[IndexSegment], T]): Work for one block
            total (int): Number of indices

        Returns:
            List[T]: One result per block, in block order

        Raises:
            KdeError: Propagated unchanged from the handler
            NumericalFailure: If the handler raises anything else
        """
        segments = self.segment(total)
        logger.debug("{}: {} indices in {} blocks on {} workers",
                     self._description, total, len(segments), self._workers)
        if self._workers == 1 or len(segments) <= 1:
            return [self._run_block(handler, s) for s in segments]
        return Parallel(n_jobs=self._workers, prefer="threads")(
            delayed(self._run_block)(handler, s) for s in segments
        )

    def reduce_sum(self, handler: Callable[[IndexSegment], float], total: int) -> float:
        """Sum per-block partial sums in block order with exact rounding."""
        return math.fsum(self.map(handler, total))
