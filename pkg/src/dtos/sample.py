from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from src.errors import DomainError


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Positive observations X_1..X_n with cached summaries of log X.

    ``log_std`` uses the n-1 divisor and is 0 for a single observation.
    """
    values: np.ndarray
    n: int = field(init=False)
    log_mean: float = field(init=False)
    log_std: float = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 1:
            raise DomainError("a sample set needs at least one observation")
        bad = np.flatnonzero(~(np.isfinite(values) & (values > 0)))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"observation {i + 1} is not a positive finite number: {values[i]!r}")
        values.setflags(write=False)
        logs = np.log(values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", int(values.size))
        object.__setattr__(self, "log_mean", float(np.mean(logs)))
        object.__setattr__(self, "log_std", float(np.std(logs, ddof=1)) if values.size > 1 else 0.0)

    @classmethod
    def of(cls, values: Iterable[float]) -> SampleSet:
        return cls(np.fromiter(values, dtype=float))

    def concat(self, other: SampleSet) -> SampleSet:
        return SampleSet(np.concatenate([self.values, other.values]))

    def without(self, index: int) -> SampleSet:
        """Return the sample set with observation ``index`` removed."""
        return SampleSet(np.delete(self.values, index))

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())
