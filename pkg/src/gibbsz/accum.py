"""Order-fixed compensated accumulation.

Every reduction in this package that feeds a reported value goes through
one of these helpers so that results are a pure function of the input
configuration: same config, same bits, regardless of thread count.
"""

from __future__ import annotations

import numpy as np


class CompensatedSum:
    """Running sum with Neumaier's correction term.

    Compared to a plain accumulator this keeps the low-order bits that
    would otherwise be lost when a small addend meets a large total, and
    unlike Kahan's original variant it also survives addends larger than
    the running total.
    """

    __slots__ = ("_total", "_comp")

    def __init__(self, start: float = 0.0):
        self._total = float(start)
        self._comp = 0.0

    def add(self, x: float) -> None:
        t = self._total + x
        if abs(self._total) >= abs(x):
            self._comp += (self._total - t) + x
        else:
            self._comp += (x - t) + self._total
        self._total = t

    def extend(self, xs) -> None:
        for x in xs:
            self.add(float(x))

    @property
    def value(self) -> float:
        return self._total + self._comp


def reduce_ordered(parts) -> float:
    """Compensated sum of ``parts`` in the order given.

    ``parts`` is any iterable of floats, typically per-chunk partial sums
    indexed by chunk number.  Workers may have produced them in any
    temporal order; the caller hands them over in index order and the
    result is then independent of how the work was scheduled.
    """
    acc = CompensatedSum()
    acc.extend(parts)
    return acc.value


def chunk_sum(values: np.ndarray) -> float:
    # pairwise inside a chunk: np.sum on a 1-d float64 array is pairwise
    # and stable across releases for a fixed array; no BLAS involved.
    return float(np.sum(values, dtype=np.float64))
