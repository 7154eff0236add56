"""Operation-count comparison of three ways to realize an N-outcome POVM.

Counts are formula evaluations at the level of pairwise (two-level) unitary
operations, not synthesized gate decompositions:

  one-shot projective extension    N (N - 1) / 2
  single extra dimension, iterated (N - d) (d + 1) d / 2   (worst case)
  binary measurement tree          ceil(log2 N) * d (2d - 1)

The binary tree applies one 2d x 2d coupling per level, hence the
``d (2d - 1)`` pairwise interactions repeated ``ceil(log2 N)`` times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionsError


@dataclass(frozen=True)
class CostReport:
    """Operation counts for one (N, d) pair.

    ``single_extra_dim_ops_average`` is half the worst case, valid under the
    assumption of equally likely outcomes; it is only filled in on request.
    """

    n_outcomes: int
    dim: int
    neumark_ops: int
    single_extra_dim_ops: int
    binary_tree_ops: int
    binary_tree_depth: int
    single_extra_dim_ops_average: float | None = None


def compare(n: int, d: int, average: bool = False) -> CostReport:
    """Evaluate the three cost formulas for N outcomes on a d-level system."""
    n, d = int(n), int(d)
    if n < 2 or d < 2 or n < d:
        raise InvalidDimensionsError(f"need N >= d >= 2, got N={n}, d={d}")
    depth = math.ceil(math.log2(n))
    single = (n - d) * (d + 1) * d // 2
    return CostReport(
        n_outcomes=n,
        dim=d,
        neumark_ops=n * (n - 1) // 2,
        single_extra_dim_ops=single,
        binary_tree_ops=depth * d * (2 * d - 1),
        binary_tree_depth=depth,
        single_extra_dim_ops_average=single / 2 if average else None,
    )


def crossover(d: int, n_max: int = 1 << 20) -> int | None:
    """Smallest N from which the strict chain binary < single-extra < one-shot holds.

    Scans every N up to ``n_max`` and returns the first N after the last
    violation, or None if the chain never settles within the scanned range.
    """
    if d < 2:
        raise InvalidDimensionsError(f"need d >= 2, got d={d}")
    ns = np.arange(max(d, 2), n_max + 1, dtype=np.int64)
    depth = np.ceil(np.log2(ns)).astype(np.int64)
    neumark = ns * (ns - 1) // 2
    single = (ns - d) * (d + 1) * d // 2
    binary = depth * d * (2 * d - 1)
    holds = (binary < single) & (single < neumark)
    if not holds[-1]:
        return None
    violations = np.nonzero(~holds)[0]
    first = 0 if violations.size == 0 else violations[-1] + 1
    return int(ns[first])
