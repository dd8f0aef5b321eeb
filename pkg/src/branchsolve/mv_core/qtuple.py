"""Unordered q-tuples of points in R^m and the permutation metric on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import DimensionError

# exhaustive search is cheaper than assignment setup up to this size
EXHAUSTIVE_MAX_Q = 6


@dataclass(frozen=True, eq=False)
class QTuple:
    """q points of R^m with unordered semantics.

    ``values`` has shape (q, m); storage order carries no meaning.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionError(f"QTuple values must have shape (q, m), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def q(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def sorted_values(self) -> np.ndarray:
        """Canonical representative (lexicographic order), useful for equality tests."""
        order = np.lexsort(self.values.T[::-1])
        return self.values[order]

    def __eq__(self, other):
        if not isinstance(other, QTuple):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(
            self.sorted_values(), other.sorted_values()
        )

    def __hash__(self):
        return hash(self.sorted_values().tobytes())


def _cost_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _exhaustive_min(cost: np.ndarray) -> float:
    q = cost.shape[0]
    rows = np.arange(q)
    best = np.inf
    for perm in itertools.permutations(range(q)):
        best = min(best, cost[rows, list(perm)].sum())
    return float(best)


def metric_G(a: QTuple, b: QTuple) -> float:
    """Distance between unordered tuples: min over permutations of the l2 pairing cost."""
    if a.q != b.q or a.m != b.m:
        raise DimensionError(f"tuple shapes differ: ({a.q}, {a.m}) vs ({b.q}, {b.m})")
    cost = _cost_matrix(a.values, b.values)
    if a.q <= EXHAUSTIVE_MAX_Q:
        total = _exhaustive_min(cost)
    else:
        rows, cols = linear_sum_assignment(cost)
        total = float(cost[rows, cols].sum())
    return float(np.sqrt(max(total, 0.0)))
