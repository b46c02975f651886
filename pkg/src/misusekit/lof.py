"""Local Outlier Factor over binary feature vectors (novelty-style scoring)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class LofModel:
    """Stores training vectors and k; queries score against the stored set.

    Distances are Euclidean over the bit coordinates. Exact duplicates of a
    training vector are inliers by definition (factor 1.0): the usage was
    seen during training, so there is nothing novel about it.
    """

    vectors: list[tuple[int, ...]]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k >= len(self.vectors):
            raise ValueError("k must be smaller than the training set")
        self._x = np.asarray(self.vectors, dtype=float)
        n = len(self.vectors)
        diff = self._x[:, None, :] - self._x[None, :, :]
        dists = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(dists, np.inf)  # a training point is not its own neighbor
        self._kdist = np.partition(dists, self.k - 1, axis=1)[:, self.k - 1]
        self._neighbors = [np.flatnonzero(dists[i] <= self._kdist[i]) for i in range(n)]
        self._lrd = np.empty(n)
        for i in range(n):
            reach = np.maximum(self._kdist[self._neighbors[i]], dists[i][self._neighbors[i]])
            total = reach.sum()
            self._lrd[i] = math.inf if total == 0.0 else len(self._neighbors[i]) / total

    def factor(self, v: tuple[int, ...]) -> float:
        """Outlier factor of a query point relative to the training set."""
        q = np.asarray(v, dtype=float)
        dists = np.sqrt(((self._x - q) ** 2).sum(axis=1))
        if dists.min() == 0.0:
            return 1.0
        kdist = np.partition(dists, self.k - 1)[self.k - 1]
        neighbors = np.flatnonzero(dists <= kdist)
        reach = np.maximum(self._kdist[neighbors], dists[neighbors])
        lrd_q = len(neighbors) / reach.sum()
        neighbor_lrds = self._lrd[neighbors]
        if np.isinf(neighbor_lrds).any():
            return math.inf
        return float(neighbor_lrds.mean() / lrd_q)


def default_k(n_train: int) -> int:
    return max(1, min(20, n_train // 2))
