"""Segment popularity from a truncated-Gaussian view-switching walk.

Viewers start on a camera view chosen uniformly at random; from one slot
to the next they hop from viewpoint v_i to viewpoint v_j (any lattice
point, virtual views included, self-hop allowed) with probability
proportional to a Gaussian kernel in the position difference, truncated
at a window W.  Per-slot marginals of that Markov chain give the
probability that a given segment is being watched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .views import ViewGrid


@dataclass(frozen=True)
class PopularityTable:
    """probs[k, t] = probability that slot t of grid viewpoint k is watched."""

    grid: ViewGrid
    probs: np.ndarray  # shape (grid.size, num_slots)

    def __post_init__(self):
        if self.probs.shape[0] != self.grid.size:
            raise ValueError("popularity rows must match the view grid")
        if np.any(self.probs < 0):
            raise ValueError("negative popularity")
        col_sums = self.probs.sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > 1e-9):
            raise ValueError("each slot's popularity must sum to 1")

    @property
    def num_slots(self) -> int:
        return self.probs.shape[1]


def switch_kernel(grid: ViewGrid, window: float, sigma2: float) -> np.ndarray:
    """Row-stochastic transition matrix over all grid viewpoints."""
    if window <= 0 or sigma2 <= 0:
        raise ValueError("window and variance must be positive")
    pos = np.array([grid.position(k) for k in range(grid.size)])
    diff = pos[None, :] - pos[:, None]
    kernel = np.exp(-(diff**2) / (2.0 * sigma2))
    kernel[np.abs(diff) > window] = 0.0
    return kernel / kernel.sum(axis=1, keepdims=True)


def popularity_table(
    grid: ViewGrid, num_slots: int, window: float = 8.0, sigma2: float | None = None
) -> PopularityTable:
    """Per-slot watch probabilities for every segment.

    Slot 1 is uniform over the camera views only; each later slot applies
    one step of the switching kernel.  ``sigma2`` defaults to
    5 / (virtual_per_gap + 1).
    """
    if num_slots < 1:
        raise ValueError("need at least one slot")
    if sigma2 is None:
        sigma2 = 5.0 / (grid.virtual_per_gap + 1)
    kernel = switch_kernel(grid, window, sigma2)
    probs = np.zeros((grid.size, num_slots))
    anchors = list(grid.anchor_grid_indices())
    probs[anchors, 0] = 1.0 / grid.anchor_count
    for t in range(1, num_slots):
        probs[:, t] = probs[:, t - 1] @ kernel
    return PopularityTable(grid, probs)
