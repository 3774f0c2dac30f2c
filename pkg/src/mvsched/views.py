"""View lattice and synthesis-distortion model for multiview streaming.

Camera (anchor) views sit at integer positions 1..V on a one-dimensional
axis; between every adjacent camera pair the decoder can synthesize L
virtual viewpoints, so the full lattice has spacing 1/(L+1).  A viewpoint
that is not delivered is rendered from its nearest delivered camera views
on each side, at a distortion that grows exponentially both with the
reference span and with the distance to the closer reference:

    d(v; vl, vr) = gamma * exp(alpha_v * (vr - vl)) * (exp(beta_v * min(v - vl, vr - v)) - 1)

The two extreme cameras are always delivered, so every viewpoint has a
reference pair and distortion is capped by a finite ceiling ``d_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ViewGrid:
    """Anchor + virtual viewpoint lattice.

    Grid index k runs over 0..(anchor_count-1)*(virtual_per_gap+1); anchors
    sit at the multiples of (virtual_per_gap + 1).
    """

    anchor_count: int
    virtual_per_gap: int

    def __post_init__(self):
        if self.anchor_count <= 2:
            raise ValueError("need more than 2 anchor views")
        if self.virtual_per_gap < 0:
            raise ValueError("virtual views per gap must be >= 0")

    @property
    def spacing(self) -> float:
        return 1.0 / (self.virtual_per_gap + 1)

    @property
    def size(self) -> int:
        return (self.anchor_count - 1) * (self.virtual_per_gap + 1) + 1

    def position(self, k: int) -> float:
        return 1.0 + k * self.spacing

    def is_anchor(self, k: int) -> bool:
        return k % (self.virtual_per_gap + 1) == 0

    def anchor_grid_indices(self) -> tuple[int, ...]:
        step = self.virtual_per_gap + 1
        return tuple(i * step for i in range(self.anchor_count))

    @property
    def first_anchor(self) -> int:
        return 0

    @property
    def last_anchor(self) -> int:
        return (self.anchor_count - 1) * (self.virtual_per_gap + 1)

    def cacheable_anchors(self) -> tuple[int, ...]:
        """Anchors that policies may place/schedule: all but the two extremes."""
        return self.anchor_grid_indices()[1:-1]


def synth_distortion(
    v: float, v_l: float, v_r: float, gamma: float, alpha: float, beta: float
) -> float:
    """Distortion of viewpoint ``v`` rendered from references ``v_l <= v <= v_r``."""
    if not (v_l <= v <= v_r):
        raise ValueError(f"viewpoint {v} outside reference span [{v_l}, {v_r}]")
    if not v_l < v_r:
        raise ValueError("left reference must lie strictly left of the right one")
    return gamma * math.exp(alpha * (v_r - v_l)) * (
        math.exp(beta * min(v - v_l, v_r - v)) - 1.0
    )


@dataclass(frozen=True)
class DistortionModel:
    """Per-viewpoint distortion parameters over one grid, plus the ceiling.

    ``alpha`` and ``beta`` are indexed by grid position (constant in the
    default configuration, but kept per view).  ``d_max`` is the largest
    distortion any viewpoint can suffer under the worst delivered set, the
    one holding only the two extreme cameras; it makes distortion
    reduction nonnegative for every feasible policy.
    """

    grid: ViewGrid
    gamma: float
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    d_max: float

    @classmethod
    def for_grid(
        cls,
        grid: ViewGrid,
        gamma: float = 1.0,
        alpha: float | tuple[float, ...] = 0.05,
        beta: float | tuple[float, ...] = 0.3,
    ) -> "DistortionModel":
        if isinstance(alpha, (int, float)):
            alpha = tuple(float(alpha) for _ in range(grid.size))
        if isinstance(beta, (int, float)):
            beta = tuple(float(beta) for _ in range(grid.size))
        if len(alpha) != grid.size or len(beta) != grid.size:
            raise ValueError("alpha/beta must cover every grid viewpoint")
        if gamma <= 0 or any(a < 0 for a in alpha) or any(b < 0 for b in beta):
            raise ValueError("gamma must be positive, alpha/beta nonnegative")
        lo = grid.position(grid.first_anchor)
        hi = grid.position(grid.last_anchor)
        d_max = max(
            synth_distortion(grid.position(k), lo, hi, gamma, alpha[k], beta[k])
            for k in range(grid.size)
        )
        return cls(grid, gamma, alpha, beta, d_max)

    def distortion(self, k: int, left_anchor: int, right_anchor: int) -> float:
        """Distortion of grid viewpoint ``k`` from two anchor grid indices."""
        return synth_distortion(
            self.grid.position(k),
            self.grid.position(left_anchor),
            self.grid.position(right_anchor),
            self.gamma,
            self.alpha[k],
            self.beta[k],
        )


def nearest_delivered_pair(
    grid: ViewGrid, delivered: frozenset[int], k: int
) -> tuple[int, int]:
    """Closest delivered anchors left and right of grid viewpoint ``k``.

    ``delivered`` must contain both extreme anchors, so the pair always
    exists; a delivered viewpoint returns itself on both sides.
    """
    left = max(a for a in delivered if a <= k)
    right = min(a for a in delivered if a >= k)
    return left, right


def viewpoint_distortions(
    model: DistortionModel, delivered: frozenset[int]
) -> dict[int, float]:
    """Reconstruction distortion of every grid viewpoint under a delivered set.

    Delivered anchors come out at exactly 0; everything else is rendered
    from its nearest delivered pair.
    """
    grid = model.grid
    if grid.first_anchor not in delivered or grid.last_anchor not in delivered:
        raise ValueError("delivered set must contain both extreme anchors")
    step = grid.virtual_per_gap + 1
    for a in delivered:
        if a % step != 0 or not 0 <= a <= grid.last_anchor:
            raise ValueError(f"delivered index {a} is not an anchor")
    out: dict[int, float] = {}
    for k in range(grid.size):
        if k in delivered:
            out[k] = 0.0
        else:
            left, right = nearest_delivered_pair(grid, delivered, k)
            out[k] = model.distortion(k, left, right)
    return out


def reduction_given_anchors(model: DistortionModel, delivered: frozenset[int], k: int) -> float:
    """Distortion reduction d_max - d for one viewpoint under a delivered set."""
    if k in delivered:
        return model.d_max
    left, right = nearest_delivered_pair(model.grid, delivered, k)
    return model.d_max - model.distortion(k, left, right)
