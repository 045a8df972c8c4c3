"""Stacked system matrices over per-segment collocation grids.

For a geometry of n segments the evaluations of y^(d) at all grid points
form y^(d) = A^(d) Xi + B^(d).  A^(d) is block sparse: each segment's
rows touch only its own basis coefficients and the junction unknowns at
its ends, every other entry is exactly 0.0 by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import BasisSpec, Grid, Interval, collocation_grid
from .expressions import (
    UnknownLayout,
    first_segment_block,
    last_segment_block,
    middle_segment_block,
    single_bvp_block,
)


def make_layout(n: int, m) -> UnknownLayout:
    """Layout for n segments with m basis functions per segment.

    m may be a single count (uniform) or one count per segment.
    """
    if n < 1:
        raise ValueError("need at least one segment")
    ms = (int(m),) * n if np.isscalar(m) else tuple(int(v) for v in m)
    if len(ms) != n:
        raise ValueError(f"expected {n} basis counts, got {len(ms)}")
    return UnknownLayout(ms=ms)


@dataclass(frozen=True)
class SegmentGrids:
    """Per-segment collocation grids with their bound basis specs."""

    grids: tuple[Grid, ...]
    specs: tuple[BasisSpec, ...]

    def __post_init__(self):
        if len(self.grids) != len(self.specs) or not self.grids:
            raise ValueError("need one basis spec per grid")
        for left, right in zip(self.grids, self.grids[1:]):
            if left.interval.xf != right.interval.x0:
                raise ValueError("consecutive grids must share the junction abscissa")

    @property
    def n_segments(self) -> int:
        return len(self.grids)

    @property
    def layout(self) -> UnknownLayout:
        return UnknownLayout(ms=tuple(s.m for s in self.specs))

    @property
    def total_points(self) -> int:
        return sum(g.n for g in self.grids)

    @property
    def all_points(self) -> np.ndarray:
        return np.concatenate([g.points for g in self.grids])

    def row_slice(self, k: int) -> slice:
        """Row range of segment k (1-based) in the stacked system."""
        start = sum(g.n for g in self.grids[: k - 1])
        return slice(start, start + self.grids[k - 1].n)


def segment_grids(break_points: Sequence[float], N, m, family: str = "chebyshev") -> SegmentGrids:
    """Build grids and basis specs from break points.

    N and m may be scalars (uniform) or one value per segment.
    """
    bp = [float(b) for b in break_points]
    if len(bp) < 2:
        raise ValueError("need at least two break points")
    if any(b >= c for b, c in zip(bp, bp[1:])):
        raise ValueError("break points must be strictly increasing")
    n = len(bp) - 1
    Ns = (int(N),) * n if np.isscalar(N) else tuple(int(v) for v in N)
    ms = (int(m),) * n if np.isscalar(m) else tuple(int(v) for v in m)
    if len(Ns) != n or len(ms) != n:
        raise ValueError(f"expected {n} per-segment values for N and m")
    grids, specs = [], []
    for k in range(n):
        iv = Interval(bp[k], bp[k + 1])
        grids.append(collocation_grid(iv, Ns[k]))
        specs.append(BasisSpec.for_interval(family, ms[k], iv))
    return SegmentGrids(grids=tuple(grids), specs=tuple(specs))


def assemble(grids: SegmentGrids, y0: float, yf: float, d: int):
    """Stacked (A^(d), B^(d)) for one derivative order.

    Rows follow segment order; segment 1 uses the first-segment
    expression (offset beta_1^(d) * y0), interior segments the
    gamma-based expression (zero offset), segment n the last-segment
    expression (offset beta_6^(d) * yf).  A single segment degenerates
    to the plain two-point boundary-value expression.
    """
    layout = grids.layout
    n = grids.n_segments
    A = np.zeros((grids.total_points, layout.total))
    B = np.zeros(grids.total_points)
    for k in range(1, n + 1):
        grid = grids.grids[k - 1]
        spec = grids.specs[k - 1]
        iv = grid.interval
        rows = grids.row_slice(k)
        if n == 1:
            coeffs, offs = single_bvp_block(spec, iv, y0, yf, grid.points, d)
        elif k == 1:
            coeffs, offs = first_segment_block(spec, iv, y0, grid.points, d, layout)
        elif k == n:
            coeffs, offs = last_segment_block(spec, iv, yf, grid.points, d, layout)
        else:
            coeffs, offs = middle_segment_block(spec, iv, k, grid.points, d, layout)
        A[rows] = coeffs
        B[rows] = offs
    return A, B


@dataclass(frozen=True)
class SystemMatrices:
    """A^(d) and B^(d) for d = 0, 1, 2 over one geometry."""

    A: tuple[np.ndarray, np.ndarray, np.ndarray]
    B: tuple[np.ndarray, np.ndarray, np.ndarray]
    grids: SegmentGrids

    @property
    def layout(self) -> UnknownLayout:
        return self.grids.layout

    def evaluate(self, xi: np.ndarray, d: int = 0) -> np.ndarray:
        """y^(d) at every stacked grid point for a given Xi."""
        return self.A[d] @ np.asarray(xi, dtype=float) + self.B[d]


def assemble_all(grids: SegmentGrids, y0: float, yf: float) -> SystemMatrices:
    """Assemble all three derivative orders at once."""
    parts = [assemble(grids, y0, yf, d) for d in (0, 1, 2)]
    return SystemMatrices(
        A=tuple(p[0] for p in parts),
        B=tuple(p[1] for p in parts),
        grids=grids,
    )
