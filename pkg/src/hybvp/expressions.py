"""Constrained expressions as affine functionals of the global unknowns.

A segment solution is written as a free basis expansion plus switching
functions that pin boundary values and junction values/slopes.  Every
evaluation y^(d)(x) is therefore affine in the global unknown vector

    Xi = [xi_(1), y_1, y'_1, xi_(2), y_2, y'_2, ..., y_{n-1}, y'_{n-1}, xi_(n)]

and is materialized as a coefficient row plus a scalar offset.  Because
the switching functions are exact Kronecker deltas, boundary and C1
junction constraints hold for every Xi, before any solving.

The alpha-based two-segment cascade construction, which eliminates the
junction value analytically instead of treating it as an unknown, is
provided as an independent cross-validation path.

The free function of a segment with k embedded constraints skips the
first k basis polynomials: the constraint support reproduces every
polynomial up to degree k-1 exactly, so those directions cancel out of
the expression identically and would only add null columns.  A segment
with m free coefficients therefore spans polynomial degrees up to
k + m - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, Interval, eval_basis, map_point
from .switching import alpha, beta, gamma

# leading basis functions skipped per constraint structure
SINGLE_SKIP = 2    # value at both ends
BOUNDARY_SKIP = 3  # value at both ends + slope at the junction end
MIDDLE_SKIP = 4    # value and slope at both ends


@dataclass(frozen=True)
class UnknownLayout:
    """Index bookkeeping for the global unknown vector.

    Segment k (1-based) owns ms[k-1] basis coefficients; junction j
    (1-based, between segments j and j+1) owns two scalars (value y_j and
    slope y'_j) stored immediately after segment j's coefficients.
    """

    ms: tuple[int, ...]

    def __post_init__(self):
        if len(self.ms) < 1 or any(m < 1 for m in self.ms):
            raise ValueError("each segment needs at least one basis function")
        object.__setattr__(self, "ms", tuple(int(m) for m in self.ms))

    @property
    def n_segments(self) -> int:
        return len(self.ms)

    @property
    def total(self) -> int:
        return sum(self.ms) + 2 * (self.n_segments - 1)

    def xi_slice(self, k: int) -> slice:
        """Column range of segment k's basis coefficients, k = 1..n."""
        if not 1 <= k <= self.n_segments:
            raise ValueError(f"segment index {k} out of range 1..{self.n_segments}")
        start = sum(self.ms[: k - 1]) + 2 * (k - 1)
        return slice(start, start + self.ms[k - 1])

    def junction_value_index(self, j: int) -> int:
        """Column of y_j, j = 1..n-1."""
        if not 1 <= j <= self.n_segments - 1:
            raise ValueError(f"junction index {j} out of range 1..{self.n_segments - 1}")
        return self.xi_slice(j).stop

    def junction_slope_index(self, j: int) -> int:
        """Column of y'_j, j = 1..n-1."""
        return self.junction_value_index(j) + 1


@dataclass(frozen=True)
class AffineRow:
    """One evaluation y^(d)(x) = coeffs . Xi + offset."""

    coeffs: np.ndarray
    offset: float

    def __call__(self, xi: np.ndarray) -> float:
        return float(self.coeffs @ np.asarray(xi, dtype=float) + self.offset)


def _shifted(spec: BasisSpec, skip: int) -> BasisSpec:
    return BasisSpec(spec.family, spec.m + skip, spec.c)


def _support_values(spec: BasisSpec, skip: int):
    """Free-function rows entering the junction/boundary support terms.

    h at both endpoints and c*h' at both endpoints (the x-derivative of
    the expansion, so the map slope is baked in here).
    """
    wide = _shifted(spec, skip)
    h0 = eval_basis(wide, -1.0, 0)[skip:]
    h1 = eval_basis(wide, 1.0, 0)[skip:]
    dh0 = spec.c * eval_basis(wide, -1.0, 1)[skip:]
    dh1 = spec.c * eval_basis(wide, 1.0, 1)[skip:]
    return h0, h1, dh0, dh1


def _free_rows(spec: BasisSpec, iv: Interval, x: np.ndarray, d: int, skip: int) -> np.ndarray:
    """c^d * h^(d)(z(x)) for each point, shape (len(x), m)."""
    z = map_point(iv, x)
    return (spec.c ** d) * eval_basis(_shifted(spec, skip), np.atleast_1d(z), d)[:, skip:]


def single_bvp_block(spec, iv, y0, yf, x, d):
    """Vectorized rows of the one-segment boundary-value expression."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h0, h1, _, _ = _support_values(spec, SINGLE_SKIP)
    a1 = np.atleast_1d(alpha(1, iv, x, d))
    a2 = np.atleast_1d(alpha(2, iv, x, d))
    coeffs = _free_rows(spec, iv, x, d, SINGLE_SKIP) - np.outer(a1, h0) - np.outer(a2, h1)
    offsets = a1 * y0 + a2 * yf
    return coeffs, offsets


def first_segment_block(spec, iv, y0, x, d, layout: UnknownLayout):
    """Vectorized rows of the first-segment expression over the layout."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h0, h1, _, dh1 = _support_values(spec, BOUNDARY_SKIP)
    b1 = np.atleast_1d(beta(1, iv, x, d))
    b2 = np.atleast_1d(beta(2, iv, x, d))
    b3 = np.atleast_1d(beta(3, iv, x, d))
    coeffs = np.zeros((x.size, layout.total))
    coeffs[:, layout.xi_slice(1)] = (
        _free_rows(spec, iv, x, d, BOUNDARY_SKIP)
        - np.outer(b1, h0) - np.outer(b2, h1) - np.outer(b3, dh1)
    )
    coeffs[:, layout.junction_value_index(1)] = b2
    coeffs[:, layout.junction_slope_index(1)] = b3
    return coeffs, b1 * y0


def middle_segment_block(spec, iv, k, x, d, layout: UnknownLayout):
    """Vectorized rows of interior segment k (2 <= k <= n-1)."""
    if not 2 <= k <= layout.n_segments - 1:
        raise ValueError(f"middle segment index {k} out of range 2..{layout.n_segments - 1}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h0, h1, dh0, dh1 = _support_values(spec, MIDDLE_SKIP)
    g1 = np.atleast_1d(gamma(1, iv, x, d))
    g2 = np.atleast_1d(gamma(2, iv, x, d))
    g3 = np.atleast_1d(gamma(3, iv, x, d))
    g4 = np.atleast_1d(gamma(4, iv, x, d))
    coeffs = np.zeros((x.size, layout.total))
    coeffs[:, layout.xi_slice(k)] = (
        _free_rows(spec, iv, x, d, MIDDLE_SKIP)
        - np.outer(g1, h0) - np.outer(g2, h1) - np.outer(g3, dh0) - np.outer(g4, dh1)
    )
    coeffs[:, layout.junction_value_index(k - 1)] = g1
    coeffs[:, layout.junction_slope_index(k - 1)] = g3
    coeffs[:, layout.junction_value_index(k)] = g2
    coeffs[:, layout.junction_slope_index(k)] = g4
    return coeffs, np.zeros(x.size)


def last_segment_block(spec, iv, yf, x, d, layout: UnknownLayout):
    """Vectorized rows of the final-segment expression."""
    n = layout.n_segments
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h0, h1, dh0, _ = _support_values(spec, BOUNDARY_SKIP)
    b4 = np.atleast_1d(beta(4, iv, x, d))
    b5 = np.atleast_1d(beta(5, iv, x, d))
    b6 = np.atleast_1d(beta(6, iv, x, d))
    coeffs = np.zeros((x.size, layout.total))
    coeffs[:, layout.xi_slice(n)] = (
        _free_rows(spec, iv, x, d, BOUNDARY_SKIP)
        - np.outer(b4, h0) - np.outer(b5, dh0) - np.outer(b6, h1)
    )
    coeffs[:, layout.junction_value_index(n - 1)] = b4
    coeffs[:, layout.junction_slope_index(n - 1)] = b5
    return coeffs, b6 * yf


def single_bvp_row(spec, iv, y0, yf, x, d=0) -> AffineRow:
    coeffs, offsets = single_bvp_block(spec, iv, y0, yf, x, d)
    return AffineRow(coeffs[0], float(offsets[0]))


def first_segment_row(spec, iv, y0, x, d, layout) -> AffineRow:
    coeffs, offsets = first_segment_block(spec, iv, y0, x, d, layout)
    return AffineRow(coeffs[0], float(offsets[0]))


def middle_segment_row(spec, iv, k, x, d, layout) -> AffineRow:
    coeffs, offsets = middle_segment_block(spec, iv, k, x, d, layout)
    return AffineRow(coeffs[0], float(offsets[0]))


def last_segment_row(spec, iv, yf, x, d, layout) -> AffineRow:
    coeffs, offsets = last_segment_block(spec, iv, yf, x, d, layout)
    return AffineRow(coeffs[0], float(offsets[0]))


# --- alpha-based two-segment cascade (cross-validation path) ------------

def _check_cascade_geometry(iv1: Interval, iv2: Interval):
    if iv1.xf != iv2.x0:
        raise ValueError("cascade segments must share the junction abscissa")


def cascade_junction_coeffs(spec1, spec2, iv1, iv2, y0, yf):
    """Junction value y1 as an affine function of (xi1, xi2).

    Returns (w1, w2, b) with y1 = w1.xi1 + w2.xi2 + b, obtained by
    matching first derivatives of the two alpha-based expressions at the
    shared junction.
    """
    _check_cascade_geometry(iv1, iv2)
    x1 = iv1.xf
    da2_left = alpha(2, iv1, x1, 1)   # slope of the left final-value switch
    da1_right = alpha(1, iv2, iv2.x0, 1)
    da1_left = alpha(1, iv1, x1, 1)
    da2_right = alpha(2, iv2, iv2.x0, 1)
    denom = da2_left - da1_right
    if denom == 0.0:
        raise ZeroDivisionError("degenerate cascade junction (zero switching-slope gap)")
    h1_at_x0, h1_at_x1, _, dh1_at_x1 = _support_values(spec1, SINGLE_SKIP)
    h2_at_x1, h2_at_xf, dh2_at_x1, _ = _support_values(spec2, SINGLE_SKIP)
    w1 = (-dh1_at_x1 + da1_left * h1_at_x0 + da2_left * h1_at_x1) / denom
    w2 = (dh2_at_x1 - da1_right * h2_at_x1 - da2_right * h2_at_xf) / denom
    b = (-da1_left * y0 + da2_right * yf) / denom
    return w1, w2, b


def cascade_junction_value(g1_data, g2_data, iv1, iv2, y0, yf) -> float:
    """The unique junction value making the cascade expressions C1.

    g1_data and g2_data are (BasisSpec, coefficient vector) pairs for the
    two free functions.
    """
    (spec1, xi1), (spec2, xi2) = g1_data, g2_data
    w1, w2, b = cascade_junction_coeffs(spec1, spec2, iv1, iv2, y0, yf)
    return float(w1 @ np.asarray(xi1, float) + w2 @ np.asarray(xi2, float) + b)


def cascade_block(spec1, spec2, iv1, iv2, y0, yf, x, d):
    """Rows of the cascade expression over stacked unknowns (xi1, xi2).

    Each left-segment row depends on xi2 (and vice versa) through the
    eliminated junction value, so the system is dense, not block
    diagonal.
    """
    _check_cascade_geometry(iv1, iv2)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m1, m2 = spec1.m, spec2.m
    w1, w2, b = cascade_junction_coeffs(spec1, spec2, iv1, iv2, y0, yf)
    coeffs = np.zeros((x.size, m1 + m2))
    offsets = np.zeros(x.size)
    h1_at_x0, h1_at_x1, _, _ = _support_values(spec1, SINGLE_SKIP)
    h2_at_x1, h2_at_xf, _, _ = _support_values(spec2, SINGLE_SKIP)
    left = x <= iv1.xf
    if np.any(left):
        xs = x[left]
        a1 = np.atleast_1d(alpha(1, iv1, xs, d))
        a2 = np.atleast_1d(alpha(2, iv1, xs, d))
        block = np.zeros((xs.size, m1 + m2))
        block[:, :m1] = (_free_rows(spec1, iv1, xs, d, SINGLE_SKIP)
                         - np.outer(a1, h1_at_x0)
                         - np.outer(a2, h1_at_x1))
        block[:, :m1] += np.outer(a2, w1)
        block[:, m1:] = np.outer(a2, w2)
        coeffs[left] = block
        offsets[left] = a1 * y0 + a2 * b
    right = ~left
    if np.any(right):
        xs = x[right]
        a1 = np.atleast_1d(alpha(1, iv2, xs, d))
        a2 = np.atleast_1d(alpha(2, iv2, xs, d))
        block = np.zeros((xs.size, m1 + m2))
        block[:, m1:] = (_free_rows(spec2, iv2, xs, d, SINGLE_SKIP)
                         - np.outer(a1, h2_at_x1)
                         - np.outer(a2, h2_at_xf))
        block[:, m1:] += np.outer(a1, w2)
        block[:, :m1] = np.outer(a1, w1)
        coeffs[right] = block
        offsets[right] = a1 * b + a2 * yf
    return coeffs, offsets


def cascade_eval(g1_data, g2_data, iv1, iv2, y0, yf, x, d=0):
    """Evaluate the cascade expression at x for concrete free functions."""
    (spec1, xi1), (spec2, xi2) = g1_data, g2_data
    coeffs, offsets = cascade_block(spec1, spec2, iv1, iv2, y0, yf, x, d)
    xi = np.concatenate([np.asarray(xi1, float), np.asarray(xi2, float)])
    out = coeffs @ xi + offsets
    return float(out[0]) if np.ndim(x) == 0 else out
