"""Polynomial switching functions that embed point constraints.

Each family is the unique set of polynomials that act as Kronecker deltas
on a fixed list of constraint functionals over an interval [x0, xf]:

* alpha (2): value at x0, value at xf                      (linear)
* beta 1..3 (first segment): value at x0, value at xf,
  first derivative at xf                                   (quadratic)
* beta 4..6 (last segment): value at x0, first derivative
  at x0, value at xf                                       (quadratic)
* gamma 1..4 (middle segments): value at x0, value at xf,
  derivative at x0, derivative at xf                       (cubic Hermite)

All formulas are evaluated in the normalized variable t = (x - x0)/dx so
the delta property holds exactly (not merely to rounding) at the
interval endpoints.  Derivative orders 0..2 are supported.
"""

from __future__ import annotations

import numpy as np

from .basis import Interval

FAMILY_SIZES = {"alpha": 2, "beta": 6, "gamma": 4}

# Constraint functionals per family as (derivative order, endpoint) pairs,
# endpoint 0 = x0, 1 = xf.  Order matches the delta-property index.
FAMILY_CONSTRAINTS = {
    "alpha": ((0, 0), (0, 1)),
    "beta_first": ((0, 0), (0, 1), (1, 1)),
    "beta_last": ((0, 0), (1, 0), (0, 1)),
    "gamma": ((0, 0), (0, 1), (1, 0), (1, 1)),
}


def _normalize(iv: Interval, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < iv.x0) or np.any(x > iv.xf):
        raise ValueError(f"x={x} outside interval [{iv.x0}, {iv.xf}]")
    return (x - iv.x0) / iv.width, iv.width


def alpha(index: int, iv: Interval, x, d: int = 0):
    """Linear value-switching functions, index 1 (at x0) or 2 (at xf)."""
    t, dx = _normalize(iv, x)
    if index == 1:
        vals = {0: 1.0 - t, 1: -1.0 / dx + 0.0 * t, 2: 0.0 * t}
    elif index == 2:
        vals = {0: t, 1: 1.0 / dx + 0.0 * t, 2: 0.0 * t}
    else:
        raise ValueError(f"alpha index must be 1 or 2, got {index}")
    return _order(vals, d)


def beta(index: int, iv: Interval, x, d: int = 0):
    """Quadratic switching functions for boundary segments.

    1..3 treat xf as the junction (value at x0, value and derivative at
    xf); 4..6 treat x0 as the junction (value and derivative at x0,
    value at xf).
    """
    t, dx = _normalize(iv, x)
    s = t - 1.0  # (x - xf)/dx, zero exactly at xf
    if index == 1:
        vals = {0: s * s, 1: 2.0 * s / dx, 2: 2.0 / dx ** 2 + 0.0 * t}
    elif index == 2:
        # (x0-x)(x+x0-2xf)/dx^2 = -t*(t-2) = 1 - s*s
        vals = {0: -t * (t - 2.0), 1: -2.0 * s / dx, 2: -2.0 / dx ** 2 + 0.0 * t}
    elif index == 3:
        vals = {0: dx * t * s, 1: t + s, 2: 2.0 / dx + 0.0 * t}
    elif index == 4:
        # (xf-x)(x-2x0+xf)/dx^2 = -s*(t+1) = 1 - t*t
        vals = {0: -s * (t + 1.0), 1: -2.0 * t / dx, 2: -2.0 / dx ** 2 + 0.0 * t}
    elif index == 5:
        vals = {0: -dx * t * s, 1: -(t + s), 2: -2.0 / dx + 0.0 * t}
    elif index == 6:
        vals = {0: t * t, 1: 2.0 * t / dx, 2: 2.0 / dx ** 2 + 0.0 * t}
    else:
        raise ValueError(f"beta index must be 1..6, got {index}")
    return _order(vals, d)


def gamma(index: int, iv: Interval, x, d: int = 0):
    """Cubic Hermite switching functions for interior segments."""
    t, dx = _normalize(iv, x)
    if index == 1:
        vals = {0: 1.0 + t * t * (2.0 * t - 3.0),
                1: (6.0 * t * (t - 1.0)) / dx,
                2: (12.0 * t - 6.0) / dx ** 2}
    elif index == 2:
        vals = {0: t * t * (3.0 - 2.0 * t),
                1: (-6.0 * t * (t - 1.0)) / dx,
                2: (6.0 - 12.0 * t) / dx ** 2}
    elif index == 3:
        # dx * t * (t-1)^2
        vals = {0: dx * t * (t - 1.0) ** 2,
                1: 3.0 * t * t - 4.0 * t + 1.0,
                2: (6.0 * t - 4.0) / dx}
    elif index == 4:
        # dx * t^2 * (t-1)
        vals = {0: dx * t * t * (t - 1.0),
                1: 3.0 * t * t - 2.0 * t,
                2: (6.0 * t - 2.0) / dx}
    else:
        raise ValueError(f"gamma index must be 1..4, got {index}")
    return _order(vals, d)


def _order(vals: dict, d: int):
    if d not in vals:
        raise ValueError(f"derivative order {d} unsupported (0..2)")
    out = np.asarray(vals[d], dtype=float)
    return float(out) if out.ndim == 0 else out


def switching_eval(family: str, index: int, iv: Interval, x, d: int = 0):
    """Evaluate one switching function by family name and 1-based index."""
    try:
        fn = {"alpha": alpha, "beta": beta, "gamma": gamma}[family]
    except KeyError:
        raise ValueError(f"unknown switching family {family!r}") from None
    if not 1 <= index <= FAMILY_SIZES[family]:
        raise ValueError(f"{family} index must be 1..{FAMILY_SIZES[family]}, got {index}")
    return fn(index, iv, x, d)
