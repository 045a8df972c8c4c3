"""Hybrid boundary-value problem definitions.

A problem is an ordered list of second-order ODE segments over break
points x0 < x1 < ... < xf with boundary values y(x0) and y(xf).  Each
segment supplies its residual L(x, y, y', y'') and the three partials
dL/dy, dL/dy', dL/dy'' used to build Gauss-Newton Jacobians by the chain
rule.  Three classic test sequences with closed-form solutions are built
in, plus a constructor for user-posed piecewise linear ODEs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .assembly import SegmentGrids, segment_grids
from .basis import BasisSpec, Interval, eval_basis, map_point
from .expressions import (
    BOUNDARY_SKIP,
    first_segment_block,
    last_segment_block,
    middle_segment_block,
    single_bvp_block,
)
from .switching import beta

Array = np.ndarray
StateFn = Callable[[Array, Array, Array, Array], Array]

BUILTIN_NAMES = ("linear_linear", "linear_nonlinear", "nonlinear_nonlinear")


@dataclass(frozen=True)
class SegmentDynamics:
    """One segment's residual L(x, y, y', y'') and its state partials."""

    residual: StateFn
    d_y: StateFn
    d_dy: StateFn
    d_d2y: StateFn
    is_linear: bool = False
    # (a2, a1, a0, f) callables of x when is_linear
    linear_coeffs: Optional[tuple] = None


def _as_coeff_fn(c) -> Callable[[Array], Array]:
    if callable(c):
        return c
    value = float(c)
    return lambda x: np.full_like(np.asarray(x, dtype=float), value)


def linear_dynamics(a2, a1=0.0, a0=0.0, f=0.0) -> SegmentDynamics:
    """Segment a2(x) y'' + a1(x) y' + a0(x) y = f(x).

    Coefficients may be constants or callables of x.
    """
    a2f, a1f, a0f, ff = (_as_coeff_fn(c) for c in (a2, a1, a0, f))

    def residual(x, y, dy, d2y):
        return a2f(x) * d2y + a1f(x) * dy + a0f(x) * y - ff(x)

    return SegmentDynamics(
        residual=residual,
        d_y=lambda x, y, dy, d2y: a0f(x),
        d_dy=lambda x, y, dy, d2y: a1f(x),
        d_d2y=lambda x, y, dy, d2y: a2f(x),
        is_linear=True,
        linear_coeffs=(a2f, a1f, a0f, ff),
    )


def nonlinear_dynamics(residual: StateFn, d_y: StateFn, d_dy: StateFn, d_d2y: StateFn) -> SegmentDynamics:
    """Segment with a user-supplied nonlinear residual and partials."""
    return SegmentDynamics(residual=residual, d_y=d_y, d_dy=d_dy, d_d2y=d_d2y, is_linear=False)


@dataclass(frozen=True)
class HybridProblem:
    """Piecewise second-order two-point BVP with C1 junctions."""

    break_points: tuple[float, ...]
    segments: tuple[SegmentDynamics, ...]
    y0: float
    yf: float
    name: str = ""
    # per-segment (y, y', y'') closed-form callables, when known
    solution: Optional[tuple] = None
    default_m: Optional[int] = None

    def __post_init__(self):
        bp = tuple(float(b) for b in self.break_points)
        object.__setattr__(self, "break_points", bp)
        if len(bp) < 2 or any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("break points must be strictly increasing")
        if len(self.segments) != len(bp) - 1:
            raise ValueError("segment count must match break-point intervals")
        if not (math.isfinite(self.y0) and math.isfinite(self.yf)):
            raise ValueError("boundary values must be finite")

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def is_linear(self) -> bool:
        return all(s.is_linear for s in self.segments)

    def interval(self, k: int) -> Interval:
        """Closed interval of segment k, 1-based."""
        return Interval(self.break_points[k - 1], self.break_points[k])

    def segment_of(self, x) -> np.ndarray:
        """0-based segment index per point; junctions belong to the left segment."""
        interior = np.asarray(self.break_points[1:-1])
        return np.searchsorted(interior, np.asarray(x, dtype=float), side="left")


def analytic_value(problem: HybridProblem, x, d: int = 0):
    """Closed-form solution value or derivative (d = 0..2) at x."""
    if problem.solution is None:
        raise ValueError(f"problem {problem.name!r} has no analytic solution attached")
    if d not in (0, 1, 2):
        raise ValueError("derivative order must be 0..2")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < problem.break_points[0]) or np.any(xs > problem.break_points[-1]):
        raise ValueError("x outside problem domain")
    seg = problem.segment_of(xs)
    out = np.empty_like(xs)
    for k in range(problem.n_segments):
        mask = seg == k
        if np.any(mask):
            out[mask] = problem.solution[k][d](xs[mask])
    return float(out[0]) if np.ndim(x) == 0 else out


def builtin(name: str) -> HybridProblem:
    """One of the three built-in hybrid sequences with known solutions."""
    if name == "linear_linear":
        return _linear_linear()
    if name == "linear_nonlinear":
        return _linear_nonlinear()
    if name == "nonlinear_nonlinear":
        return _nonlinear_nonlinear()
    raise ValueError(f"unknown builtin problem {name!r}; choose from {BUILTIN_NAMES}")


def _linear_linear() -> HybridProblem:
    # y'' = x^2 + a with a = 0 then 1, switching at x = 0.5
    seg1 = linear_dynamics(a2=1.0, f=lambda x: x ** 2)
    seg2 = linear_dynamics(a2=1.0, f=lambda x: x ** 2 + 1.0)
    sol = (
        (lambda x: x ** 4 / 12.0 + 19.0 * x / 24.0,
         lambda x: x ** 3 / 3.0 + 19.0 / 24.0,
         lambda x: x ** 2),
        (lambda x: x ** 4 / 12.0 + x ** 2 / 2.0 + 7.0 * x / 24.0 + 0.125,
         lambda x: x ** 3 / 3.0 + x + 7.0 / 24.0,
         lambda x: x ** 2 + 1.0),
    )
    return HybridProblem(
        break_points=(0.0, 0.5, 1.0),
        segments=(seg1, seg2),
        y0=0.0,
        yf=1.0,
        name="linear_linear",
        solution=sol,
        default_m=8,
    )


def _linear_nonlinear() -> HybridProblem:
    # y'' + y * y'^a = E e^{-x} - E^2 e^{-2x} with a = 0 then 1,
    # switching at x = pi/2, where E = e^{pi/2}.
    E = math.exp(math.pi / 2.0)

    def forcing(x):
        return E * np.exp(-x) - E * E * np.exp(-2.0 * x)

    seg1 = linear_dynamics(a2=1.0, a0=1.0, f=forcing)

    def residual2(x, y, dy, d2y):
        return d2y + y * dy - forcing(x)

    seg2 = nonlinear_dynamics(
        residual=residual2,
        d_y=lambda x, y, dy, d2y: dy,
        d_dy=lambda x, y, dy, d2y: y,
        d_d2y=lambda x, y, dy, d2y: np.ones_like(np.asarray(x, dtype=float)),
    )
    sol = (
        (lambda x: -0.2 * E * E * np.exp(-2.0 * x) + 0.5 * E * np.exp(-x)
            + (9.0 * np.cos(x) + 7.0 * np.sin(x)) / 10.0,
         lambda x: 0.4 * E * E * np.exp(-2.0 * x) - 0.5 * E * np.exp(-x)
            + (7.0 * np.cos(x) - 9.0 * np.sin(x)) / 10.0,
         lambda x: -0.8 * E * E * np.exp(-2.0 * x) + 0.5 * E * np.exp(-x)
            - (9.0 * np.cos(x) + 7.0 * np.sin(x)) / 10.0),
        (lambda x: E * np.exp(-x),
         lambda x: -E * np.exp(-x),
         lambda x: E * np.exp(-x)),
    )
    return HybridProblem(
        break_points=(0.0, math.pi / 2.0, math.pi),
        segments=(seg1, seg2),
        y0=0.9 + 0.1 * E * (5.0 - 2.0 * E),
        yf=1.0 / E,
        name="linear_nonlinear",
        solution=sol,
        default_m=16,
    )


def _nonlinear_nonlinear() -> HybridProblem:
    # y'' - a y'^2 = 0 with a = 1 then 10, switching at x = 1
    def make_segment(a):
        return nonlinear_dynamics(
            residual=lambda x, y, dy, d2y: d2y - a * dy ** 2,
            d_y=lambda x, y, dy, d2y: np.zeros_like(np.asarray(x, dtype=float)),
            d_dy=lambda x, y, dy, d2y: -2.0 * a * dy,
            d_d2y=lambda x, y, dy, d2y: np.ones_like(np.asarray(x, dtype=float)),
        )

    log2 = math.log(2.0)
    sol = (
        (lambda x: 2.0 - np.log(x + 1.0),
         lambda x: -1.0 / (x + 1.0),
         lambda x: 1.0 / (x + 1.0) ** 2),
        (lambda x: 2.0 - 0.9 * log2 - 0.1 * np.log(10.0 * x - 8.0),
         lambda x: -1.0 / (10.0 * x - 8.0),
         lambda x: 10.0 / (10.0 * x - 8.0) ** 2),
    )
    return HybridProblem(
        break_points=(0.0, 1.0, 3.0),
        segments=(make_segment(1.0), make_segment(10.0)),
        y0=2.0,
        yf=2.0 - math.log(11264.0) / 10.0,
        name="nonlinear_nonlinear",
        solution=sol,
        default_m=60,
    )


# --- user-posed piecewise linear problems --------------------------------

_FORCING_FNS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


def _poly_fn(coeffs: Sequence[float], path: str) -> Callable[[Array], Array]:
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{path}: expected a non-empty list of polynomial coefficients")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: non-finite coefficient")
    return lambda x: npoly.polyval(np.asarray(x, dtype=float), arr)


def _forcing_fn(spec_entry, path: str) -> Callable[[Array], Array]:
    """Forcing as ascending-power polynomial plus optional named terms.

    Named terms are {"fn": "exp"|"sin"|"cos", "k": wavenumber, "mul":
    multiplier}, contributing mul * fn(k * x).
    """
    if isinstance(spec_entry, dict):
        poly = _poly_fn(spec_entry.get("poly", [0.0]), f"{path}.poly")
        terms = []
        for j, term in enumerate(spec_entry.get("terms", [])):
            tpath = f"{path}.terms[{j}]"
            if not isinstance(term, dict):
                raise ValueError(f"{tpath}: expected a mapping with fn/k/mul")
            fn_name = term.get("fn")
            if fn_name not in _FORCING_FNS:
                raise ValueError(f"{tpath}.fn: unknown forcing term {fn_name!r} "
                                 f"(supported: {sorted(_FORCING_FNS)})")
            k = float(term.get("k", 1.0))
            mul = float(term.get("mul", 1.0))
            if not (math.isfinite(k) and math.isfinite(mul)):
                raise ValueError(f"{tpath}: non-finite term parameter")
            terms.append((_FORCING_FNS[fn_name], k, mul))

        def f(x):
            x = np.asarray(x, dtype=float)
            out = poly(x)
            for fn, kk, mm in terms:
                out = out + mm * fn(kk * x)
            return out

        return f
    return _poly_fn(spec_entry, path)


def generic_linear(config: dict) -> HybridProblem:
    """Build a piecewise linear problem from a plain config mapping.

    Expected keys: break_points, y0, yf, and segments, a list of
    {"a2": [...], "a1": [...], "a0": [...], "f": ...} with ascending
    polynomial coefficients (a1, a0, f optional, default zero; f may
    also be a {"poly": ..., "terms": ...} mapping).
    """
    bp = config.get("break_points")
    if not isinstance(bp, (list, tuple)) or len(bp) < 2:
        raise ValueError("break_points: need at least two values")
    bp = [float(b) for b in bp]
    if not all(math.isfinite(b) for b in bp):
        raise ValueError("break_points: non-finite value")
    if any(a >= b for a, b in zip(bp, bp[1:])):
        raise ValueError("break_points not strictly increasing")
    seg_cfgs = config.get("segments")
    if not isinstance(seg_cfgs, (list, tuple)):
        raise ValueError("segments: expected a list of segment mappings")
    if len(seg_cfgs) != len(bp) - 1:
        raise ValueError(f"segments: count mismatch, {len(bp) - 1} intervals "
                         f"but {len(seg_cfgs)} segments")
    try:
        y0 = float(config["y0"])
        yf = float(config["yf"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("y0/yf: missing or non-numeric boundary value") from exc
    if not (math.isfinite(y0) and math.isfinite(yf)):
        raise ValueError("y0/yf: non-finite boundary value")

    segments = []
    for i, seg in enumerate(seg_cfgs):
        path = f"segments[{i}]"
        if not isinstance(seg, dict):
            raise ValueError(f"{path}: expected a mapping with a2/a1/a0/f entries")
        if "a2" not in seg:
            raise ValueError(f"{path}.a2: required")
        a2 = _poly_fn(seg["a2"], f"{path}.a2")
        if not np.any(np.asarray(seg["a2"], dtype=float) != 0.0):
            raise ValueError(f"{path}.a2: leading coefficient identically zero "
                             "(problem is not second order)")
        a1 = _poly_fn(seg.get("a1", [0.0]), f"{path}.a1")
        a0 = _poly_fn(seg.get("a0", [0.0]), f"{path}.a0")
        f = _forcing_fn(seg.get("f", [0.0]), f"{path}.f")
        segments.append(linear_dynamics(a2=a2, a1=a1, a0=a0, f=f))
    return HybridProblem(
        break_points=tuple(bp),
        segments=tuple(segments),
        y0=y0,
        yf=yf,
        name=str(config.get("name", "generic_linear")),
    )


# --- Jacobian cross-checks ------------------------------------------------

def _handcoded_boundary_row(spec, iv, layout, x, d, role):
    """Full-length derivative-d row built directly from the table formulas.

    Independent of the expressions module: the support subtractions are
    spelled out with raw basis and switching evaluations.  role is
    "first" or "last" (the two-segment reference problems have no
    interior segments).  The free expansion skips the three leading
    polynomials reproduced by the three-constraint support.
    """
    z = map_point(iv, x)
    c = spec.c
    skip = BOUNDARY_SKIP
    wide = BasisSpec(spec.family, spec.m + skip, spec.c)
    row = np.zeros(layout.total)
    if role == "first":
        b = [beta(j, iv, x, d) for j in (1, 2, 3)]
        h_part = (c ** d) * eval_basis(wide, z, d)[skip:] \
            - b[0] * eval_basis(wide, -1.0, 0)[skip:] \
            - b[1] * eval_basis(wide, 1.0, 0)[skip:] \
            - b[2] * c * eval_basis(wide, 1.0, 1)[skip:]
        row[layout.xi_slice(1)] = h_part
        row[layout.junction_value_index(1)] = b[1]
        row[layout.junction_slope_index(1)] = b[2]
    else:
        n = layout.n_segments
        b = [beta(j, iv, x, d) for j in (4, 5, 6)]
        h_part = (c ** d) * eval_basis(wide, z, d)[skip:] \
            - b[0] * eval_basis(wide, -1.0, 0)[skip:] \
            - b[1] * c * eval_basis(wide, -1.0, 1)[skip:] \
            - b[2] * eval_basis(wide, 1.0, 0)[skip:]
        row[layout.xi_slice(n)] = h_part
        row[layout.junction_value_index(n - 1)] = b[0]
        row[layout.junction_slope_index(n - 1)] = b[1]
    return row


def reference_jacobian_row(problem: HybridProblem, grids: SegmentGrids, k: int, x: float,
                           y: float, dy: float) -> np.ndarray:
    """Hand-coded loss-partial row for the two reference nonlinear problems.

    Implements the closed-form partial expressions for the
    linear-nonlinear and nonlinear-nonlinear sequences at one point in
    segment k (1-based), given the current solution state there.
    """
    layout = grids.layout
    spec = grids.specs[k - 1]
    iv = grids.grids[k - 1].interval
    role = "first" if k == 1 else "last"
    rows = {d: _handcoded_boundary_row(spec, iv, layout, x, d, role) for d in (0, 1, 2)}
    if problem.name == "linear_nonlinear":
        if k == 1:
            return rows[2] + rows[0]
        return rows[2] + dy * rows[0] + y * rows[1]
    if problem.name == "nonlinear_nonlinear":
        a = 1.0 if k == 1 else 10.0
        return rows[2] - 2.0 * a * dy * rows[1]
    raise ValueError(f"no hand-coded reference Jacobian for problem {problem.name!r}")


def residual_partial_check(problem: HybridProblem, k: int, x: float, *, N: int = 20,
                           m: Optional[int] = None, xi: Optional[np.ndarray] = None,
                           seed: int = 0) -> dict:
    """Cross-validate the chain-rule loss partials at one point.

    Compares the chain-rule row dL/dXi = sum_d (dL/dy^(d)) * A^(d)-row
    against central finite differences in Xi and, for the two reference
    nonlinear problems, against the hand-coded closed-form partials.
    Errors are reported relative to the largest row entry (floored at 1).
    """
    if not 1 <= k <= problem.n_segments:
        raise ValueError(f"segment index {k} out of range")
    iv = problem.interval(k)
    if not iv.contains(x):
        raise ValueError(f"x={x} not inside segment {k}")
    m_eff = m if m is not None else (problem.default_m or 10)
    grids = segment_grids(problem.break_points, N, m_eff)
    layout = grids.layout
    if xi is None:
        xi = np.random.default_rng(seed).standard_normal(layout.total)
    xi = np.asarray(xi, dtype=float)

    def point_rows(d):
        spec = grids.specs[k - 1]
        if problem.n_segments == 1:
            coeffs, offs = single_bvp_block(spec, iv, problem.y0, problem.yf, x, d)
        elif k == 1:
            coeffs, offs = first_segment_block(spec, iv, problem.y0, x, d, layout)
        elif k == problem.n_segments:
            coeffs, offs = last_segment_block(spec, iv, problem.yf, x, d, layout)
        else:
            coeffs, offs = middle_segment_block(spec, iv, k, x, d, layout)
        return coeffs[0], offs[0]

    rows = {d: point_rows(d) for d in (0, 1, 2)}

    def state(vec):
        return tuple(rows[d][0] @ vec + rows[d][1] for d in (0, 1, 2))

    dyn = problem.segments[k - 1]
    xarr = np.asarray([x])

    def loss(vec):
        yv, dyv, d2yv = state(vec)
        return float(dyn.residual(xarr, np.asarray([yv]), np.asarray([dyv]), np.asarray([d2yv]))[0])

    yv, dyv, d2yv = state(xi)
    p0 = float(np.asarray(dyn.d_y(xarr, np.asarray([yv]), np.asarray([dyv]), np.asarray([d2yv])))[0])
    p1 = float(np.asarray(dyn.d_dy(xarr, np.asarray([yv]), np.asarray([dyv]), np.asarray([d2yv])))[0])
    p2 = float(np.asarray(dyn.d_d2y(xarr, np.asarray([yv]), np.asarray([dyv]), np.asarray([d2yv])))[0])
    chain = p0 * rows[0][0] + p1 * rows[1][0] + p2 * rows[2][0]

    scale = max(1.0, float(np.max(np.abs(chain))))
    fd = np.zeros(layout.total)
    h = 1e-6
    for i in range(layout.total):
        e = np.zeros(layout.total)
        e[i] = h * max(1.0, abs(xi[i]))
        fd[i] = (loss(xi + e) - loss(xi - e)) / (2.0 * e[i])
    result = {"vs_finite_difference": float(np.max(np.abs(fd - chain)) / scale),
              "vs_reference": None,
              "state": (yv, dyv, d2yv)}
    if problem.name in ("linear_nonlinear", "nonlinear_nonlinear"):
        ref = reference_jacobian_row(problem, grids, k, x, yv, dyv)
        result["vs_reference"] = float(np.max(np.abs(ref - chain)) / scale)
    return result
