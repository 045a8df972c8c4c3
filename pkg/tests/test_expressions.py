import numpy as np
import pytest
from numpy.polynomial import chebyshev as ncheb

from hybvp.basis import BasisSpec, Interval
from hybvp.expressions import (
    SINGLE_SKIP,
    UnknownLayout,
    cascade_eval,
    cascade_junction_value,
    first_segment_block,
    first_segment_row,
    last_segment_row,
    middle_segment_row,
    single_bvp_row,
)


def _spec_for(iv, m=6, family="chebyshev"):
    return BasisSpec.for_interval(family, m, iv)


def _random_geometry(rng, n_segments):
    cuts = np.sort(rng.uniform(-5, 5, n_segments + 1))
    while np.min(np.diff(cuts)) < 0.2:
        cuts = np.sort(rng.uniform(-5, 5, n_segments + 1))
    return cuts


def test_layout_ordering_and_slices():
    lay = UnknownLayout(ms=(3, 3))
    assert lay.total == 8
    assert lay.xi_slice(1) == slice(0, 3)
    assert lay.junction_value_index(1) == 3
    assert lay.junction_slope_index(1) == 4
    assert lay.xi_slice(2) == slice(5, 8)

    lay = UnknownLayout(ms=(4, 2, 5))
    assert lay.total == 4 + 2 + 5 + 4
    covered = []
    for k in (1, 2, 3):
        covered.extend(range(lay.xi_slice(k).start, lay.xi_slice(k).stop))
    for j in (1, 2):
        covered.extend([lay.junction_value_index(j), lay.junction_slope_index(j)])
    assert sorted(covered) == list(range(lay.total))


def test_layout_single_segment_has_no_junctions():
    lay = UnknownLayout(ms=(5,))
    assert lay.total == 5
    with pytest.raises(ValueError):
        lay.junction_value_index(1)


def test_single_bvp_zero_free_function_interpolates_boundaries():
    iv = Interval(0.0, 1.0)
    spec = _spec_for(iv)
    row0 = single_bvp_row(spec, iv, 0.0, 1.0, 0.0, 0)
    rowm = single_bvp_row(spec, iv, 0.0, 1.0, 0.5, 0)
    rowf = single_bvp_row(spec, iv, 0.0, 1.0, 1.0, 0)
    xi = np.zeros(spec.m)
    assert row0(xi) == 0.0
    assert rowm(xi) == 0.5
    assert rowf(xi) == 1.0


def test_single_bvp_second_derivative_is_pure_free_function():
    rng = np.random.default_rng(1)
    iv = Interval(0.2, 1.7)
    spec = _spec_for(iv, m=7)
    from hybvp.expressions import _free_rows

    for x in (0.3, 0.9, 1.5):
        row = single_bvp_row(spec, iv, 2.0, -1.0, x, 2)
        assert row.offset == 0.0
        pure = _free_rows(spec, iv, np.array([x]), 2, SINGLE_SKIP)[0]
        assert np.array_equal(row.coeffs, pure)
        xi = rng.standard_normal(spec.m)
        assert row(xi) == pure @ xi


def test_first_segment_constraints_select_the_right_unknowns():
    rng = np.random.default_rng(2)
    x0, x1 = 0.0, 0.6
    iv = Interval(x0, x1)
    layout = UnknownLayout(ms=(6, 6))
    spec = _spec_for(iv)
    y0 = -1.3

    row = first_segment_row(spec, iv, y0, x0, 0, layout)
    for _ in range(10):
        xi = rng.standard_normal(layout.total)
        assert row(xi) == y0

    row_val = first_segment_row(spec, iv, y0, x1, 0, layout)
    e = np.zeros(layout.total)
    e[layout.junction_value_index(1)] = 1.0
    assert np.array_equal(row_val.coeffs, e)
    assert row_val.offset == 0.0

    row_slope = first_segment_row(spec, iv, y0, x1, 1, layout)
    e = np.zeros(layout.total)
    e[layout.junction_slope_index(1)] = 1.0
    assert np.array_equal(row_slope.coeffs, e)
    assert row_slope.offset == 0.0


def test_middle_segment_constraints_select_the_right_unknowns():
    layout = UnknownLayout(ms=(4, 4, 4))
    iv = Interval(1.0, 2.5)
    spec = _spec_for(iv, m=4)

    row = middle_segment_row(spec, iv, 2, 1.0, 0, layout)
    e = np.zeros(layout.total)
    e[layout.junction_value_index(1)] = 1.0
    assert np.array_equal(row.coeffs, e) and row.offset == 0.0

    row = middle_segment_row(spec, iv, 2, 2.5, 1, layout)
    e = np.zeros(layout.total)
    e[layout.junction_slope_index(2)] = 1.0
    assert np.array_equal(row.coeffs, e) and row.offset == 0.0

    # homogeneous case: zero unknowns -> zero function
    row = middle_segment_row(spec, iv, 2, 1.7, 0, layout)
    assert row(np.zeros(layout.total)) == 0.0


def test_middle_segment_index_range_checked():
    layout = UnknownLayout(ms=(4, 4, 4))
    iv = Interval(1.0, 2.5)
    spec = _spec_for(iv, m=4)
    with pytest.raises(ValueError):
        middle_segment_row(spec, iv, 1, 1.5, 0, layout)
    with pytest.raises(ValueError):
        middle_segment_row(spec, iv, 3, 1.5, 0, layout)


def test_last_segment_constraints_select_the_right_unknowns():
    rng = np.random.default_rng(3)
    layout = UnknownLayout(ms=(5, 5))
    iv = Interval(0.5, 1.0)
    spec = _spec_for(iv, m=5)
    yf = 2.25

    row = last_segment_row(spec, iv, yf, 1.0, 0, layout)
    for _ in range(10):
        assert row(rng.standard_normal(layout.total)) == yf

    row = last_segment_row(spec, iv, yf, 0.5, 0, layout)
    e = np.zeros(layout.total)
    e[layout.junction_value_index(1)] = 1.0
    assert np.array_equal(row.coeffs, e) and row.offset == 0.0

    row = last_segment_row(spec, iv, yf, 0.5, 1, layout)
    e = np.zeros(layout.total)
    e[layout.junction_slope_index(1)] = 1.0
    assert np.array_equal(row.coeffs, e) and row.offset == 0.0


def test_rows_touch_only_owning_segment_and_adjacent_junctions():
    layout = UnknownLayout(ms=(4, 4, 4, 4))
    cuts = [0.0, 1.0, 2.0, 3.0, 4.0]
    iv2 = Interval(cuts[1], cuts[2])
    spec = _spec_for(iv2, m=4)
    row = middle_segment_row(spec, iv2, 2, 1.3, 0, layout)
    allowed = set(range(layout.xi_slice(2).start, layout.xi_slice(2).stop))
    allowed |= {layout.junction_value_index(1), layout.junction_slope_index(1),
                layout.junction_value_index(2), layout.junction_slope_index(2)}
    outside = [i for i in range(layout.total) if i not in allowed]
    assert np.all(row.coeffs[outside] == 0.0)


def test_constraint_satisfaction_over_random_geometries():
    """Boundary and C1 junction embedding holds for any Xi, before solving."""
    rng = np.random.default_rng(2024)
    for trial in range(100):
        n = int(rng.integers(2, 6))
        cuts = _random_geometry(rng, n)
        m = int(rng.integers(3, 8))
        layout = UnknownLayout(ms=(m,) * n)
        y0, yf = rng.standard_normal(2) * 3
        xi = rng.standard_normal(layout.total)

        def row_at(k, x, d):
            iv = Interval(cuts[k - 1], cuts[k])
            spec = _spec_for(iv, m=m)
            if k == 1:
                return first_segment_row(spec, iv, y0, x, d, layout)
            if k == n:
                return last_segment_row(spec, iv, yf, x, d, layout)
            return middle_segment_row(spec, iv, k, x, d, layout)

        assert abs(row_at(1, cuts[0], 0)(xi) - y0) <= 1e-13 * max(1, abs(y0))
        assert abs(row_at(n, cuts[-1], 0)(xi) - yf) <= 1e-13 * max(1, abs(yf))
        for j in range(1, n):
            for d in (0, 1):
                left = row_at(j, cuts[j], d)
                right = row_at(j + 1, cuts[j], d)
                assert np.max(np.abs(left.coeffs - right.coeffs)) <= 1e-13
                assert abs(left.offset - right.offset) <= 1e-13
                assert abs(left(xi) - right(xi)) <= 1e-13 * max(1.0, abs(left(xi)))


def _cheb_free_coeffs(fn, iv, m):
    """Free-function coefficients of fn on iv: full fit minus the skipped head."""
    series = ncheb.Chebyshev.interpolate(
        lambda z: fn(0.5 * (iv.x0 + iv.xf) + 0.5 * iv.width * z), deg=m + SINGLE_SKIP - 1)
    coef = np.zeros(m + SINGLE_SKIP)
    coef[: series.coef.size] = series.coef
    return coef[SINGLE_SKIP:]


def test_cascade_junction_of_zero_free_functions_is_the_line_value():
    iv1, iv2 = Interval(0.0, 0.5), Interval(0.5, 1.0)
    s1, s2 = _spec_for(iv1, 4), _spec_for(iv2, 4)
    y1 = cascade_junction_value((s1, np.zeros(4)), (s2, np.zeros(4)), iv1, iv2, 0.0, 1.0)
    assert abs(y1 - 0.5) < 1e-15


def test_cascade_junction_symmetric_case():
    iv1, iv2 = Interval(0.0, 0.7), Interval(0.7, 1.9)
    s1, s2 = _spec_for(iv1, 5), _spec_for(iv2, 5)
    y1 = cascade_junction_value((s1, np.zeros(5)), (s2, np.zeros(5)), iv1, iv2, 0.7, 0.7)
    assert abs(y1 - 0.7) < 1e-14


def test_cascade_reproduces_a_global_polynomial():
    # g_k = the high-order part of P on each segment; the alpha support
    # restores the trimmed affine part, so the cascade must reproduce P.
    P = np.polynomial.Polynomial([0.3, -1.2, 0.8, 0.45, -0.2])
    iv1, iv2 = Interval(0.0, 0.6), Interval(0.6, 1.4)
    m = 6
    s1, s2 = _spec_for(iv1, m), _spec_for(iv2, m)
    g1 = (s1, _cheb_free_coeffs(P, iv1, m))
    g2 = (s2, _cheb_free_coeffs(P, iv2, m))
    y0, yf = P(0.0), P(1.4)
    y1 = cascade_junction_value(g1, g2, iv1, iv2, y0, yf)
    assert abs(y1 - P(0.6)) < 1e-12
    xs = np.linspace(0.0, 1.4, 41)
    vals = cascade_eval(g1, g2, iv1, iv2, y0, yf, xs, 0)
    assert np.max(np.abs(vals - P(xs))) < 1e-12
    dvals = cascade_eval(g1, g2, iv1, iv2, y0, yf, xs, 1)
    assert np.max(np.abs(dvals - P.deriv()(xs))) < 1e-11


def test_cascade_boundary_values_and_c1_junction():
    rng = np.random.default_rng(8)
    iv1, iv2 = Interval(-1.0, 0.2), Interval(0.2, 2.0)
    m = 7
    s1, s2 = _spec_for(iv1, m), _spec_for(iv2, m)
    for _ in range(20):
        g1 = (s1, rng.standard_normal(m))
        g2 = (s2, rng.standard_normal(m))
        y0, yf = rng.standard_normal(2)
        assert abs(cascade_eval(g1, g2, iv1, iv2, y0, yf, -1.0, 0) - y0) < 1e-13
        assert abs(cascade_eval(g1, g2, iv1, iv2, y0, yf, 2.0, 0) - yf) < 1e-13
        d_left = cascade_eval(g1, g2, iv1, iv2, y0, yf, 0.2, 1)
        d_right = cascade_eval(g1, g2, iv1, iv2, y0, yf, np.nextafter(0.2, 1.0), 1)
        assert abs(d_left - d_right) <= 1e-12 * max(1.0, abs(d_left))
        v_left = cascade_eval(g1, g2, iv1, iv2, y0, yf, 0.2, 0)
        v_right = cascade_eval(g1, g2, iv1, iv2, y0, yf, np.nextafter(0.2, 1.0), 0)
        assert abs(v_left - v_right) <= 1e-12 * max(1.0, abs(v_left))


def test_cascade_rejects_mismatched_junction():
    iv1, iv2 = Interval(0.0, 0.5), Interval(0.6, 1.0)
    s1, s2 = _spec_for(iv1, 4), _spec_for(iv2, 4)
    with pytest.raises(ValueError):
        cascade_junction_value((s1, np.zeros(4)), (s2, np.zeros(4)), iv1, iv2, 0.0, 1.0)
