import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsx import characteristics as ch
from hsx.initial_data import EquationForm, build, constant, example_compact, example_dirac

from oracles import bisect_first, brute_y, data

A, B = EquationForm.A, EquationForm.B
times = st.floats(-20, 20).filter(lambda t: abs(t) > 1e-3)


def test_y_examples():
    d = example_dirac(1.0, 4.0, 0.0)
    assert ch.y(d, 2.0, 2.0, A) == 4.0
    assert ch.y(d, -3.0, 2.0, A) == -1.0
    for form in (A, B):
        assert ch.y(d, 1.7, 0.0, form) == ch.xbar(d, 1.7)


def test_y_alpha_slope_examples():
    c, d = example_compact(), example_dirac(1.0, 4.0, 0.0)
    assert ch.y_alpha_slope(c, 0.5, 2.0) == 0.0
    assert ch.y_alpha_slope(d, 2.0, 2.0) == 1.0
    assert ch.y_alpha_slope(build([[0, 1], [1, 1]]), 0.5, 7.0) == 1.0


def test_alpha_of_examples():
    d1 = example_dirac(1.0, 1.0, 0.0)
    assert ch.alpha_of(d1, 0.0, 3.0, A) == -3.0
    d = example_dirac(1.0, 4.0, 0.0)
    assert ch.alpha_scaled(d, -1.0, 2.0) == -3.0
    xi, t = 9.0, 2.0
    assert ch.alpha_scaled(d, xi, t) == pytest.approx(t * t / 4 * (xi - 4) - t + 4, abs=1e-12)
    assert ch.alpha_scaled(constant(1.5), 0.0, 2.0) == pytest.approx(-3.0, abs=1e-15)
    with pytest.raises(ValueError):
        ch.alpha_scaled(d, 1.0, 0.0)
    with pytest.raises(ValueError):
        ch.alpha_of(d, 0.0, 1.0, side="mid")


def test_alpha_of_at_time_zero_is_leftmost_label():
    d = example_dirac(1.0, 4.0, 0.0)
    assert ch.alpha_of(d, 0.0, 0.0) == 0.0
    assert ch.alpha_of(d, 0.0, 0.0, side="sup") == 4.0


def test_kink_edges():
    d = example_dirac(1.0, 1.0, 0.0)
    assert ch.alpha_l(d, 3.0) == -3.0
    t = 8.0
    ar = ch.alpha_r(d, t)
    assert ar == pytest.approx(1 - 4 / t, abs=1e-15)
    assert ar - ch.xbar(d, ar) - d.mass == pytest.approx(-4 / t, abs=1e-15)
    assert ch.kink_support(d, 2.0, B) == (-0.125 * 4, 0.125 * 4)


def test_blowup_times():
    assert ch.blowup_times(example_compact()) == [2.0]
    assert ch.blowup_times(example_dirac(1.0, 4.0, 0.0)) == []
    assert ch.blowup_times(build([[0, 0], [1, 1], [3, 0]])) == [-2.0, 4.0]


def test_char_point():
    p = ch.char_point(example_dirac(1.0, 4.0, 0.0), 2.0, 2.0)
    assert (p.x, p.speed, p.y_alpha) == (4.0, 3.0, 1.0)


# -- properties ----------------------------------------------------------------

@given(data(), st.floats(-12, 12), times, st.sampled_from([A, B]))
def test_y_matches_bisection_oracle(d, alpha, t, form):
    ref = brute_y(d, alpha, t, form.gap_shift)
    scale = max(1.0, abs(ref), t * t * (d.mass + abs(alpha)))
    assert abs(ch.y(d, alpha, t, form) - ref) <= 1e-10 * scale


@given(data(), times, st.lists(st.floats(-15, 15), min_size=2, max_size=6))
def test_y_is_nondecreasing(d, t, alphas):
    a = np.sort(alphas)
    assert np.all(np.diff(ch.y(d, a, t)) >= 0)


@given(data(), st.floats(-12, 12), times)
def test_y_alpha_matches_finite_difference(d, alpha, t):
    h = 1e-6
    s = d.segments
    # keep the stencil inside one label segment
    if np.any(np.abs(s.alpha - alpha) < 2 * h) or np.any(np.abs(s.alpha - alpha - h) < 2 * h):
        return
    fd = (ch.y(d, alpha + h, t) - ch.y(d, alpha - h, t)) / (2 * h)
    assert ch.y_alpha_slope(d, alpha, t) == pytest.approx(fd, rel=1e-5, abs=1e-5 * max(1.0, t * t))


@given(data(), st.floats(-12, 12), times)
def test_speed_matches_time_derivative(d, alpha, t):
    h = 1e-5
    fd = (ch.y(d, alpha, t + h) - ch.y(d, alpha, t - h)) / (2 * h)
    assert ch.speed(d, alpha, t) == pytest.approx(fd, abs=1e-6 * max(1.0, abs(t) * (d.mass + abs(alpha))))


@given(data(), st.floats(-12, 12), times)
def test_weight_equals_ux_squared_times_y_alpha(d, alpha, t):
    """``f = u_x(y(alpha))^2 * y_alpha`` on every a.c. label segment away from blow-up."""
    s = d.segments
    k = int(s.locate(alpha))
    if k < 0 or k >= s.count or s.kind[k] != 0:
        return
    sl = s.slope[k]
    factor = 1 + 0.5 * t * sl
    if abs(factor) < 1e-6:
        return
    ux = sl / factor
    assert ch.weight(d, alpha) == pytest.approx(ux**2 * ch.y_alpha_slope(d, alpha, t), rel=1e-12, abs=1e-14)


@given(data(), times, st.floats(-200, 200), st.sampled_from([A, B]))
def test_inverse_consistency(d, t, x, form):
    a = ch.alpha_of(d, x, t, form)
    assert ch.y(d, a, t, form) == pytest.approx(x, abs=1e-11 * max(1.0, abs(x), t * t))
    hi = ch.alpha_of(d, x, t, form, side="sup")
    assert hi >= a
    # the inf side matches a bisection on the forward map
    ref = bisect_first(lambda b: ch.y(d, b, t, form), x, a - 10.0 - abs(x), hi + 10.0 + abs(x))
    assert a == pytest.approx(ref, abs=1e-9 * max(1.0, abs(a)))


@given(data(), st.floats(-15, 15), times)
def test_form_relation(d, alpha, t):
    ya, yb = ch.y(d, alpha, t, A), ch.y(d, alpha, t, B)
    assert yb == pytest.approx(ya - t * t * d.mass / 8, abs=1e-12 * max(1.0, abs(ya), t * t * d.mass))


@given(data())
def test_blowup_times_are_collapse_times(d):
    for tb in ch.blowup_times(d):
        assert np.any(ch.degenerate_segments(d, tb))
        assert not np.any(ch.degenerate_segments(d, tb * 1.01))
