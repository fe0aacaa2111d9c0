"""Generalized characteristics ``y(alpha, t)`` and their pseudo-inverses.

For fixed ``t`` the characteristic map is affine on every label segment, so
it is fully described by its values at the segment boundaries.  Every
inversion below is a per-segment linear solve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .initial_data import ATOM, EquationForm, InitialData

_EPS = np.finfo(float).eps


def _scalarize(out):
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def _affine_ext(a, knots, vals, left_slope, right_slope):
    """Piecewise-affine interpolation through ``(knots, vals)`` with affine tails."""
    a = np.asarray(a, dtype=float)
    # np.interp loses values near the subnormal range, so evaluate each piece directly
    j = np.clip(np.searchsorted(knots, a, side="right") - 1, 0, max(len(knots) - 2, 0))
    if len(knots) > 1:
        v0, v1 = vals[j], vals[j + 1]
        width = knots[j + 1] - knots[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            lin = v0 + (a - knots[j]) * ((v1 - v0) / width)
        out = np.where(width > 0, np.clip(lin, np.minimum(v0, v1), np.maximum(v0, v1)), v1)
    else:
        out = np.full(a.shape, vals[0])
    out = np.where(a < knots[0], vals[0] + left_slope * (a - knots[0]), out)
    out = np.where(a > knots[-1], vals[-1] + right_slope * (a - knots[-1]), out)
    return out


def _form(form) -> EquationForm:
    return EquationForm.parse(form)


def collapses(slope, t) -> np.ndarray:
    """True where an ac label segment of initial slope ``slope`` is collapsed at time ``t``."""
    slope = np.asarray(slope, dtype=float)
    factor = 1.0 + 0.5 * t * slope
    return (slope != 0) & (np.abs(factor) <= 8 * _EPS * np.maximum(1.0, np.abs(0.5 * t * slope)))


def xbar(d: InitialData, alpha):
    """Generalized inverse of ``x -> x + mu0((-inf, x))``."""
    s = d.segments
    return _scalarize(_affine_ext(alpha, s.alpha, s.xbar, 1.0, 1.0))


def ubar_of_label(d: InitialData, alpha):
    """``u0(xbar(alpha))``."""
    s = d.segments
    return _scalarize(_affine_ext(alpha, s.alpha, s.ubar, 0.0, 0.0))


def gap(d: InitialData, alpha):
    """``alpha - xbar(alpha)``: continuous, nondecreasing, with values in ``[0, mu0(R)]``."""
    s = d.segments
    return _scalarize(_affine_ext(alpha, s.alpha, s.gap, 0.0, 0.0))


def weight(d: InitialData, alpha):
    """``f(alpha) = 1 - xbar'(alpha)`` (right-continuous)."""
    s = d.segments
    w = np.concatenate([[0.0], s.weight, [0.0]])
    return _scalarize(w[s.locate(alpha) + 1])


def segment_slopes(d: InitialData, t: float) -> np.ndarray:
    """``y_alpha`` on each finite label segment at time ``t`` (identical for both forms)."""
    s = d.segments
    ac = (1.0 + 0.5 * t * s.slope) ** 2 / (1.0 + s.slope**2)
    return np.where(s.kind == ATOM, 0.25 * t * t, ac)


def degenerate_segments(d: InitialData, t: float) -> np.ndarray:
    s = d.segments
    return np.where(s.kind == ATOM, t == 0, collapses(s.slope, t))


def boundary_state(d: InitialData, t: float, form=EquationForm.A):
    """Positions ``Y`` and velocities ``U`` of the boundary characteristics, plus the collapse mask."""
    form = _form(form)
    s = d.segments
    g = s.gap - form.gap_shift * d.mass
    # extended precision keeps cancellation between the three terms below one ulp of Y
    L = np.longdouble
    Yl = s.xbar.astype(L) + s.ubar.astype(L) * L(t) + L(t) * L(t) / 4 * g.astype(L)
    Y = Yl.astype(float)
    U = s.ubar + 0.5 * t * g
    deg = degenerate_segments(d, t)
    for k in np.nonzero(deg)[0]:
        Y[k + 1] = Y[k]
    Y = np.maximum.accumulate(Y)
    return Y, U, deg


def y(d: InitialData, alpha, t: float, form=EquationForm.A):
    """Position at time ``t`` of the characteristic with label ``alpha``."""
    Y, _, _ = boundary_state(d, t, form)
    return _scalarize(_affine_ext(alpha, d.segments.alpha, Y, 1.0, 1.0))


def speed(d: InitialData, alpha, t: float, form=EquationForm.A):
    """``d/dt y(alpha, t)``, i.e. the solution value carried by the characteristic."""
    _, U, _ = boundary_state(d, t, form)
    return _scalarize(_affine_ext(alpha, d.segments.alpha, U, 0.0, 0.0))


def y_alpha_slope(d: InitialData, alpha, t: float):
    """One-sided (right) derivative of ``y(., t)`` at ``alpha``."""
    s = d.segments
    slopes = np.concatenate([[1.0], segment_slopes(d, t), [1.0]])
    return _scalarize(slopes[s.locate(alpha) + 1])


@dataclass(frozen=True)
class CharPoint:
    alpha: float
    x: float
    speed: float
    y_alpha: float


def char_point(d: InitialData, alpha: float, t: float, form=EquationForm.A) -> CharPoint:
    return CharPoint(
        alpha=float(alpha),
        x=y(d, alpha, t, form),
        speed=speed(d, alpha, t, form),
        y_alpha=y_alpha_slope(d, alpha, t),
    )


def _invert(knots, vals, target, side):
    """Smallest (``side='inf'``) or largest (``'sup'``) ``a`` with ``h(a) = target``.

    ``h`` is continuous, nondecreasing, affine with slope 1 beyond the knots.
    """
    target = np.asarray(target, dtype=float)
    x = np.atleast_1d(target).ravel()
    out = np.empty_like(x)
    n = len(knots)
    lo, hi = x < vals[0], x > vals[-1]
    mid = ~(lo | hi)
    out[lo] = knots[0] - (vals[0] - x[lo])
    out[hi] = knots[-1] + (x[hi] - vals[-1])
    xm = x[mid]
    if side == "inf":
        k = np.searchsorted(vals, xm, side="left")
        j = np.maximum(k - 1, 0)
    else:
        j = np.searchsorted(vals, xm, side="right") - 1
        k = np.minimum(j + 1, n - 1)
    at_knot = k if side == "inf" else j
    exact = vals[at_knot] == xm
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = knots[j] + (xm - vals[j]) * (knots[k] - knots[j]) / (vals[k] - vals[j])
    out[mid] = np.where(exact, knots[at_knot], lin)
    return out.reshape(target.shape)


def alpha_of(d: InitialData, x, t: float, form=EquationForm.A, side: str = "inf"):
    """Smallest label whose characteristic sits at ``x`` at time ``t`` (largest if ``side='sup'``).

    At ``t = 0`` this is ``inf {alpha : xbar(alpha) = x}``.
    """
    if side not in ("inf", "sup"):
        raise ValueError("side must be 'inf' or 'sup'")
    Y, _, _ = boundary_state(d, t, form)
    return _scalarize(_invert(d.segments.alpha, Y, x, side))


def _nonzero_time(t):
    if t == 0:
        raise ValueError("scaled quantities are undefined at t = 0")


def alpha_scaled(d: InitialData, xi, t: float, form=EquationForm.A):
    """Pseudo-inverse in the self-similar variable: ``alpha_of(d, t^2 xi / 4, t)``."""
    _nonzero_time(t)
    return alpha_of(d, 0.25 * t * t * np.asarray(xi, dtype=float), t, form)


def kink_support(d: InitialData, t: float, form=EquationForm.A):
    """Endpoints of the support of the kink-wave slope at time ``t``."""
    form = _form(form)
    q = 0.25 * t * t * d.mass
    if form is EquationForm.A:
        return 0.0, q
    return -0.5 * q, 0.5 * q


def alpha_l(d: InitialData, t: float, form=EquationForm.A) -> float:
    """``sup {alpha : y(alpha, t) < left edge of the kink support}``."""
    _nonzero_time(t)
    lo, _ = kink_support(d, t, form)
    return alpha_of(d, lo, t, form, side="inf")


def alpha_r(d: InitialData, t: float, form=EquationForm.A) -> float:
    """``inf {alpha : y(alpha, t) > right edge of the kink support}``."""
    _nonzero_time(t)
    _, hi = kink_support(d, t, form)
    return alpha_of(d, hi, t, form, side="sup")


def blowup_times(d: InitialData) -> list:
    """Times ``-2/s`` for every nonzero slope ``s`` of ``u0``; where ac label segments collapse."""
    s = d.u.slopes if len(d.u.x) > 1 else np.empty(0)
    s = s[s != 0]
    return sorted(set((-2.0 / s).tolist()))
