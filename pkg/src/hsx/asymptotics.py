"""Kink-wave leading terms, exact error norms, tail statistics and rate fits.

Both ``u(., t)`` and the leading term ``(t/2) v(4x/t^2)`` are piecewise
linear in ``x``; the sup of their difference is attained at a breakpoint and
the squared ``H^1`` seminorm of the difference is a finite sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import characteristics as ch
from .initial_data import EquationForm, InitialData
from .measure import support, tail_mass
from .solution import SolutionSlice, evaluate_u, singular_mass, slice

REGIONS = ("left", "middle", "right", "all")
NOISE_FLOOR = 1e-13


def _nonzero(t):
    if t == 0:
        raise ValueError("t must be nonzero")


def kink_v(d: InitialData, xi):
    """Clamped ramp ``0 / xi / mu0(R)``."""
    out = np.clip(np.asarray(xi, dtype=float), 0.0, d.mass)
    return float(out) if out.ndim == 0 else out


def kink_v1(d: InitialData, xi):
    """Symmetric clamped ramp ``-mu0(R)/2 / xi / mu0(R)/2``."""
    m = 0.5 * d.mass
    out = np.clip(np.asarray(xi, dtype=float), -m, m)
    return float(out) if out.ndim == 0 else out


def leading_term(d: InitialData, x, t: float, form=EquationForm.A):
    """``(t/2) v(4x/t^2)`` (``v1`` for form B)."""
    _nonzero(t)
    form = EquationForm.parse(form)
    v = kink_v if form is EquationForm.A else kink_v1
    return 0.5 * t * v(d, 4.0 * np.asarray(x, dtype=float) / (t * t))


def _region_bounds(d, t, region, form):
    lo, hi = ch.kink_support(d, t, form)
    if region == "left":
        return -math.inf, lo
    if region == "middle":
        return lo, hi
    if region == "right":
        return hi, math.inf
    raise ValueError(f"region must be one of {REGIONS}, got {region!r}")


def _slice_for(d, t, form, s):
    if s is not None:
        return s
    return slice(d, t, form)


def linf_error(d: InitialData, t: float, region="all", form=EquationForm.A, s: SolutionSlice | None = None):
    """``sup |u(x, t) - (t/2) v(4x/t^2)|`` over the region, exactly."""
    _nonzero(t)
    form = EquationForm.parse(form)
    if region == "all":
        return max(linf_error(d, t, r, form, s) for r in REGIONS[:3])
    s = _slice_for(d, t, form, s)
    a, b = _region_bounds(d, t, region, form)
    lo, hi = ch.kink_support(d, t, form)
    pts = np.concatenate([s.u.x, [lo, hi]])
    pts = pts[(pts >= a) & (pts <= b)]
    if pts.size == 0:
        return 0.0
    return float(np.max(np.abs(s.u(pts) - leading_term(d, pts, t, form))))


def _h1_sq(d, t, region, form, s):
    a, b = _region_bounds(d, t, region, form)
    lo, hi = ch.kink_support(d, t, form)
    pts = np.unique(np.concatenate([s.u.x, [lo, hi]]))
    pts = pts[(pts >= a) & (pts <= b)]
    if pts.size < 2:
        return 0.0
    mid = 0.5 * (pts[:-1] + pts[1:])
    ux = np.concatenate([[0.0], s.ux, [0.0]])[np.searchsorted(s.u.x, mid, side="right")]
    lead = np.where((mid > lo) & (mid < hi), 2.0 / t, 0.0)
    return math.fsum((ux - lead) ** 2 * np.diff(pts))


def h1_error(d: InitialData, t: float, region="all", form=EquationForm.A, s: SolutionSlice | None = None):
    """``||u_x - d/dx (t/2) v(4x/t^2)||_{L^2(region)}``; singular atoms are not part of it."""
    _nonzero(t)
    form = EquationForm.parse(form)
    s = _slice_for(d, t, form, s)
    if region == "all":
        return math.sqrt(math.fsum(_h1_sq(d, t, r, form, s) for r in REGIONS[:3]))
    return math.sqrt(_h1_sq(d, t, region, form, s))


@dataclass(frozen=True)
class ErrorSample:
    t: float
    linf: dict
    h1: dict
    singular_mass: float
    blowup: bool


def error_sample(d: InitialData, t: float, form=EquationForm.A) -> ErrorSample:
    """All region errors at one time, from a single slice."""
    _nonzero(t)
    s = slice(d, t, form)
    sm = singular_mass(d, t)
    return ErrorSample(
        t=float(t),
        linf={r: linf_error(d, t, r, form, s) for r in REGIONS},
        h1={r: h1_error(d, t, r, form, s) for r in REGIONS},
        singular_mass=sm,
        blowup=sm > 0,
    )


# -- tails ------------------------------------------------------------------

@dataclass(frozen=True)
class TailStats:
    side: str
    theta: float
    values: list
    estimate_A: float
    quality: str
    flag: str = ""
    endpoint: float | None = None


def _trend(vals) -> str:
    if len(vals) < 3:
        return "too-short"
    dv = np.diff(np.asarray(vals[-4:]))
    scale = max(abs(vals[-1]), 1e-300)
    if np.all(np.abs(dv) <= 1e-3 * scale):
        return "stable"
    if np.all(dv >= 0):
        return "increasing"
    if np.all(dv <= 0):
        return "decreasing"
    return "oscillating"


def tail_stats(d: InitialData, side: str, theta: float, T_grid) -> TailStats:
    """Samples of ``T^(1-theta) mu0(tail beyond T^(1+theta))`` and a limit estimate."""
    if not 0 <= theta < 1:
        raise ValueError("theta must lie in [0, 1)")
    T = np.asarray(T_grid, dtype=float)
    if T.size == 0 or np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise ValueError("T_grid must be positive and strictly increasing")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")

    if not d.approximate:
        sup = support(d.mu)
        end = None if sup is None else (sup[0] if side == "left" else sup[1])
        tag = "L3" if side == "left" else "R3"
        flag = f"{tag}/compact, endpoint={end}" if end is not None else f"{tag}/compact, empty measure"
        vals = [(float(x), float(x ** (1 - theta)) * tail_mass(d.mu, side, x ** (1 + theta))) for x in T]
        return TailStats(side, theta, vals, 0.0, "compact", flag, end)

    R = d.truncation_radius
    keep = T ** (1 + theta) < R
    vals = [(float(x), float(x ** (1 - theta)) * tail_mass(d.mu, side, x ** (1 + theta))) for x in T[keep]]
    if not vals:
        return TailStats(side, theta, [], math.nan, "empty", "approximate: grid beyond truncation radius")
    v = [p[1] for p in vals]
    return TailStats(side, theta, vals, v[-1], _trend(v), "approximate")


# -- rates ------------------------------------------------------------------

@dataclass(frozen=True)
class RateReport:
    samples: list
    slope: float
    intercept: float
    r2: float
    discarded: list = field(default_factory=list)


def rate_fit(samples) -> RateReport:
    """Least-squares line through ``(log t, log value)``; values below the noise floor are dropped."""
    pts = [(float(t), float(v)) for t, v in samples]
    if any(v < 0 for _, v in pts):
        raise ValueError("rate_fit needs nonnegative values")
    if any(t <= 0 for t, _ in pts):
        raise ValueError("rate_fit needs t > 0")
    kept = [p for p in pts if p[1] >= NOISE_FLOOR]
    dropped = [p for p in pts if p[1] < NOISE_FLOOR]
    if len(kept) < 3:
        raise ValueError(f"need at least 3 samples above {NOISE_FLOOR:g}, got {len(kept)}")
    lt = np.log([p[0] for p in kept])
    lv = np.log([p[1] for p in kept])
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return RateReport(kept, float(slope), float(intercept), r2, dropped)


# -- pointwise limits -------------------------------------------------------

def alpha_star(d: InitialData) -> float:
    """Smallest ``alpha`` with ``alpha - xbar(alpha) = mu0(R)/2``; 0.0 for the zero measure."""
    if d.mass == 0:
        return 0.0
    s = d.segments
    return float(ch._invert(s.alpha, s.gap, 0.5 * d.mass, "inf"))


@dataclass(frozen=True)
class Prediction:
    form: str
    case: str
    limit: float | None = None
    exponent: float | None = None
    coefficient: float | None = None
    notes: str = ""


def pointwise_prediction(d: InitialData, x: float = 0.0, form=EquationForm.A, theta=None, A=None,
                         T_grid=None) -> Prediction:
    """Predicted ``lim u(x, t)`` (or growth ``coefficient * t^exponent``) as ``t -> +inf``.

    Form A classifies the left tail; when it cannot be classified the case is
    ``'inconclusive'``.  Form B does not depend on ``x``.
    """
    form = EquationForm.parse(form)
    uminus = d.u.left_value
    if form is EquationForm.B:
        if d.mass == 0:
            return Prediction("B", "degenerate", limit=uminus, notes=f"zero measure, value {uminus:g}")
        a = alpha_star(d)
        return Prediction("B", "alpha*", limit=-float(d.u(ch.xbar(d, a))), notes=f"alpha*={a:.12g}")

    if not d.approximate:
        sup = support(d.mu)
        ell = None if sup is None else sup[0]
        return Prediction("A", "L3", limit=abs(uminus), notes=f"compact left tail, ell={ell}")

    if theta is None:
        theta = d.meta.get("theta")
    if theta is None:
        return Prediction("A", "inconclusive", notes="tail exponent unknown")
    est = ""
    if A is None:
        R = d.truncation_radius
        grid = T_grid if T_grid is not None else np.geomspace(1.0, 0.5 * R ** (1 / (1 + theta)), 12)
        st = tail_stats(d, "left", theta, grid)
        if not st.values:
            return Prediction("A", "inconclusive", notes="no usable tail samples")
        A = st.estimate_A
        est = f"; A estimated ({st.quality}, approximate data)"
    if A > 0 and theta > 0:
        coef = 2.0 * (A / 4.0) ** ((1.0 + theta) / 2.0)
        return Prediction("A", "i", exponent=theta, coefficient=coef, notes=f"A={A:.6g}{est}")
    if A > 0:
        return Prediction("A", "ii", limit=math.sqrt(uminus**2 + A), notes=f"A={A:.6g}{est}")
    if theta > 0:
        return Prediction("A", "iii", exponent=theta, coefficient=0.0, notes="A=0" + est)
    return Prediction("A", "iv", limit=abs(uminus), notes="A=0" + est)


def scaling_diagnostics(d: InitialData, x: float, t_grid, theta: float = 0.0, form=EquationForm.A):
    """Rows ``(t, a, xbar(a), xbar(a)/t^(1+theta), t^(1-theta) (a - xbar(a)))`` with ``a = alpha_x(t)``."""
    rows = []
    for t in t_grid:
        t = float(t)
        if t <= 0:
            raise ValueError("t_grid must be positive")
        a = ch.alpha_of(d, x, t, form)
        xb = ch.xbar(d, a)
        rows.append((t, a, xb, xb / t ** (1 + theta), t ** (1 - theta) * (a - xb)))
    return rows


def trajectory(d: InitialData, x: float, t_grid, form=EquationForm.A, exponent: float = 0.0):
    """``u(x, t) / t^exponent`` along ``t_grid``."""
    return [(float(t), evaluate_u(d, x, t, form) / float(t) ** exponent) for t in t_grid]
