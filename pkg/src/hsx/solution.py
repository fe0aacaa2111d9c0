"""Conservative solution at a fixed time, assembled from the boundary characteristics.

``slice`` pushes every label segment through ``y(., t)``: a segment with
positive ``y_alpha`` becomes an interval carrying density ``f / y_alpha``,
a collapsed one becomes an atom of mass ``f * dalpha``.  The velocity is read
off the same boundary characteristics, so ``u(., t)`` is again piecewise
linear and ``mu(t)`` is again a :class:`HybridMeasure`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import characteristics as ch
from .initial_data import ATOM, DENSITY_RTOL, DataError, EquationForm, InitialData, VelocityProfile, build, slope_sq_slack
from .measure import HybridMeasure, cdf, total_mass, validate


@dataclass(frozen=True, eq=False)
class SolutionSlice:
    """``(u(., t), mu(t))`` with the analytic slope on every interval of ``u``.

    ``ux[i]`` and ``provenance[i]`` belong to the interval ``(u.x[i], u.x[i+1])``;
    ``provenance`` is the index of the label segment it came from.
    ``collapse_points`` lists positions where a label segment of positive
    length was squeezed to a point; ``u_x`` is undefined there.
    """

    t: float
    form: EquationForm
    u: VelocityProfile
    mu: HybridMeasure
    ux: np.ndarray
    provenance: np.ndarray
    collapse_points: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def singular_atoms(self) -> np.ndarray:
        return self.mu.atoms

    def singular_mass(self) -> float:
        return self.mu.singular_mass()

    def slope_at(self, x):
        """Right slope of ``u(., t)`` at ``x``; ``None`` at a collapse point."""
        if np.any(self.collapse_points == x):
            return None
        s = np.concatenate([[0.0], self.ux, [0.0]])
        return float(s[np.searchsorted(self.u.x, x, side="right")])


def _segment_masses(d: InitialData) -> np.ndarray:
    """``int f dalpha`` per segment; differences of the gap telescope to the total mass."""
    return np.diff(d.segments.gap)


def _segment_ux(d: InitialData, t: float) -> np.ndarray:
    s = d.segments
    with np.errstate(divide="ignore", invalid="ignore"):
        ac = s.slope / (1.0 + 0.5 * t * s.slope)
    atom = 2.0 / t if t != 0 else np.inf
    return np.where(s.kind == ATOM, atom, ac)


def _densities(X, V, sq, mass):
    """Densities ``~ u_x^2`` on the intervals of ``X`` carrying exactly ``sum(mass)``.

    The pushforward density ``f / y_alpha`` equals ``u_x^2`` analytically, but
    interval widths carry one ulp of rounding from the breakpoints, which
    matters for thin intervals far from the origin.  The missing mass goes back
    as one common relative factor, which keeps the largest relative change
    smallest.  If that factor is larger than some interval can absorb within
    its own rounding budget, the correction is shared in proportion to the
    budgets instead, so the slice still passes :func:`build`'s check.
    """
    if sq.size == 0:
        return sq
    carried = sq * np.diff(X)
    total = math.fsum(carried)
    if total <= 0:
        return sq
    deficit = math.fsum(mass) - total
    pos = sq > 0
    budget = np.zeros_like(sq)
    budget[pos] = (DENSITY_RTOL * np.maximum(1.0, sq[pos]) + slope_sq_slack(VelocityProfile(np.column_stack([X, V])))[pos]) / sq[pos]
    r = deficit / total
    if abs(r) <= np.min(budget[pos]):
        return sq * (1.0 + r)
    lam = deficit / math.fsum(budget * carried)
    return sq * (1.0 + lam * budget)


def slice(d: InitialData, t: float, form=EquationForm.A) -> SolutionSlice:  # noqa: A001
    """Exact ``(u(., t), mu(t))``."""
    form = EquationForm.parse(form)
    t = float(t)
    Y, U, deg = ch.boundary_state(d, t, form)
    mass = _segment_masses(d)
    ux_seg = _segment_ux(d, t)

    # Y is nondecreasing, so a segment survives exactly when its image has positive length
    keep = ~deg & (Y[1:] > Y[:-1])
    X = np.concatenate([Y[:1], Y[1:][keep]])
    V = np.concatenate([U[:1], U[1:][keep]])
    dens = _densities(X, V, ux_seg[keep] ** 2, mass[keep])

    lost = ~keep & (mass > 0)
    where = Y[:-1][lost]
    pos, inv = np.unique(where, return_inverse=True)
    atoms = np.column_stack([pos, np.bincount(inv, weights=mass[lost], minlength=pos.size)])
    spread = (d.segments.kind[lost] != ATOM) | (t != 0)
    collapsed = np.unique(where[spread])

    if len(X) > 1:
        mu = HybridMeasure(X, dens, atoms)
    else:
        mu = HybridMeasure(atoms=atoms)
    return SolutionSlice(
        t=t,
        form=form,
        u=VelocityProfile(np.column_stack([X, V])),
        mu=mu,
        ux=ux_seg[keep],
        provenance=np.nonzero(keep)[0],
        collapse_points=collapsed,
    )


def evaluate_u(d: InitialData, x, t: float, form=EquationForm.A):
    """``u(x, t)``: the speed of the leftmost characteristic reaching ``x`` at time ``t``."""
    Y, U, _ = ch.boundary_state(d, t, form)
    alpha = ch._invert(d.segments.alpha, Y, x, "inf")
    return ch._scalarize(ch._affine_ext(alpha, d.segments.alpha, U, 0.0, 0.0))


def singular_mass(d: InitialData, t: float) -> float:
    """Energy concentrated at time ``t``, from the Lebesgue measure of ``{u0_x = -2/t}``."""
    if t == 0:
        raise ValueError("singular_mass is defined for t != 0; use slice(d, 0) for the initial atoms")
    if len(d.u.x) < 2:
        return 0.0
    hit = ch.collapses(d.u.slopes, t)
    return 4.0 / (t * t) * math.fsum(np.diff(d.u.x)[hit])


def compatibility_defect(s: SolutionSlice) -> float:
    """Largest ``|rho - u_x^2| / max(1, u_x^2)`` over the intervals of ``s``."""
    rho = s.mu.density_values
    if rho.size == 0:
        return 0.0
    sq = s.ux**2
    return float(np.max(np.abs(rho - sq) / np.maximum(1.0, sq)))


def reinitialize(s: SolutionSlice, meta=None) -> InitialData:
    """Use ``(u(., t), mu(t))`` as new initial data.

    The densities are passed through, so the new data carry exactly the mass of
    the slice; :func:`build` checks them against the squared slopes, allowing
    for the rounding of thin intervals.
    """
    msg = validate(s.mu)
    if msg is not None:
        raise DataError(f"slice measure invalid: {msg}")
    dens = s.mu.density_values if len(s.u.x) > 1 else None
    return build(s.u, s.mu.atoms, meta=meta, density=dens)


# -- weak-form residuals ----------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """Tensor bump ``b((x - x0)/hx) * b((t - t0)/ht)``.

    ``kind='poly'`` uses ``b(s) = (1 - s^2)^power`` (``C^{power-1}``, polynomial
    on its support); ``kind='exp'`` uses the smooth ``exp(1 - 1/(1 - s^2))``.
    """

    x0: float
    t0: float
    hx: float
    ht: float
    kind: str = "poly"
    power: int = 4

    def __post_init__(self):
        if self.hx <= 0 or self.ht <= 0:
            raise ValueError("bump half-widths must be positive")
        if self.kind not in ("poly", "exp"):
            raise ValueError(f"unknown bump kind {self.kind!r}")

    def _profile(self, s):
        s = np.asarray(s, dtype=float)
        inside = np.abs(s) < 1
        q = np.where(inside, 1.0 - s * s, 1.0)
        if self.kind == "poly":
            b = q**self.power
            db = -2.0 * self.power * s * q ** (self.power - 1)
        else:
            b = np.exp(1.0 - 1.0 / q)
            db = b * (-2.0 * s / (q * q))
        return np.where(inside, b, 0.0), np.where(inside, db, 0.0)

    def parts(self, x, t):
        """``(phi, phi_x, phi_t)`` on matching arrays ``x``, ``t``."""
        bx, dbx = self._profile((np.asarray(x) - self.x0) / self.hx)
        bt, dbt = self._profile((np.asarray(t) - self.t0) / self.ht)
        return bx * bt, dbx * bt / self.hx, bx * dbt / self.ht

    @property
    def x_support(self):
        return self.x0 - self.hx, self.x0 + self.hx

    @property
    def t_support(self):
        return self.t0 - self.ht, self.t0 + self.ht


def _gauss(n):
    return np.polynomial.legendre.leggauss(int(n))


def _slice_integrals(s: SolutionSlice, phi: Bump, mass: float, xnodes):
    """Momentum and energy integrands at time ``s.t``, integrated exactly over x pieces."""
    lo, hi = phi.x_support
    gx, gw = xnodes
    cuts = np.unique(np.concatenate([[lo, hi], s.u.x[(s.u.x > lo) & (s.u.x < hi)]]))
    a, b = cuts[:-1], cuts[1:]
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    x = (mid[:, None] + rad[:, None] * gx[None, :]).ravel()
    w = (rad[:, None] * gw[None, :]).ravel()
    t = np.full_like(x, s.t)

    p, px, pt = phi.parts(x, t)
    u = s.u(x)
    ux = np.concatenate([[0.0], s.ux, [0.0]])[np.searchsorted(s.u.x, x, side="right")]
    F = cdf(s.mu, x)
    if s.form is EquationForm.B:
        F = F - 0.5 * mass
    mom = math.fsum(w * (u * pt - p * (u * ux - 0.5 * F)))

    bp, rho = s.mu.density_breakpoints, s.mu.density_values
    dens = np.zeros_like(x)
    if bp.size > 1:
        idx = np.searchsorted(bp, x, side="right") - 1
        ok = (idx >= 0) & (idx < rho.size)
        dens[ok] = rho[idx[ok]]
    en = math.fsum(w * (pt + u * px) * dens)
    if len(s.mu.atoms):
        ax = s.mu.atom_positions
        ap, apx, apt = phi.parts(ax, np.full_like(ax, s.t))
        en += math.fsum(s.mu.atom_masses * (apt + s.u(ax) * apx))
    return mom, en


def time_breaks(d: InitialData, lo: float, hi: float) -> list:
    """Times in ``(lo, hi)`` where the slice changes character: blow-ups and ``t = 0``."""
    cands = ch.blowup_times(d) + [0.0]
    return sorted({c for c in cands if lo < c < hi})


def weak_residual(d: InitialData, phi: Bump, box, quad=(32, 32), form=EquationForm.A):
    """Residuals of the weak momentum equation and of the energy transport equation.

    ``box = ((x_lo, x_hi), (t_lo, t_hi))`` must contain the support of ``phi``.
    ``quad = (nx, nt)``: Gauss-Legendre nodes per linear piece of ``u`` in x and
    per smooth time interval in t.  Returns ``(r_momentum, r_energy)``.
    """
    form = EquationForm.parse(form)
    (xa, xb), (ta, tb) = box
    (xl, xh), (tl, th) = phi.x_support, phi.t_support
    if xl < xa or xh > xb or tl < ta or th > tb:
        raise ValueError("test function support exceeds the box")
    nx, nt = quad
    xnodes = _gauss(nx)
    gt, gw = _gauss(nt)
    edges = [tl, *time_breaks(d, tl, th), th]
    mass = d.mass
    r_mom, r_en = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        for tau, w in zip(mid + rad * gt, rad * gw):
            m, e = _slice_integrals(slice(d, tau, form), phi, mass, xnodes)
            r_mom.append(w * m)
            r_en.append(w * e)
    return math.fsum(r_mom), math.fsum(r_en)


def energy_defect(d: InitialData, t: float, form=EquationForm.A) -> float:
    """``|mu(t)(R) - mu0(R)|``."""
    return abs(total_mass(slice(d, t, form).mu) - d.mass)
