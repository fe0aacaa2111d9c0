"""Admissible initial pairs ``(u0, mu0)``: builders, label decomposition and JSON I/O.

The velocity profile is continuous piecewise linear with constant tails, and
the energy measure is ``u0_x**2 dx`` plus finitely many atoms.  At
construction we precompute the decomposition of the label axis ``alpha``
induced by ``G(x) = x + mu0((-inf, x))``: on every label segment the three
maps ``alpha -> xbar(alpha)``, ``alpha -> u0(xbar(alpha))`` and
``alpha -> alpha - xbar(alpha)`` are affine, so storing their values at the
segment boundaries is enough to evaluate them exactly by interpolation.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .measure import HybridMeasure, total_mass

AC, ATOM = 0, 1


class DataError(ValueError):
    """Raised for malformed or incompatible initial data."""


class EquationForm(enum.Enum):
    """Antiderivative convention of the right-hand side.

    ``A``: one-sided, ``1/2 int_{-inf}^x``.
    ``B``: symmetrized, ``1/4 (int_{-inf}^x - int_x^{+inf})``.
    """

    A = "A"
    B = "B"

    @property
    def gap_shift(self) -> float:
        """Fraction of the total mass subtracted from ``alpha - xbar`` in the quadratic term."""
        return 0.0 if self is EquationForm.A else 0.5

    @classmethod
    def parse(cls, value) -> "EquationForm":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    """Continuous piecewise-linear function, constant beyond the first and last node."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        if len(nodes) == 0:
            raise DataError("velocity profile needs at least one node")
        if not np.all(np.isfinite(nodes)):
            raise DataError("velocity profile has non-finite node values")
        if np.any(np.diff(nodes[:, 0]) <= 0):
            i = int(np.argmax(np.diff(nodes[:, 0]) <= 0))
            raise DataError(f"velocity nodes not strictly increasing at index {i + 1}")
        object.__setattr__(self, "nodes", nodes)

    @property
    def x(self) -> np.ndarray:
        return self.nodes[:, 0]

    @property
    def u(self) -> np.ndarray:
        return self.nodes[:, 1]

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.u) / np.diff(self.x)

    @property
    def left_value(self) -> float:
        return float(self.u[0])

    @property
    def right_value(self) -> float:
        return float(self.u[-1])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))

    def __call__(self, x):
        out = np.interp(x, self.x, self.u)
        return float(out) if np.ndim(out) == 0 else out

    def slope_at(self, x):
        """Slope of the piece containing ``x`` (right-continuous; 0 on the tails)."""
        x = np.asarray(x, dtype=float)
        s = np.concatenate([[0.0], self.slopes, [0.0]])
        out = s[np.searchsorted(self.x, x, side="right")]
        return float(out) if out.ndim == 0 else out

    def l2_slope_norm_sq(self) -> float:
        return math.fsum(self.slopes**2 * np.diff(self.x))

    def __eq__(self, other):
        return isinstance(other, VelocityProfile) and np.array_equal(self.nodes, other.nodes)

    def __repr__(self):
        return f"VelocityProfile(n={len(self.nodes)}, x=[{self.x[0]:.4g}, {self.x[-1]:.4g}])"


@dataclass(frozen=True, eq=False)
class Segments:
    """Label-axis decomposition.

    Boundaries ``alpha[0] < ... < alpha[K]`` split the finite part of the axis
    into ``K`` segments; ``kind[k]``/``slope[k]`` describe the segment
    ``(alpha[k], alpha[k+1])``.  Outside ``[alpha[0], alpha[K]]`` lie the two
    tails, where ``xbar`` has slope 1 and the gap ``alpha - xbar`` is
    constant (0 on the left, the total mass on the right).
    """

    alpha: np.ndarray
    xbar: np.ndarray
    ubar: np.ndarray
    gap: np.ndarray
    kind: np.ndarray
    slope: np.ndarray

    @property
    def count(self) -> int:
        return len(self.kind)

    @property
    def xbar_rate(self) -> np.ndarray:
        """``d xbar / d alpha`` per segment: ``1/(1+s^2)`` on ac pieces, 0 on atoms."""
        return np.where(self.kind == ATOM, 0.0, 1.0 / (1.0 + self.slope**2))

    @property
    def weight(self) -> np.ndarray:
        """``f = 1 - xbar'`` per segment."""
        return np.where(self.kind == ATOM, 1.0, self.slope**2 / (1.0 + self.slope**2))

    def locate(self, alpha):
        """Segment index of ``alpha``: -1 on the left tail, ``K`` on the right tail."""
        return np.searchsorted(self.alpha, alpha, side="right") - 1


def _decompose(u: VelocityProfile, atoms: np.ndarray, rho: np.ndarray) -> Segments:
    """Segments in label order: at each point an atom segment (if any), then the ac piece to its right."""
    atom_x = atoms[:, 0] if len(atoms) else np.empty(0)
    pts = np.union1d(u.x, atom_x)
    n = len(pts)
    atom_m = np.zeros(n)
    if len(atoms):
        atom_m[np.searchsorted(pts, atom_x)] = atoms[:, 1]
    mids = 0.5 * (pts[:-1] + pts[1:])
    ac_slope = np.append(u.slope_at(mids), 0.0) if n > 1 else np.zeros(1)
    rho_ext = np.concatenate([[0.0], rho, [0.0]])
    ac_rho = rho_ext[np.searchsorted(u.x, mids, side="right")] if n > 1 else np.empty(0)
    ac_m = np.append(ac_rho * np.diff(pts), 0.0)

    # two candidate segments per point, kept in label order
    valid = np.column_stack([atom_m > 0, np.arange(n) < n - 1]).ravel()
    kind = np.column_stack([np.full(n, ATOM), np.full(n, AC)]).ravel()[valid]
    seg_mass = np.column_stack([atom_m, ac_m]).ravel()[valid]
    slope = np.column_stack([np.zeros(n), ac_slope]).ravel()[valid]
    right_x = np.column_stack([pts, np.append(pts[1:], pts[-1])]).ravel()[valid]

    xs = np.concatenate([pts[:1], right_x])
    gaps = np.concatenate([[0.0], np.cumsum(seg_mass)])
    return Segments(
        alpha=xs + gaps,
        xbar=xs,
        ubar=np.asarray(u(xs), dtype=float).reshape(-1),
        gap=gaps,
        kind=kind.astype(np.int8),
        slope=slope,
    )


@dataclass(frozen=True, eq=False)
class InitialData:
    """A compatible pair ``(u0, mu0)`` with its label decomposition."""

    u: VelocityProfile
    mu: HybridMeasure
    segments: Segments
    meta: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return total_mass(self.mu)

    @property
    def atoms(self) -> np.ndarray:
        return self.mu.atoms

    @property
    def truncation_radius(self):
        return self.meta.get("truncation_radius")

    @property
    def approximate(self) -> bool:
        return self.truncation_radius is not None

    @property
    def name(self) -> str:
        return self.meta.get("name", "")

    def __eq__(self, other):
        return (
            isinstance(other, InitialData)
            and self.u == other.u
            and np.array_equal(self.mu.atoms, other.mu.atoms)
            and self.meta == other.meta
        )

    def __repr__(self):
        return f"InitialData(name={self.name!r}, nodes={len(self.u.nodes)}, atoms={len(self.atoms)}, mass={self.mass:.6g})"


def _clean_atoms(extra_atoms) -> np.ndarray:
    atoms = np.asarray(list(extra_atoms) if extra_atoms is not None else [], dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(atoms)):
        raise DataError("atoms contain non-finite values")
    if np.any(atoms[:, 1] <= 0):
        i = int(np.argmax(atoms[:, 1] <= 0))
        raise DataError(f"atom {i} has nonpositive mass {atoms[i, 1]!r}")
    atoms = atoms[np.argsort(atoms[:, 0], kind="stable")]
    if np.any(np.diff(atoms[:, 0]) == 0):
        raise DataError("atoms not strictly increasing (duplicate positions)")
    return atoms


DENSITY_RTOL = 1e-10


def slope_sq_slack(u: VelocityProfile) -> np.ndarray:
    """Rounding bound on each squared slope ``(du/dx)^2`` of a binary64 profile.

    A thin interval far from the origin has a width known only to one ulp of
    its endpoints, and a rise smaller than one ulp of ``u`` is lost entirely,
    so the slope carries an error of up to ``4 eps (|u| + |s| |x|) / dx``.
    """
    if len(u.x) < 2:
        return np.empty(0)
    eps = np.finfo(float).eps
    dx = np.diff(u.x)
    s = np.abs(np.diff(u.u)) / dx
    xs = np.maximum(np.abs(u.x[:-1]), np.abs(u.x[1:]))
    us = np.maximum(np.abs(u.u[:-1]), np.abs(u.u[1:]))
    # subnormal-width intervals get an infinite bound: any density is consistent
    with np.errstate(over="ignore"):
        ds = 4 * eps * (us + s * xs) / dx
        return ds * (2 * s + ds)


def build(u, extra_atoms=(), meta=None, density=None) -> InitialData:
    """Build ``(u0, u0_x^2 dx + sum of atoms)``; compatibility holds by construction.

    ``density`` optionally supplies the values of ``u0_x^2`` per node interval
    (e.g. a solution slice whose densities carry exact total mass); they must
    agree with the squared slopes to ``DENSITY_RTOL``.
    """
    if not isinstance(u, VelocityProfile):
        u = VelocityProfile(u)
    atoms = _clean_atoms(extra_atoms)
    sq = u.slopes**2 if len(u.x) > 1 else np.empty(0)
    if density is not None:
        density = np.asarray(density, dtype=float).reshape(-1)
        if density.size != sq.size:
            raise DataError(f"density has {density.size} entries, expected {sq.size}")
        slack = DENSITY_RTOL * np.maximum(1.0, sq) + slope_sq_slack(u)
        bad = np.abs(density - sq) > slack
        if np.any(bad):
            k = int(np.argmax(bad))
            raise DataError(f"compatibility violated at segment {k}: density {float(density[k])!r} != slope^2 {float(sq[k])!r}")
    rho = sq if density is None else density
    if len(u.x) > 1:
        mu = HybridMeasure(u.x, rho, atoms)
    else:
        mu = HybridMeasure(atoms=atoms)
    return InitialData(u=u, mu=mu, segments=_decompose(u, atoms, rho), meta=dict(meta or {}))


def constant(c: float, at: float = 0.0) -> InitialData:
    """``u0 = c``, ``mu0 = 0``."""
    return build([[at, c]], meta={"name": f"const:{c:g}"})


def example_dirac(k: float, ell: float, x0: float) -> InitialData:
    """``(k, ell * delta_{x0})``."""
    if not ell > 0:
        raise DataError(f"atom mass must be positive, got {ell!r}")
    return build([[x0, k]], [[x0, ell]], meta={"name": f"dirac:{k:g},{ell:g},{x0:g}"})


def example_kink(m: float) -> InitialData:
    """Initial data ``(0, m * delta_0)`` of the kink-wave."""
    d = example_dirac(0.0, m, 0.0)
    return InitialData(d.u, d.mu, d.segments, {"name": f"kink:{m:g}"})


def example_compact() -> InitialData:
    """``u0 = 0`` for ``x <= 0``, ``-x`` on ``(0, 1)``, ``-1`` for ``x >= 1``; ``mu0 = u0_x^2 dx``."""
    return build([[0.0, 0.0], [1.0, -1.0]], meta={"name": "compact"})


def _factorials(k):
    return np.array([math.factorial(int(i)) for i in k], dtype=float)


def _sine_integrand(y, a):
    return np.sin(y) / np.abs(y) ** a


def sine_tail_mass(R: float, a: float) -> float:
    """``int_R^inf sin(y)^2 / y^(2a) dy`` via the power integral and two integration-by-parts terms.

    The neglected remainder is ``O(R^(-2a-2))``.
    """
    p = 2.0 * a
    osc = -math.sin(2 * R) / (2 * R**p) + p * math.cos(2 * R) / (4 * R ** (p + 1))
    return 0.5 * R ** (1 - p) / (p - 1) - 0.5 * osc


def example_sine_tail(a: float, R: float, n: int, tail_atoms: bool = True) -> InitialData:
    """Interpolant of ``u0(x) = int_0^x sin(y)/|y|^a dy`` on ``[-R, R]``, ``n`` nodes per unit length.

    This is a truncated, interpolated stand-in for data whose energy tails
    decay like ``|x|^(-2a)``; the tail exponent it is meant to reproduce is
    ``theta = 1/a - 1`` and is recorded in ``meta``.

    With ``tail_atoms`` the energy of the discarded tails is put back as two
    atoms at the ends of the grid.  Without them every characteristic would
    lose that mass from ``alpha - xbar``, which shifts ``u`` by an error that
    grows linearly in ``t``.
    """
    if not (0.5 < a <= 1.0):
        raise DataError(f"a must lie in (1/2, 1], got {a!r}")
    if not (R > 0 and int(n) > 1):
        raise DataError("need R > 0 and n > 1")
    n = int(n)
    half = int(math.ceil(R * n))
    x = np.arange(-half, half + 1) / n
    gx, gw = np.polynomial.legendre.leggauss(12)
    lo, hi = x[:-1], x[1:]
    mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + rad[:, None] * gx[None, :]
    cell = rad * (_sine_integrand(pts, a) @ gw)
    # the two cells touching 0 carry an |y|^(1-a) endpoint singularity; integrate
    # the power series of sin term by term there (the integrand is odd)
    h = 1.0 / n
    k = np.arange(20)
    cell[half] = math.fsum((-1.0) ** k * h ** (2 * k + 2 - a) / (_factorials(2 * k + 1) * (2 * k + 2 - a)))
    cell[half - 1] = -cell[half]
    u = np.empty_like(x)
    u[half] = 0.0
    u[half + 1:] = np.cumsum(cell[half:])
    u[:half] = -np.cumsum(cell[:half][::-1])[::-1]
    meta = {"name": f"sine:{a:g},{R:g},{n}", "truncation_radius": float(x[-1]), "theta": 1.0 / a - 1.0}
    atoms = []
    if tail_atoms:
        m = sine_tail_mass(float(x[-1]), a)
        atoms = [[x[0], m], [x[-1], m]]
    return build(np.column_stack([x, u]), atoms, meta=meta)


# -- JSON documents ---------------------------------------------------------

def save(d: InitialData) -> dict:
    doc = {"u_nodes": d.u.nodes.tolist(), "atoms": d.atoms.tolist()}
    if d.meta:
        doc["meta"] = dict(d.meta)
    return doc


def _pairs(doc, key, required):
    if key not in doc:
        if required:
            raise DataError(f"missing required field {key!r}")
        return np.empty((0, 2))
    rows = doc[key]
    if not isinstance(rows, list):
        raise DataError(f"{key!r} must be a list of [x, value] pairs")
    for i, row in enumerate(rows):
        if not (isinstance(row, (list, tuple)) and len(row) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)):
            raise DataError(f"{key}[{i}] must be a pair of numbers")
    arr = np.asarray(rows, dtype=float).reshape(-1, 2)
    if np.any(np.diff(arr[:, 0]) <= 0):
        i = int(np.argmax(np.diff(arr[:, 0]) <= 0)) + 1
        raise DataError(f"{key}[{i}]: x not strictly increasing")
    return arr


def load(doc) -> InitialData:
    """Parse a document; reports schema and compatibility violations with their location."""
    if not isinstance(doc, dict):
        raise DataError("document must be a JSON object")
    nodes = _pairs(doc, "u_nodes", required=True)
    if len(nodes) == 0:
        raise DataError("'u_nodes' needs at least one entry")
    atoms = _pairs(doc, "atoms", required=False)
    meta = doc.get("meta", {})
    if not isinstance(meta, dict) or not isinstance(meta.get("name", ""), str):
        raise DataError("'meta' must be an object with an optional string 'name'")
    d = build(nodes, atoms, meta=meta)
    if "density_values" in doc:
        dens = np.asarray(doc["density_values"], dtype=float).reshape(-1)
        slopes_sq = d.u.slopes**2
        if dens.size != slopes_sq.size:
            raise DataError(f"'density_values' has {dens.size} entries, expected {slopes_sq.size}")
        bad = np.abs(dens - slopes_sq) > 1e-12 * np.maximum(1.0, np.abs(slopes_sq))
        if np.any(bad):
            k = int(np.argmax(bad))
            raise DataError(
                f"compatibility violated at segment {k}: density {float(dens[k])!r} != slope^2 {float(slopes_sq[k])!r}"
            )
    return d


def save_json(d: InitialData, path) -> None:
    Path(path).write_text(json.dumps(save(d), indent=1) + "\n", encoding="utf-8")


def load_json(path) -> InitialData:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc
    return load(doc)


def parse_example(name: str) -> InitialData:
    """Builtin names: ``dirac:k,l,x0``, ``compact``, ``sine:a,R,n``, ``kink:m``, ``const:c``."""
    head, _, args = name.partition(":")
    try:
        vals = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise DataError(f"bad example arguments in {name!r}") from None
    if head == "compact" and not vals:
        return example_compact()
    if head == "dirac" and len(vals) == 3:
        return example_dirac(*vals)
    if head == "kink" and len(vals) == 1:
        return example_kink(vals[0])
    if head == "sine" and len(vals) == 3:
        return example_sine_tail(vals[0], vals[1], int(vals[2]))
    if head == "const" and len(vals) == 1:
        return constant(vals[0])
    raise DataError(f"unknown example {name!r}")
