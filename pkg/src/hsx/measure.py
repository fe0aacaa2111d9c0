"""Finite nonnegative measures on the line: piecewise-constant density plus atoms.

All queries are closed-form finite sums; there is no quadrature anywhere.
The CDF convention is ``F(x) = mu((-inf, x))`` (open); the closed variant
``mu((-inf, x])`` is available through ``closed=True``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _as_array(values, ncols=None):
    arr = np.asarray(values, dtype=float)
    if ncols is not None:
        arr = arr.reshape(-1, ncols)
    return arr


@dataclass(frozen=True, eq=False)
class HybridMeasure:
    """Density ``density_values[i]`` on ``(bp[i], bp[i+1])``, zero outside, plus atoms.

    ``atoms`` is an ``(k, 2)`` array of ``(position, mass)`` rows.
    The constructor does not validate; use :func:`validate`.
    """

    density_breakpoints: np.ndarray = field(default_factory=lambda: np.empty(0))
    density_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    atoms: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        object.__setattr__(self, "density_breakpoints", _as_array(self.density_breakpoints))
        object.__setattr__(self, "density_values", _as_array(self.density_values))
        object.__setattr__(self, "atoms", _as_array(self.atoms, 2))

    @property
    def atom_positions(self) -> np.ndarray:
        return self.atoms[:, 0]

    @property
    def atom_masses(self) -> np.ndarray:
        return self.atoms[:, 1]

    def ac_mass(self) -> float:
        if self.density_breakpoints.size < 2:
            return 0.0
        return math.fsum(self.density_values * np.diff(self.density_breakpoints))

    def singular_mass(self) -> float:
        return math.fsum(self.atom_masses)

    def __repr__(self):
        return (
            f"HybridMeasure(pieces={self.density_values.size}, atoms={len(self.atoms)}, "
            f"mass={total_mass(self):.6g})"
        )


def empty_measure() -> HybridMeasure:
    return HybridMeasure()


def lebesgue(a: float, b: float, rho: float = 1.0) -> HybridMeasure:
    """Constant density ``rho`` on ``(a, b)``."""
    return HybridMeasure([a, b], [rho])


def dirac(position: float, mass: float = 1.0) -> HybridMeasure:
    return HybridMeasure(atoms=[[position, mass]])


def _ac_cdf(m: HybridMeasure, x):
    bp = m.density_breakpoints
    if bp.size < 2:
        return np.zeros_like(np.asarray(x, dtype=float))
    cum = np.concatenate([[0.0], np.cumsum(m.density_values * np.diff(bp))])
    # np.interp clamps outside [bp[0], bp[-1]], which is exactly the CDF there
    return np.interp(x, bp, cum)


def _atom_cdf(m: HybridMeasure, x, closed: bool):
    if len(m.atoms) == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    cum = np.concatenate([[0.0], np.cumsum(m.atom_masses)])
    idx = np.searchsorted(m.atom_positions, x, side="right" if closed else "left")
    return cum[idx]


def cdf(m: HybridMeasure, x, closed: bool = False):
    """``mu((-inf, x))``, or ``mu((-inf, x])`` when ``closed``. Vectorized in ``x``."""
    out = _ac_cdf(m, x) + _atom_cdf(m, x, closed)
    if np.ndim(out) == 0:
        return float(out)
    return out


def total_mass(m: HybridMeasure) -> float:
    return m.ac_mass() + m.singular_mass()


def tail_mass(m: HybridMeasure, side: str, threshold: float) -> float:
    """``mu((-inf, -T))`` for ``side='left'``, ``mu((T, +inf))`` for ``side='right'``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if side == "left":
        return cdf(m, -threshold, closed=False)
    if side == "right":
        return max(total_mass(m) - cdf(m, threshold, closed=True), 0.0)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def atom_mass_at(m: HybridMeasure, x: float) -> float:
    hits = m.atom_masses[m.atom_positions == x]
    return float(hits.sum()) if hits.size else 0.0


def support(m: HybridMeasure):
    """``(inf supp, sup supp)`` or ``None`` for the zero measure."""
    lo, hi = math.inf, -math.inf
    bp, rho = m.density_breakpoints, m.density_values
    pos = np.nonzero(rho > 0)[0]
    if pos.size:
        lo, hi = bp[pos[0]], bp[pos[-1] + 1]
    if len(m.atoms):
        lo = min(lo, m.atom_positions[0])
        hi = max(hi, m.atom_positions[-1])
    if lo > hi:
        return None
    return float(lo), float(hi)


def validate(m: HybridMeasure):
    """Return ``None`` when every invariant holds, else a description of the first violation."""
    bp, rho, atoms = m.density_breakpoints, m.density_values, m.atoms
    if bp.ndim != 1 or rho.ndim != 1:
        return "density arrays must be one-dimensional"
    if bp.size == 0 and rho.size:
        return "density values given without breakpoints"
    if bp.size and rho.size != bp.size - 1:
        return f"expected {max(bp.size - 1, 0)} density values, got {rho.size}"
    if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(rho)) and np.all(np.isfinite(atoms))):
        return "non-finite entry"
    if np.any(np.diff(bp) <= 0):
        return "breakpoints not strictly increasing"
    if np.any(rho < 0):
        i = int(np.argmax(rho < 0))
        return f"negative density on piece {i}"
    if len(atoms):
        if np.any(atoms[:, 1] <= 0):
            i = int(np.argmax(atoms[:, 1] <= 0))
            return f"nonpositive atom mass at index {i}"
        if np.any(np.diff(atoms[:, 0]) <= 0):
            return "atoms not strictly increasing"
    return None
