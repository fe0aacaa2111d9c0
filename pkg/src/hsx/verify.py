"""Invariant checks over the builtin examples and seeded random data.

Every check returns a :class:`Check`; a failing check names the invariant
and the seed (or example) that reproduces it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import characteristics as ch
from . import fuzz
from . import solution as sol
from .initial_data import EquationForm, build, example_compact, example_dirac, example_kink
from .measure import total_mass, validate

MASS_RTOL = 1e-12
COMPAT_RTOL = 1e-10
SEMIGROUP_ATOL = 1e-9
WEAK_TOL = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""
    seed: int | None = None

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        where = f" (seed={self.seed})" if self.seed is not None else ""
        return f"{tag} {self.name}{where}" + (f": {self.detail}" if self.detail else "")


def builtins():
    return {
        "compact": example_compact(),
        "dirac:1,4,0": example_dirac(1.0, 4.0, 0.0),
        "dirac:-1,4,0": example_dirac(-1.0, 4.0, 0.0),
        "kink:4": example_kink(4.0),
    }


def check_conservation(d, t, form=EquationForm.A):
    s = sol.slice(d, t, form)
    err = abs(total_mass(s.mu) - d.mass)
    ok = err <= MASS_RTOL * max(d.mass, 1e-300) or (d.mass == 0 and err == 0)
    return ok, f"t={t:g} |mu(t)(R) - mu0(R)|={err:.3g}"


def check_compatibility(d, t, form=EquationForm.A):
    s = sol.slice(d, t, form)
    msg = validate(s.mu)
    if msg is not None:
        return False, f"t={t:g} invalid measure: {msg}"
    defect = sol.compatibility_defect(s)
    return defect <= COMPAT_RTOL, f"t={t:g} density defect {defect:.3g}"


def semigroup_gap(d, t1, t2, npts=200, form=EquationForm.A):
    direct = sol.slice(d, t1 + t2, form)
    again = sol.reinitialize(sol.slice(d, t1, form))
    lo, hi = direct.u.x[0], direct.u.x[-1]
    pad = 1.0 + 0.05 * (hi - lo)
    xs = np.linspace(lo - pad, hi + pad, npts)
    a = sol.evaluate_u(again, xs, t2, form)
    b = sol.evaluate_u(d, xs, t1 + t2, form)
    return float(np.max(np.abs(a - b)))


def check_semigroup(d, t1, t2, form=EquationForm.A):
    try:
        gap = semigroup_gap(d, t1, t2, form=form)
    except ValueError as exc:
        return False, f"t1={t1:g} t2={t2:g}: {exc}"
    return gap <= SEMIGROUP_ATOL, f"t1={t1:g} t2={t2:g} max|diff|={gap:.3g}"


def check_reflection(d, t, xs):
    """``u`` for ``(-u0, mu0)`` at ``(x, -t)`` equals ``-u`` for ``(u0, mu0)`` at ``(x, t)``."""
    neg = build(np.column_stack([d.u.x, -d.u.u]), d.atoms)
    a = sol.evaluate_u(neg, xs, -t)
    b = sol.evaluate_u(d, xs, t)
    err = float(np.max(np.abs(a + b)))
    return err <= 1e-12 * max(1.0, float(np.max(np.abs(b)))), f"t={t:g} max|diff|={err:.3g}"


def check_form_relation(d, t, alphas):
    a = ch.y(d, alphas, t, EquationForm.A)
    b = ch.y(d, alphas, t, EquationForm.B)
    err = float(np.max(np.abs(b - (a - t * t * d.mass / 8))))
    return err <= 1e-12 * max(1.0, float(np.max(np.abs(a)))), f"t={t:g} max|diff|={err:.3g}"


def check_inverse(d, t, xs, form=EquationForm.A):
    a = ch.alpha_of(d, xs, t, form)
    back = ch.y(d, a, t, form)
    err = np.abs(back - xs) / np.maximum(1.0, np.abs(xs))
    return float(np.max(err)) <= 1e-12, f"t={t:g} max rel |y(alpha(x)) - x|={float(np.max(err)):.3g}"


def check_singular_identity(d, t):
    s = sol.slice(d, t)
    a, b = s.singular_mass(), sol.singular_mass(d, t)
    return abs(a - b) <= 1e-12 * max(1.0, d.mass), f"t={t:g} pushforward {a:.17g} vs formula {b:.17g}"


def weak_cases():
    """(name, data, test function, box) for the weak-form checks."""
    c, k = example_compact(), example_dirac(1.0, 1.0, 0.0)
    return [
        ("compact/smooth-times", c, sol.Bump(1.0, 1.0, 2.0, 0.5), ((-1, 3), (0.5, 1.5))),
        ("compact/across-blowup", c, sol.Bump(1.0, 2.0, 2.0, 0.6, "exp"), ((-1, 3), (1.4, 2.6))),
        ("compact/wide", c, sol.Bump(2.0, 2.5, 4.0, 2.0, "poly", 6), ((-2, 6), (0.5, 4.5))),
        ("dirac:1,1,0/across-zero", k, sol.Bump(0.0, 0.0, 2.0, 1.0, "exp"), ((-2, 2), (-1, 1))),
        ("dirac:1,1,0/late", k, sol.Bump(3.0, 2.0, 3.0, 1.0), ((0, 6), (1, 3))),
        ("dirac:1,1,0/early-negative", k, sol.Bump(-1.0, -1.0, 1.5, 0.5, "poly", 5), ((-3, 1), (-2, 0))),
    ]


def run(seed: int = 0, n_fuzz: int = 100, quad: int = 64) -> list:
    out = []

    def add(name, result, seed_=None):
        ok, detail = result
        out.append(Check(name, bool(ok), "" if ok else detail, seed_))

    times = (-7.5, -2.0, -0.3, 0.0, 0.7, 1.0, 2.0, 3.0, 12.0, 100.0)
    for name, d in builtins().items():
        for t in times:
            add(f"conservation[{name}, t={t:g}]", check_conservation(d, t))
            add(f"compatibility[{name}, t={t:g}]", check_compatibility(d, t))
            add(f"conservation-B[{name}, t={t:g}]", check_conservation(d, t, EquationForm.B))
        xs = np.linspace(-30, 30, 61)
        for t in (0.5, 2.0, 9.0):
            add(f"reflection[{name}, t={t:g}]", check_reflection(d, t, xs))
            add(f"form-relation[{name}, t={t:g}]", check_form_relation(d, t, np.linspace(-5, 10, 31)))
            add(f"inverse[{name}, t={t:g}]", check_inverse(d, t, xs))
            add(f"singular-identity[{name}, t={t:g}]", check_singular_identity(d, t))
        add(f"singular-identity[{name}, t=2]", check_singular_identity(d, 2.0))
        add(f"semigroup[{name}]", check_semigroup(d, 1.0, 1.0))
        add(f"semigroup[{name}, reversed]", check_semigroup(d, 3.0, -5.0))

    for name, d, phi, box in weak_cases():
        rm, re = sol.weak_residual(d, phi, box, (quad, quad))
        ok = abs(rm) <= WEAK_TOL and abs(re) <= WEAK_TOL
        out.append(Check(f"weak-residual[{name}]", ok, "" if ok else f"momentum {rm:.3g}, energy {re:.3g}"))

    for i in range(n_fuzz):
        s = seed * 100003 + i
        d = fuzz.random_data(s)
        t = fuzz.random_time(s)
        t1 = t * float(np.random.default_rng([s, 2]).uniform())
        add("fuzz-conservation", check_conservation(d, t), s)
        add("fuzz-compatibility", check_compatibility(d, t), s)
        add("fuzz-semigroup", check_semigroup(d, t1, t - t1), s)
    return out
