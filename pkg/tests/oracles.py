"""Independent reference computations used by the tests.

Nothing here touches the label decomposition: x-bar comes from bisection on
the measure's CDF, characteristics are assembled from that, and inverses are
bisected again.
"""
import numpy as np
from hypothesis import strategies as st

from hsx.initial_data import build
from hsx.measure import cdf

# filled in by test_acceptance.py, echoed in the terminal summary by conftest.py
ACCEPTANCE = {}


def brute_xbar(d, alpha):
    """``sup {x : x + mu0((-inf, x)) <= alpha}`` by bisection."""
    lo, hi = alpha - d.mass - 1.0, alpha + 1.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if mid + cdf(d.mu, mid) <= alpha:
            lo = mid
        else:
            hi = mid
    return lo


def brute_y(d, alpha, t, shift=0.0):
    xb = brute_xbar(d, alpha)
    return xb + d.u(xb) * t + 0.25 * t * t * (alpha - xb - shift * d.mass)


def bisect_first(h, target, lo, hi):
    """Smallest ``a`` in ``[lo, hi]`` with ``h(a) >= target`` for nondecreasing ``h``."""
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if h(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@st.composite
def data(draw, max_nodes=8, max_atoms=3):
    """Admissible data drawn node by node."""
    n = draw(st.integers(1, max_nodes))
    x0 = draw(st.floats(-5, 5))
    dx = draw(st.lists(st.floats(0.1, 2.0), min_size=n - 1, max_size=n - 1))
    slopes = draw(st.lists(st.floats(-3, 3), min_size=n - 1, max_size=n - 1))
    # a slope of 1e-200 would put a blow-up at t ~ 1e200, where t^2 overflows
    slopes = [0.0 if abs(v) < 1e-6 else v for v in slopes]
    u0 = draw(st.floats(-2, 2))
    x = x0 + np.concatenate([[0.0], np.cumsum(dx)])
    u = u0 + np.concatenate([[0.0], np.cumsum(np.asarray(slopes) * np.asarray(dx))])
    k = draw(st.integers(0, max_atoms))
    pos = draw(st.lists(st.floats(-8, 8), min_size=k, max_size=k, unique=True))
    if k and draw(st.booleans()):
        pos[0] = float(x[draw(st.integers(0, n - 1))])
    pos = sorted(set(pos))
    masses = draw(st.lists(st.floats(0.05, 3.0), min_size=len(pos), max_size=len(pos)))
    return build(np.column_stack([x, u]), np.column_stack([pos, masses]) if pos else ())
