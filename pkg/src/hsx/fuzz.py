"""Seeded random admissible data: piecewise-linear velocity plus a few atoms."""
from __future__ import annotations

import numpy as np

from .initial_data import InitialData, build


def random_data(seed: int, max_nodes: int = 20, max_atoms: int = 5) -> InitialData:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_nodes + 1))
    x = rng.uniform(-5, 5) + np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 2.0, n - 1))])
    u = rng.uniform(-2, 2) + np.concatenate([[0.0], np.cumsum(rng.normal(0, 1.0, n - 1) * np.diff(x))])
    k = int(rng.integers(0, max_atoms + 1))
    # some atoms sit on velocity nodes, the rest anywhere in a slightly wider window
    on_node = rng.random(k) < 0.3
    pos = np.where(on_node, rng.choice(x, k), rng.uniform(x[0] - 2, x[-1] + 2, k))
    pos = np.unique(pos)
    masses = rng.uniform(0.05, 3.0, pos.size)
    return build(np.column_stack([x, u]), np.column_stack([pos, masses]), meta={"name": f"fuzz:{seed}"})


def random_time(seed: int, lo: float = -100.0, hi: float = 100.0) -> float:
    return float(np.random.default_rng([seed, 1]).uniform(lo, hi))
