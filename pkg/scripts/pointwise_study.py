#!/usr/bin/env python3
"""Compare predicted large-time limits of u(x, t) with the exact trajectory."""
import argparse

import numpy as np

from hsx import asymptotics as asy
from hsx.initial_data import parse_example

CASES = [
    ("dirac:-1,4,0", "A"),
    ("dirac:1,4,0", "A"),
    ("dirac:1,4,0", "B"),
    ("dirac:-2.5,4,1", "B"),
    ("compact", "A"),
    ("compact", "B"),
    ("sine:1,2000,4", "A"),
    ("sine:0.6666666666666666,10000,2", "A"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=float, nargs="+", default=[-1.0, 0.0, 3.0])
    ap.add_argument("--tmax", type=float, default=1e4)
    args = ap.parse_args()
    for name, form in CASES:
        d = parse_example(name)
        tmax = args.tmax
        if d.approximate:
            # past this time the tracked label reaches the truncation radius
            tmax = min(tmax, 0.5 * d.truncation_radius ** (1 / (1 + d.meta["theta"])))
        ts = np.geomspace(10, tmax, 4)
        pred = asy.pointwise_prediction(d, args.x[0], form)
        target = pred.limit if pred.limit is not None else pred.coefficient
        scale = f"/t^{pred.exponent:g}" if pred.exponent else ""
        print(f"{name} form {form}: case {pred.case}, predicted u{scale} -> {target!r}  [{pred.notes}]")
        for x in args.x:
            tr = asy.trajectory(d, x, ts, form, pred.exponent or 0.0)
            vals = "  ".join(f"t={t:.0e}: {v: .6f}" for t, v in tr)
            print(f"    x={x:+g}  {vals}")


if __name__ == "__main__":
    main()
