#!/usr/bin/env python3
"""Tabulate characteristic curves y(alpha, t) for a family of labels.

Output is long-format CSV (alpha, t, y, u) that any plotting tool can draw;
labels inside atom segments fan out from a single point at t = 0, and the
compact example shows all labels of (0, 1) meeting at x = 0 at t = 2.
"""
import argparse
import sys

import numpy as np

from hsx import characteristics as ch
from hsx.initial_data import parse_example


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--example", default="compact")
    ap.add_argument("--form", default="A")
    ap.add_argument("--alphas", type=int, default=21, help="number of labels")
    ap.add_argument("--tmin", type=float, default=-1.0)
    ap.add_argument("--tmax", type=float, default=4.0)
    ap.add_argument("--nt", type=int, default=101)
    args = ap.parse_args()

    d = parse_example(args.example)
    s = d.segments
    alphas = np.linspace(s.alpha[0] - 1, s.alpha[-1] + 1, args.alphas)
    out = sys.stdout
    out.write("alpha,t,y,u\n")
    for t in np.linspace(args.tmin, args.tmax, args.nt):
        ys = ch.y(d, alphas, t, args.form)
        us = ch.speed(d, alphas, t, args.form)
        for a, yv, uv in zip(alphas, np.atleast_1d(ys), np.atleast_1d(us)):
            out.write(",".join(repr(float(v)) for v in (a, t, yv, uv)) + "\n")


if __name__ == "__main__":
    main()
