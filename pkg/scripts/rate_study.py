#!/usr/bin/env python3
"""Fitted error exponents for the builtin data over geometric time grids.

Prints one line per (data, norm, region) with the fitted slope and r^2, and
optionally writes the raw samples as CSV.
"""
import argparse
import csv

import numpy as np

from hsx import asymptotics as asy
from hsx.initial_data import parse_example

# name, t range, number of samples; the sine windows stay well inside the truncation radius
STUDIES = [
    ("compact", 4, 4096, 11),
    ("dirac:-1,4,0", 4, 4096, 11),
    ("dirac:1,1,0", 4, 4096, 11),
    ("sine:0.6666666666666666,100000,2", 50, 1600, 9),
    ("sine:0.8,20000,2", 20, 1000, 9),
]


def study(name, lo, hi, n, form):
    d = parse_example(name)
    samples = [asy.error_sample(d, t, form) for t in np.geomspace(lo, hi, n)]
    rows = []
    for norm in ("linf", "h1"):
        for region in asy.REGIONS:
            pts = [(e.t, getattr(e, norm)[region]) for e in samples]
            try:
                r = asy.rate_fit(pts)
                rows.append((name, norm, region, r.slope, r.r2))
            except ValueError as exc:
                rows.append((name, norm, region, float("nan"), str(exc)))
    return samples, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--form", default="A")
    ap.add_argument("--csv", help="write all samples here")
    args = ap.parse_args()

    all_samples = []
    for name, lo, hi, n in STUDIES:
        samples, rows = study(name, lo, hi, n, args.form)
        all_samples += [(name, e) for e in samples]
        for name_, norm, region, slope, r2 in rows:
            r2s = f"{r2:.4f}" if isinstance(r2, float) else f"skipped ({r2})"
            print(f"{name_:36s} {norm:4s} {region:6s} slope={slope: .4f} r2={r2s}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["data", "t"] + [f"linf_{r}" for r in asy.REGIONS] + [f"h1_{r}" for r in asy.REGIONS])
            for name, e in all_samples:
                w.writerow([name, e.t] + [e.linf[r] for r in asy.REGIONS] + [e.h1[r] for r in asy.REGIONS])


if __name__ == "__main__":
    main()
