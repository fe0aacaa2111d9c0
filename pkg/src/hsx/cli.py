"""Command-line front end: ``hsx {validate,slice,rates,pointwise,verify}``.

Exit codes: 0 ok, 1 invariant or validation failure, 2 usage error, 3 I/O error.
Tables go out as CSV with a leading provenance comment; reports as JSON.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import characteristics as ch
from . import solution as sol
from . import verify as ver
from .initial_data import DataError, EquationForm, load_json, parse_example
from .measure import support, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
DEFAULT_ALPHAS = (-4.0, -2.0, 0.0, 1.0, 5.0, 8.0)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    example: str | None = None
    form: str = "A"
    t: list = field(default_factory=list)
    t_geom: tuple | None = None
    x: list = field(default_factory=lambda: [0.0])
    region: str = "all"
    theta: float | None = None
    out: str | None = None
    quad: int = 32
    seed: int = 0
    fuzz: int = 200
    characteristics: bool = False
    alphas: list = field(default_factory=lambda: list(DEFAULT_ALPHAS))

    def times(self) -> list:
        if self.t_geom is not None:
            lo, hi, n = self.t_geom
            return [float(v) for v in np.geomspace(lo, hi, n)]
        return list(self.t)

    def digest(self) -> str:
        """Hash of everything that affects the numbers; the output path does not."""
        cfg = dataclasses.asdict(self)
        cfg.pop("out")
        blob = json.dumps(cfg, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _geom(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected MIN:MAX:N")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad geometric grid {text!r}") from None
    if not (lo > 0 and hi > lo and n >= 3):
        raise argparse.ArgumentTypeError("geometric grid needs 0 < MIN < MAX and N >= 3")
    return lo, hi, n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", help="initial-data JSON document")
    src.add_argument("--example", help="builtin: compact | dirac:k,l,x0 | kink:m | sine:a,R,n | const:c")
    common.add_argument("--form", default="A", choices=["A", "B", "a", "b"])
    common.add_argument("--t", type=_floats, default=[], help="comma-separated times")
    common.add_argument("--t-geom", type=_geom, help="geometric time grid MIN:MAX:N")
    common.add_argument("--x", type=_floats, default=[0.0], help="comma-separated positions")
    common.add_argument("--region", default="all", choices=asy.REGIONS)
    common.add_argument("--theta", type=float)
    common.add_argument("--out")
    common.add_argument("--quad", type=int, default=32, help="Gauss-Legendre nodes per direction")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="hsx", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hsx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check initial data and print its summary")
    sp = sub.add_parser("slice", parents=[common], help="CSV of u(., t) and mu(t)")
    sp.add_argument("--characteristics", action="store_true", help="emit (alpha, t, y) triples instead")
    sp.add_argument("--alphas", type=_floats, default=list(DEFAULT_ALPHAS))
    sub.add_parser("rates", parents=[common], help="error norms on a geometric grid and fitted exponents")
    sub.add_parser("pointwise", parents=[common], help="predicted vs measured large-time limits")
    vp = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    vp.add_argument("--fuzz", type=int, default=200, help="number of random data sets")
    return p


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(
        command=ns.command, input=ns.input, example=ns.example, form=ns.form.upper(), t=list(ns.t),
        t_geom=ns.t_geom, x=list(ns.x), region=ns.region, theta=ns.theta, out=ns.out, quad=ns.quad,
        seed=ns.seed,
    )
    if ns.command == "slice":
        cfg.characteristics = ns.characteristics
        cfg.alphas = list(ns.alphas)
    if ns.command == "verify":
        cfg.fuzz = ns.fuzz
    if cfg.t and cfg.t_geom:
        raise UsageError("give either --t or --t-geom, not both")
    if ns.command != "verify" and not (cfg.input or cfg.example):
        raise UsageError("one of --input or --example is required")
    return cfg


def load_data(cfg: RunConfig):
    if cfg.input:
        return load_json(cfg.input)
    return parse_example(cfg.example)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HSX_THREADS", "1")))
    except ValueError:
        return 1


def _num(v) -> str:
    return repr(float(v))


def _provenance(cfg: RunConfig) -> str:
    return f"# hsx {cfg.command} config={cfg.digest()} version={__version__}"


class _Sink:
    """Collects text and writes it to ``path`` (or stdout) in one go."""

    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def write(self, text):
        self.buf.write(text)

    def close(self):
        text = self.buf.getvalue()
        if self.path is None:
            sys.stdout.write(text)
        else:
            Path(self.path).write_text(text, encoding="utf-8")


def cmd_validate(cfg: RunConfig) -> int:
    d = load_data(cfg)
    msg = validate(d.mu)
    if msg is not None:
        print(f"FAIL measure: {msg}")
        return EXIT_FAIL
    sup = support(d.mu)
    lo, hi = (None, None) if sup is None else sup
    print("ok")
    print(f"name={d.name}")
    print(f"mass={_num(d.mass)}")
    print(f"support_left={lo}")
    print(f"support_right={hi}")
    print(f"u_minus_inf={_num(d.u.left_value)}")
    print(f"u_plus_inf={_num(d.u.right_value)}")
    print(f"blowup_times={','.join(_num(t) for t in ch.blowup_times(d))}")
    if d.approximate:
        print(f"approximate: truncated at radius {d.truncation_radius}")
    return EXIT_OK


def _slice_rows(s):
    rows = []
    dens = np.append(s.mu.density_values, 0.0) if len(s.u.x) > 1 else np.zeros(1)
    for x, u, rho in zip(s.u.x, s.u.u, dens):
        rows.append((x, 0, _num(x), _num(u), _num(rho), ""))
    for x, m in s.mu.atoms:
        rows.append((x, 1, _num(x), _num(s.u(x)), "", _num(m)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return [r[2:] for r in rows]


def cmd_slice(cfg: RunConfig) -> int:
    d = load_data(cfg)
    times = cfg.times()
    form = EquationForm.parse(cfg.form)
    out = _Sink(cfg.out)
    out.write(_provenance(cfg) + "\n")
    if cfg.characteristics:
        if not times:
            raise UsageError("--characteristics needs --t or --t-geom")
        out.write("alpha,t,y\n")
        for a in cfg.alphas:
            for t in times:
                out.write(f"{_num(a)},{_num(t)},{_num(ch.y(d, a, t, form))}\n")
        out.close()
        return EXIT_OK
    if len(times) != 1:
        raise UsageError("slice needs exactly one time (--t V)")
    t = times[0]
    s = sol.slice(d, t, form)
    out.write("x,u,density,atom_mass\n")
    for row in _slice_rows(s):
        out.write(",".join(row) + "\n")
    out.write(f"# singular_mass={_num(s.singular_mass())}\n")
    out.close()
    return EXIT_OK


RATE_COLUMNS = [f"linf_{r}" for r in asy.REGIONS] + [f"h1_{r}" for r in asy.REGIONS]


def cmd_rates(cfg: RunConfig) -> int:
    if cfg.t_geom is None:
        raise UsageError("rates needs a geometric grid (--t-geom MIN:MAX:N)")
    d = load_data(cfg)
    form = EquationForm.parse(cfg.form)
    times = cfg.times()
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        samples = list(pool.map(lambda t: asy.error_sample(d, t, form), times))

    out = _Sink(cfg.out)
    out.write(_provenance(cfg) + "\n")
    out.write("t," + ",".join(RATE_COLUMNS) + ",singular_mass\n")
    table = {c: [] for c in RATE_COLUMNS}
    for e in samples:
        vals = [e.linf[r] for r in asy.REGIONS] + [e.h1[r] for r in asy.REGIONS]
        for c, v in zip(RATE_COLUMNS, vals):
            table[c].append((e.t, v))
        out.write(",".join(_num(v) for v in [e.t, *vals, e.singular_mass]) + "\n")
    out.close()

    fits = {}
    for c, pts in table.items():
        try:
            r = asy.rate_fit(pts)
            fits[c] = {"slope": r.slope, "intercept": r.intercept, "r2": r.r2, "n": len(r.samples)}
        except ValueError as exc:
            fits[c] = {"skipped": str(exc)}
    report = {"command": "rates", "config": cfg.digest(), "version": __version__, "data": d.name,
              "form": form.value, "fits": fits}
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).with_suffix(".json").write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_pointwise(cfg: RunConfig) -> int:
    d = load_data(cfg)
    form = EquationForm.parse(cfg.form)
    times = cfg.times()
    if not times:
        raise UsageError("pointwise needs --t or --t-geom")
    pred = asy.pointwise_prediction(d, cfg.x[0], form, theta=cfg.theta)
    if pred.case == "inconclusive":
        print(f"warning: tail classification inconclusive ({pred.notes})", file=sys.stderr)
    exponent = pred.exponent or 0.0
    target = pred.limit if pred.limit is not None else pred.coefficient
    traj, gaps = {}, {}
    for x in cfg.x:
        tr = asy.trajectory(d, x, times, form, exponent)
        traj[_num(x)] = tr
        gaps[_num(x)] = None if target is None else abs(tr[-1][1] - target)
    report = {
        "command": "pointwise", "config": cfg.digest(), "version": __version__, "data": d.name,
        "form": form.value, "prediction": dataclasses.asdict(pred), "measured": traj,
        "final_gap": gaps,
        "agreement": None if target is None else all(g <= 1e-2 for g in gaps.values()),
    }
    out = _Sink(cfg.out)
    out.write(json.dumps(report, indent=1, sort_keys=True) + "\n")
    out.close()
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    checks = ver.run(seed=cfg.seed, n_fuzz=cfg.fuzz, quad=max(cfg.quad, 64))
    failed = [c for c in checks if not c.ok]
    for c in failed:
        print(c.line())
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "slice": cmd_slice,
    "rates": cmd_rates,
    "pointwise": cmd_pointwise,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        name = getattr(exc, "filename", None) or ""
        print(f"I/O error: {name}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
