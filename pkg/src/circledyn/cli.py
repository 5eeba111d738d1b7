"""circledyn command line: analyze, classify, conjugate, model, render, orbit-rate.

Reports are CSV files written next to matplotlib PNG figures in --out.
Exit codes: 0 success, 2 validation failure, 3 numeric failure, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .circle_maps import CoveringMap, NumericalFailure, RationalMap
from .classify import NotInPetalError, check_M1, parabolic_orbit_rate, side_diameters
from .conjugacy import (
    MIN_SCALES,
    ConjugacyError,
    Conjugacy,
    TabulatedLift,
    ToleranceError,
    beurling_ahlfors_upper,
    distortion_profile,
    sample_plan,
)
from .geometry import GeometryError
from .mapspec import SpecError, load_map_spec, parse_angles, parse_complex
from .markov import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    ExpansivityError,
    PartitionError,
    UnresolvableError,
    expansivity_profile,
    is_primitive,
    validate_partition,
)
from .model_builder import ModelError, Prescription, build_model, build_neighborhoods, verify_model
from .render import RenderError, boundary_orbit, julia_backward, rasterize, viewport

log = logging.getLogger("circledyn")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_BUDGET = 0, 2, 3, 4
PREDICTION = {"Bounded": "QS", "Logarithmic": "David", "Faster": "none"}


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save_fig(fig, path):
    fig.savefig(path, dpi=100, metadata={"Software": None})
    _plt().close(fig)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])


def _range(text: str | None, default: tuple[int, int]) -> tuple[int, int]:
    if not text:
        return default
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return int(lo), int(hi)
        return default[0], int(text)
    except ValueError as exc:
        raise SpecError(f"bad range {text!r}, expected lo:hi") from exc


def _covering(spec) -> CoveringMap:
    f = load_map_spec(spec)
    if isinstance(f, RationalMap):
        raise SpecError("this command needs a circle covering, not a bare rational map")
    return f


def _partition(args, spec_attr="map", points_attr="points"):
    f = _covering(getattr(args, spec_attr))
    return validate_partition(f, parse_angles(getattr(args, points_attr)))


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    P = _partition(args)
    budget = args.budget or DEFAULT_BUDGET
    prim = is_primitive(P)
    prof = expansivity_profile(P, args.depth_n or 10, budget)
    m1 = check_M1(P, _range(args.depth, (8, 20)))
    summary = [
        ("points", " ".join(f"{x:.12g}" for x in P.points)),
        ("transition", json.dumps(P.transition.tolist())),
        ("primitive", prim.primitive),
        ("witness_power", prim.witness_power),
        ("expansivity", prof.verdict),
        ("M1", "pass" if m1.passed else "fail"),
    ]
    _write_csv(os.path.join(args.out, "analyze_summary.csv"), ["key", "value"], summary)
    _write_csv(os.path.join(args.out, "analyze_diameters.csv"), ["n", "max_diam"], prof.rows)
    _write_csv(os.path.join(args.out, "analyze_m1.csv"), ["point", "side", "verdict", "parameter", "fit_quality"],
               list(m1.rows()))
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    n, d = zip(*prof.rows)
    ax.semilogy(n, d, "o-")
    ax.set_xlabel("level n")
    ax.set_ylabel("max arc diameter")
    ax.set_title(prof.verdict)
    _save_fig(fig, os.path.join(args.out, "analyze_diameters.png"))
    for k, v in summary:
        print(f"{k}: {v}")
    return EXIT_OK


def cmd_classify(args) -> int:
    P = _partition(args)
    n_range = _range(args.depth, (8, 20))
    m1 = check_M1(P, n_range)
    _write_csv(os.path.join(args.out, "classify.csv"), ["point", "side", "verdict", "parameter", "fit_quality"],
               list(m1.rows()))
    rows = []
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    for a in P.points:
        for side in (1, -1):
            tab = side_diameters(P, a, side, n_range)
            rows.extend((float(a), "+" if side > 0 else "-", n, d1, d2) for n, d1, d2 in tab)
            if tab:
                ns, d1, _ = zip(*tab)
                ax.loglog(ns, d1, ".-", label=f"{a:.4g}{'+' if side > 0 else '-'}")
    ax.set_xlabel("level n")
    ax.set_ylabel("diameter of the arc at the point")
    ax.legend(fontsize=7)
    _save_fig(fig, os.path.join(args.out, "classify_diameters.png"))
    _write_csv(os.path.join(args.out, "classify_diameters.csv"), ["point", "side", "n", "diam_inner", "diam_outer"],
               rows)
    for r in m1.rows():
        print("{:.12g} {} {} {} {:.5f}".format(*r))
    return EXIT_OK if m1.passed else EXIT_NUMERIC


def cmd_conjugate(args) -> int:
    Pf = _partition(args)
    Pg = validate_partition(_covering(args.target), parse_angles(args.target_points or args.points))
    try:
        pairing = [int(x) for x in args.pairing.split(",")] if args.pairing else None
    except ValueError as exc:
        raise SpecError(f"bad pairing {args.pairing!r}") from exc
    lo, hi = _range(args.tgrid, (3, 18))
    if hi - lo + 1 < MIN_SCALES:
        raise SpecError(f"--tgrid needs at least {MIN_SCALES} scales, got {lo}:{hi}")
    C = Conjugacy(Pf, Pg, pairing)
    plan = sample_plan(C, n_uniform=args.samples or 512)
    prof = distortion_profile(C, range(lo, hi + 1), plan)
    _write_csv(os.path.join(args.out, "profile.csv"), ["j", "t", "rho_max", "argmax_angle", "class_running"],
               prof.rows)
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(prof.js, prof.rho, "o-")
    ax.set_xlabel("j (t = 2^-j)")
    ax.set_ylabel("scalewise distortion")
    ax.set_title(f"{prof.verdict} ({PREDICTION[prof.verdict]} predicted)")
    _save_fig(fig, os.path.join(args.out, "profile.png"))
    if args.extension_grid:
        n = args.extension_grid
        H = TabulatedLift(C)
        x = np.repeat((np.arange(n) + 0.5) / n, n)
        y = np.tile(np.geomspace(1e-3, 0.5, n), n)
        w = beurling_ahlfors_upper(H, x, y)
        _write_csv(os.path.join(args.out, "extension.csv"), ["x", "y", "u", "v"],
                   zip(x.tolist(), y.tolist(), w.real.tolist(), w.imag.tolist()))
    if prof.skipped:
        print(f"skipped samples: {prof.skipped}")
    print(f"verdict: {prof.verdict} ({PREDICTION[prof.verdict]} predicted)")
    return EXIT_OK


def _prescriptions(P, args) -> Prescription:
    kinds = {}
    for text, kind in ((args.parabolic, "Parabolic"), (args.hyperbolic, "Hyperbolic")):
        if text:
            for a in parse_angles(text):
                kinds[a] = kind
    return Prescription.from_angles(P, kinds)


def cmd_model(args) -> int:
    Pf = _partition(args)
    presc = _prescriptions(Pf, args)
    g, Pg = build_model(Pf, presc, args.multiplier)
    ns = build_neighborhoods(g, Pg, samples=args.samples or 10_000)
    rep = verify_model(g, Pg, presc, Pf=Pf, multiplier=args.multiplier, n_range=_range(args.depth, (8, 20)))
    with open(os.path.join(args.out, "model_map.json"), "w") as fh:
        json.dump(g.to_spec(), fh, indent=1)
    with open(os.path.join(args.out, "neighborhoods.json"), "w") as fh:
        json.dump([{"arc": e["arc"],
                    "lens_circles": [[[c.real, c.imag], r] for c, r in e["lens_circles"]],
                    "outer_circle": [[e["outer_circle"][0].real, e["outer_circle"][0].imag], e["outer_circle"][1]]}
                   for e in ns.export()], fh, indent=1)
    _write_csv(os.path.join(args.out, "model_report.csv"),
               ["point", "prescribed", "verdict", "lambda", "exponent", "ok"],
               [(p.point, p.prescribed, p.verdict, p.lam, p.exponent, p.ok) for p in rep.points])
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 5))
    th = np.linspace(0, 1, 400)
    ax.plot(np.cos(2 * np.pi * th), np.sin(2 * np.pi * th), "k", lw=0.5)
    for k in range(Pg.size):
        bd = ns.boundary_U(k, 400)
        ax.plot(bd.real, bd.imag, ".", ms=1)
    ax.set_aspect("equal")
    ax.set_title(f"U_k (margin {ns.margin})")
    _save_fig(fig, os.path.join(args.out, "neighborhoods.png"))
    print(f"derivative residual: {rep.derivative_residual:.3g}")
    print(f"neighborhoods: disjoint={ns.disjoint} contained={ns.contained}")
    for p in rep.points:
        print(f"{p.point:.12g} prescribed {p.prescribed} got {p.verdict} ok={p.ok}")
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def cmd_render(args) -> int:
    f = load_map_spec(args.map)
    R = f if isinstance(f, RationalMap) else f.rational()
    if R is None:
        raise SpecError("rendering needs a map with a rational extension")
    size = args.resolution
    on_circle = isinstance(f, CoveringMap)
    if args.mode == "julia_backward":
        cloud = julia_backward(R, args.samples or 1_000_000, seed=args.seed)
        center, half = viewport(cloud, circle=on_circle)
        img = rasterize(cloud, size, size, center, half)
        if args.dump_cloud:
            np.save(os.path.join(args.out, "cloud.npy"), cloud)
    else:
        center, half = (0j, 1.5) if on_circle else viewport(julia_backward(R, 100_000, seed=args.seed))
        img = boundary_orbit(R, size, size, center, half, iterations=args.iterations)
    path = os.path.join(args.out, f"{args.mode}.ppm")
    img.save(path)
    print(path)
    return EXIT_OK


def cmd_orbit_rate(args) -> int:
    R = load_map_spec(args.map)
    if not isinstance(R, RationalMap):
        R = R.rational()
    a = parse_complex(args.point)
    k_range = _range(args.krange, (1000, 100000))
    rate = parabolic_orbit_rate(R, a, parse_complex(args.start), k_range)
    _write_csv(os.path.join(args.out, "orbit_rate.csv"), ["k", "dist"], zip(rate.k.tolist(), rate.dist.tolist()))
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(rate.k, rate.dist, ".")
    ax.set_xlabel("k")
    ax.set_ylabel("|R^k(z) - a|")
    ax.set_title(f"slope {rate.exponent:.4f} ({rate.flag})")
    _save_fig(fig, os.path.join(args.out, "orbit_rate.png"))
    print(f"exponent: {rate.exponent:.6f} ({rate.flag})")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", help="level range lo:hi (or hi) for classification")
    common.add_argument("--tgrid", help="dyadic exponents lo:hi for t = 2^-j")
    common.add_argument("--samples", type=int, help="sample count (uniform angles, boundary samples or points)")
    common.add_argument("--budget", type=int, help="maximum number of arcs in a refinement")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="circledyn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="validate a partition and check its properties")
    a.add_argument("map", help="JSON map spec or path to one")
    a.add_argument("--points", required=True, help="partition points in turns, e.g. '0,1/3,2/3'")
    a.add_argument("--depth-n", type=int, help="deepest level for the expansivity profile")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", parents=[common], help="hyperbolic/parabolic verdict at each point")
    c.add_argument("map")
    c.add_argument("--points", required=True)
    c.set_defaults(func=cmd_classify)

    j = sub.add_parser("conjugate", parents=[common], help="distortion profile of the conjugacy f -> g")
    j.add_argument("map")
    j.add_argument("target")
    j.add_argument("--points", required=True)
    j.add_argument("--target-points", help="partition of g (default: same angles as f)")
    j.add_argument("--pairing", help="cyclic index shift, e.g. '1,2,0'")
    j.add_argument("--extension-grid", type=int, default=0, help="also dump an n x n extension grid")
    j.set_defaults(func=cmd_conjugate)

    m = sub.add_parser("model", parents=[common], help="piecewise-Moebius model with prescribed points")
    m.add_argument("map")
    m.add_argument("--points", required=True)
    m.add_argument("--parabolic", help="periodic points prescribed parabolic")
    m.add_argument("--hyperbolic", help="periodic points prescribed hyperbolic (the default)")
    m.add_argument("--multiplier", type=float, default=2.0)
    m.set_defaults(func=cmd_model)

    r = sub.add_parser("render", parents=[common], help="write a PPM image")
    r.add_argument("map")
    r.add_argument("--mode", choices=["julia_backward", "boundary_orbit"], default="julia_backward")
    r.add_argument("--resolution", type=int, default=800)
    r.add_argument("--iterations", type=int, default=1000)
    r.add_argument("--dump-cloud", action="store_true", help="also save the point cloud as cloud.npy")
    r.set_defaults(func=cmd_render)

    o = sub.add_parser("orbit-rate", parents=[common], help="power-law rate of an orbit into a parabolic point")
    o.add_argument("map")
    o.add_argument("--point", required=True, help="the parabolic fixed point, e.g. '0' or '1+0.5j'")
    o.add_argument("--start", required=True, help="starting point of the orbit")
    o.add_argument("--krange", help="fit range k0:k1")
    o.set_defaults(func=cmd_orbit_rate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    os.makedirs(args.out, exist_ok=True)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NumericalFailure, ToleranceError, ExpansivityError, UnresolvableError, NotInPetalError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpecError, PartitionError, ModelError, ConjugacyError, GeometryError, RenderError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
