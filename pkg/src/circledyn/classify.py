"""Numerical hyperbolic/parabolic classification of partition points.

A side of a partition point is judged from the chordal diameters of the two
F_n arcs next to it: geometric decay lambda^{-n} means hyperbolic, power-law
decay n^{-1/N} (inner arc) and n^{-1/N-1} (outer arc) means parabolic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .circle_maps import RationalMap
from .geometry import turns
from .markov import MarkovPartition, UnresolvableError, side_arcs

DEFAULT_RANGE = (8, 20)
MIN_DEPTHS = 6
WINDOW = 8
MIN_ARC = 1e-12


class NotInPetalError(ValueError):
    """The seed orbit does not approach the parabolic point monotonically."""


@dataclass
class EndpointClass:
    point: float
    side: int
    verdict: str  # "Hyperbolic", "Parabolic" or "Undetermined"
    fit_quality: float
    depth_range: tuple
    lam: float | None = None
    N: int | None = None
    exponent_fit: float | None = None
    exponent_outer: float | None = None
    shift: float | None = None

    @property
    def parameter(self):
        if self.verdict == "Hyperbolic":
            return self.lam
        if self.verdict == "Parabolic":
            return self.N
        return None

    @property
    def side_label(self) -> str:
        return "+" if self.side > 0 else "-"


@dataclass
class SymmetryReport:
    point: float
    plus: EndpointClass
    minus: EndpointClass

    @property
    def symmetric(self) -> bool:
        p, m = self.plus, self.minus
        if p.verdict != m.verdict or p.verdict == "Undetermined":
            return False
        if p.verdict == "Hyperbolic":
            return abs(p.lam - m.lam) / p.lam < 0.05
        return p.N == m.N

    @property
    def kind(self) -> str:
        return self.plus.verdict if self.symmetric else "Asymmetric"

    @property
    def lam(self) -> float | None:
        if self.symmetric and self.plus.verdict == "Hyperbolic":
            return 0.5 * (self.plus.lam + self.minus.lam)
        return None

    @property
    def N(self) -> int | None:
        if self.symmetric and self.plus.verdict == "Parabolic":
            return self.plus.N
        return None

    @property
    def sides(self):
        return (self.plus, self.minus)


def side_diameters(P: MarkovPartition, a, side: int, n_range=DEFAULT_RANGE,
                   min_length: float = MIN_ARC) -> list[tuple[int, float, float]]:
    """(n, diam I_1, diam I_2) for n in the inclusive range; I_1 touches a.

    Strongly repelling points exhaust double precision before the end of the
    range; the window then slides down to the deepest WINDOW resolvable depths.
    """
    lo, hi = n_range
    try:
        arcs = side_arcs(P, a, side, hi, min_length=min_length)
    except UnresolvableError:
        arcs = []
    deepest = len(arcs)
    if deepest < hi and deepest - lo + 1 < WINDOW:
        lo = max(1, deepest - WINDOW + 1)
    return [(n, arcs[n - 1][0].diam, arcs[n - 1][1].diam) for n in range(lo, min(hi, deepest) + 1)]


def _linfit(x, y):
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), r2, float(np.sum(resid**2))


def _shifted_power_fit(n, y1, y2):
    """Fit log d_i = c_i - alpha_i log(n + s) with one shift s shared by both arcs.

    The level index is only defined up to a bounded offset, and the offset
    dominates the finite-depth slope; fitting it removes that bias.
    """

    def cost(s):
        x = np.log(n + s)
        return _linfit(x, y1)[3] + _linfit(x, y2)[3]

    res = minimize_scalar(cost, bounds=(1.0 - n.min() + 1e-3, 3.0 * n.max()), method="bounded",
                          options={"xatol": 1e-6})
    s = float(res.x)
    x = np.log(n + s)
    f1, f2 = _linfit(x, y1), _linfit(x, y2)
    return s, f1, f2


def classify_from_diameters(rows, point: float = 0.0, side: int = 1) -> EndpointClass:
    """Verdict from a (n, diam I_1, diam I_2) table."""
    rows = np.asarray(rows, dtype=float)
    depth_range = (int(rows[0, 0]), int(rows[-1, 0])) if len(rows) else (0, 0)
    if len(rows) < MIN_DEPTHS or np.any(rows[:, 1:] <= 0):
        return EndpointClass(point, side, "Undetermined", 0.0, depth_range)
    n, y1, y2 = rows[:, 0], np.log(rows[:, 1]), np.log(rows[:, 2])
    g1, g2 = _linfit(n, y1), _linfit(n, y2)
    s, p1, p2 = _shifted_power_fit(n, y1, y2)
    lam1, lam2 = math.exp(-g1[0]), math.exp(-g2[0])
    geo_quality = min(g1[2], g2[2])
    geo_resid = g1[3] + g2[3]
    pow_resid = p1[3] + p2[3]
    if (
        geo_quality >= 0.995
        and min(lam1, lam2) > 1.02
        and abs(lam1 - lam2) / max(lam1, lam2) < 0.05
        and geo_resid <= pow_resid
    ):
        lam = math.exp(-0.5 * (g1[0] + g2[0]))
        return EndpointClass(point, side, "Hyperbolic", geo_quality, depth_range, lam=lam)
    e1, e2 = p1[0], p2[0]
    if e1 < 0:
        N = max(1, round(-1.0 / e1))
        quality = min(p1[2], p2[2])
        if abs(e1 + 1.0 / N) <= 0.15 and abs(e2 + 1.0 / N + 1.0) <= 0.15 and quality >= 0.99:
            return EndpointClass(point, side, "Parabolic", quality, depth_range, N=N, exponent_fit=e1,
                                 exponent_outer=e2, shift=s)
    return EndpointClass(point, side, "Undetermined", max(geo_quality, min(p1[2], p2[2])), depth_range,
                         exponent_fit=e1, exponent_outer=e2, shift=s)


def classify_endpoint(P: MarkovPartition, a, side: int, n_range=DEFAULT_RANGE) -> EndpointClass:
    rows = side_diameters(P, a, side, n_range)
    return classify_from_diameters(rows, turns(a), side)


def classify_point(P: MarkovPartition, a, n_range=DEFAULT_RANGE) -> SymmetryReport:
    return SymmetryReport(turns(a), classify_endpoint(P, a, 1, n_range), classify_endpoint(P, a, -1, n_range))


@dataclass
class M1Report:
    points: list  # SymmetryReport per partition point

    @property
    def passed(self) -> bool:
        return all(e.verdict != "Undetermined" for rep in self.points for e in rep.sides)

    def rows(self):
        for rep in self.points:
            for e in rep.sides:
                yield (e.point, e.side_label, e.verdict, e.parameter, e.fit_quality)


def check_M1(P: MarkovPartition, n_range=DEFAULT_RANGE) -> M1Report:
    return M1Report([classify_point(P, a, n_range) for a in P.points])


# ---------------------------------------------------------------------------
# Correspondence between two classified partitions


@dataclass
class PairCase:
    a: float
    b: float
    case: str  # "H/P->H/P", "H->P" or "mismatch"
    mu: float | None = None


@dataclass
class CorrespondenceReport:
    pairs: list
    analytic_assumption: bool = True

    @property
    def prediction(self) -> str:
        cases = {p.case for p in self.pairs}
        if cases == {"H/P->H/P"}:
            return "QS"
        if "mismatch" not in cases and "H->P" in cases:
            return "David"
        return "Unknown"


def _side_mu(ea: EndpointClass, eb: EndpointClass) -> float | None:
    if ea.verdict == eb.verdict == "Hyperbolic":
        return math.log(eb.lam) / math.log(ea.lam)
    if ea.verdict == eb.verdict == "Parabolic":
        return ea.N / eb.N
    return None


def correspondence_check(report_f: list, report_g: list, pairing=None, tol: float = 0.05) -> CorrespondenceReport:
    """Match classified points a_k of f with b_{pairing[k]} of g."""
    if pairing is None:
        pairing = list(range(len(report_f)))
    pairs = []
    for k, j in enumerate(pairing):
        ra, rb = report_f[k], report_g[j]
        mus = [_side_mu(ea, eb) for ea, eb in zip(ra.sides, rb.sides)]
        if all(m is not None for m in mus) and abs(mus[0] - mus[1]) <= tol * max(mus):
            pairs.append(PairCase(ra.point, rb.point, "H/P->H/P", 0.5 * (mus[0] + mus[1])))
        elif ra.kind == "Hyperbolic" and rb.kind == "Parabolic":
            pairs.append(PairCase(ra.point, rb.point, "H->P"))
        else:
            pairs.append(PairCase(ra.point, rb.point, "mismatch"))
    return CorrespondenceReport(pairs)


# ---------------------------------------------------------------------------
# Orbit rate near a parabolic fixed point


@dataclass
class OrbitRate:
    exponent: float
    flag: str  # "power-law" or "non-parabolic decay"
    k: np.ndarray = field(repr=False)
    dist: np.ndarray = field(repr=False)


def attracting_directions(R: RationalMap, a: complex) -> list[complex]:
    """Unit attracting directions v at a parabolic point with R(z) = z + A (z-a)^nu + ..."""
    coeffs = np.polysub(R.num, np.polymul([1, 0], R.den)) if R.den.size == 1 else None
    if coeffs is None:
        raise ValueError("attracting directions are only computed for polynomials")
    # Taylor coefficients of R(z) - z at a
    coeffs = np.asarray(coeffs, dtype=complex) / R.den[0]
    taylor = []
    c = coeffs.copy()
    k = 0
    while c.size:
        taylor.append(np.polyval(c, a) / math.factorial(k))
        c = np.polyder(c) if c.size > 1 else np.array([])
        k += 1
    nz = [i for i, t in enumerate(taylor) if abs(t) > 1e-10 and i >= 2]
    if not nz or abs(taylor[0]) > 1e-10 or abs(taylor[1]) > 1e-10:
        raise ValueError("point is not a parabolic fixed point with multiplier 1")
    nu = nz[0]
    A = taylor[nu]
    # A v^{nu-1} negative real
    base = (-1.0 / A) ** (1.0 / (nu - 1))
    base /= abs(base)
    return [base * np.exp(2j * math.pi * m / (nu - 1)) for m in range(nu - 1)]


def parabolic_orbit_rate(R, a: complex, seed: complex, k_range=(1000, 100000)) -> OrbitRate:
    """Log-log slope of |R^k(seed) - a| against k over k_range.

    ``R`` is a RationalMap or any callable on complex numbers.
    """
    if isinstance(R, RationalMap):
        num, den = R.num.tolist(), R.den.tolist()

        def step(z):
            p = 0j
            for c in num:
                p = p * z + c
            q = 0j
            for c in den:
                q = q * z + c
            return p / q
    else:
        step = R
    k0, k1 = k_range
    z = complex(seed)
    d_prev = abs(z - a)
    ks, ds = [], []
    samples = set(np.unique(np.geomspace(k0, k1, 200).astype(int)).tolist())
    for k in range(1, k1 + 1):
        z = step(z)
        d = abs(z - a)
        if not math.isfinite(d):
            raise NotInPetalError("orbit diverged")
        if k <= 100 and d > d_prev:
            raise NotInPetalError(f"|R^k(seed) - a| increased at k={k}; seed not in an attracting petal")
        d_prev = d
        if k in samples:
            ks.append(k)
            ds.append(d)
    ks, ds = np.array(ks, dtype=float), np.array(ds)
    if np.any(ds <= np.finfo(float).tiny):
        return OrbitRate(float("nan"), "non-parabolic decay", ks, ds)
    x, y = np.log(ks), np.log(ds)
    slope = _linfit(x, y)[0]
    half = x.size // 2
    drift = abs(_linfit(x[:half], y[:half])[0] - _linfit(x[half:], y[half:])[0])
    flag = "power-law" if drift < 0.1 else "non-parabolic decay"
    return OrbitRate(slope, flag, ks, ds)
