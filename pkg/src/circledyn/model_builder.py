"""Piecewise-Moebius models with prescribed behaviour at periodic points.

Given a Markov partition of f, the model g has the same combinatorics on the
equally spaced points b_k = k/(r+1), and on each arc B_k it is a disk
automorphism.  At a periodic b the adjacent pieces have derivative 2
(hyperbolic) or 1 (parabolic; the piece is then a parabolic transformation
pushing the arc away from b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle_maps import PiecewiseMoebius
from .classify import classify_point
from .geometry import disk_moebius_from_constraints, orthogonal_disk, to_complex, wrap
from .markov import MarkovPartition, expansivity_profile, is_primitive, validate_partition

HYPERBOLIC = "Hyperbolic"
PARABOLIC = "Parabolic"
MARGIN = 0.95
RETRY_MARGIN = 0.85


class ModelError(ValueError):
    """The partition or the prescription violates the construction's hypotheses."""


def periods(P: MarkovPartition) -> list[int | None]:
    """Period of each partition point under sigma, None for strictly preperiodic points."""
    out = []
    for k in range(P.size):
        j, q = int(P.sigma[k]), 1
        while j != k and q <= P.size:
            j, q = int(P.sigma[j]), q + 1
        out.append(q if j == k else None)
    return out


@dataclass
class Prescription:
    """Point index -> "Hyperbolic" | "Parabolic"; periodic points left out default to Hyperbolic."""

    kinds: dict = field(default_factory=dict)

    @classmethod
    def from_angles(cls, P: MarkovPartition, kinds: dict) -> "Prescription":
        return cls({P.point_index(a): v for a, v in kinds.items()})

    def resolve(self, P: MarkovPartition) -> dict[int, str]:
        per = periods(P)
        out = {}
        for k, v in self.kinds.items():
            if v not in (HYPERBOLIC, PARABOLIC):
                raise ModelError(f"unknown prescription {v!r}")
            if not 0 <= k < P.size or per[k] is None:
                raise ModelError(f"point {k} is not periodic and cannot carry a prescription")
            out[k] = v
        for k, q in enumerate(per):
            if q is not None:
                out.setdefault(k, HYPERBOLIC)
        # g^q is the same map at every point of a cycle, so the kind must be constant on it
        for k in out:
            if out[k] != out[int(P.sigma[k])]:
                raise ModelError(f"prescription is not constant along the cycle of point {k}")
        return out


def _check_hypotheses(P: MarkovPartition):
    if P.size < 3:
        raise ModelError("the construction needs at least three partition points")
    if P.map.orientation != 1:
        raise ModelError("models are built for orientation-preserving maps only")
    per = periods(P)
    for k in range(P.size):
        if P.turning[k] >= 1 - 1e-12:
            raise ModelError(f"f is not injective on arc {k}")
        if per[k] is not None and per[(k + 1) % P.size] is not None:
            raise ModelError(f"both endpoints of arc {k} are periodic")


def build_model(Pf: MarkovPartition, prescriptions: Prescription | dict | None = None,
                multiplier: float = 2.0) -> tuple[PiecewiseMoebius, MarkovPartition]:
    """Model map g and its partition on b_k = k/(r+1)."""
    if not multiplier > 1:
        raise ModelError("the hyperbolic multiplier must exceed 1")
    _check_hypotheses(Pf)
    if not isinstance(prescriptions, Prescription):
        prescriptions = Prescription(dict(prescriptions or {}))
    kinds = prescriptions.resolve(Pf)
    size = Pf.size
    b = np.arange(size) / size
    deriv = {k: (1.0 if v == PARABOLIC else multiplier) for k, v in kinds.items()}
    pieces = []
    for k in range(size):
        k1 = (k + 1) % size
        p, q = b[k], b[k1]
        P, Q = b[Pf.sigma[k]], b[Pf.sigma[k1]]
        if k in deriv:
            M = disk_moebius_from_constraints(p, q, P, Q, deriv[k])
        elif k1 in deriv:
            M = disk_moebius_from_constraints(q, p, Q, P, deriv[k1])
        else:
            M = disk_moebius_from_constraints(p, q, P, Q)
        pieces.append(M)
    g = PiecewiseMoebius(b, pieces)
    Pg = validate_partition(g, b)
    if not np.array_equal(Pg.transition, Pf.transition):
        raise ModelError("model transition matrix differs from the input")
    return g, Pg


def derivative_residuals(g: PiecewiseMoebius, Pg: MarkovPartition, kinds: dict, multiplier: float = 2.0) -> dict:
    """|M'(b)| minus its prescribed value, for both pieces at each prescribed point."""
    out = {}
    size = Pg.size
    for k, v in kinds.items():
        target = 1.0 if v == PARABOLIC else multiplier
        right = float(g.pieces[k].circle_derivative(g.points[k]))
        left = float(g.pieces[(k - 1) % size].circle_derivative(g.points[k]))
        out[k] = (right - target, left - target)
    return out


def continuity_residuals(g: PiecewiseMoebius) -> np.ndarray:
    """|M_{k-1}(b_k) - M_k(b_k)| at every break point."""
    z = to_complex(g.points)
    n = len(g.pieces)
    return np.array([abs(g.pieces[k - 1](z[k]) - g.pieces[k](z[k])) for k in range(n)])


def repels(g: PiecewiseMoebius, Pg: MarkovPartition, k: int, side: int, start: float = 1e-3,
           steps: int = 50) -> bool:
    """Iterates of g^q from b_k + side*start move strictly away from the period-q point b_k."""
    q = periods(Pg)[k]
    if q is None:
        raise ModelError(f"point {k} is not periodic")
    base = float(g.points[k])
    x = base + side * start
    prev = start
    for _ in range(steps):
        for _ in range(q):
            x = float(g.lift(x))
        x = base + ((x - base + 0.5) % 1.0) - 0.5
        d = side * (x - base)
        if d <= prev:
            return False
        prev = d
        if d > 0.25:
            break
    return True


# ---------------------------------------------------------------------------
# Neighborhoods for the planar extension


@dataclass(frozen=True)
class Lens:
    """Points seen from the arc [p, q] under angle > pi - theta: bounded by two
    circles through the endpoints meeting the unit circle at angle theta."""

    p: float
    q: float
    theta: float

    def _phi(self, z):
        P, Q = to_complex(self.p), to_complex(self.q)
        mid = to_complex(self.p + wrap(self.q - self.p) / 2)
        return (np.asarray(z) - P) / (np.asarray(z) - Q) * (mid - Q) / (mid - P)

    def contains(self, z):
        return np.abs(np.angle(self._phi(z))) < self.theta

    def boundary(self, n: int) -> np.ndarray:
        """n points on each bounding circle arc, endpoints excluded."""
        P, Q = to_complex(self.p), to_complex(self.q)
        mid = to_complex(self.p + wrap(self.q - self.p) / 2)
        c = (mid - P) / (mid - Q)
        s = np.geomspace(1e-6, 1e6, n)
        pts = []
        for ang in (self.theta, -self.theta):
            w = s * np.exp(1j * ang) * c  # phi^{-1} of the ray at angle ang
            pts.append((w * Q - P) / (w - 1))
        return np.concatenate(pts)

    def circles(self) -> list[tuple[complex, float]]:
        """(center, radius) of the two bounding circles."""
        P, Q = to_complex(self.p), to_complex(self.q)
        z = self.boundary(3)
        return [_circle_through(P, Q, z[1]), _circle_through(P, Q, z[4])]


@dataclass
class NeighborhoodSystem:
    """U_k = L_k cap M_k^{-1}(D), V_k = M_k(L_k) cap D.

    L_k is the lens of B_k at angle margin * 90 degrees and D the disk
    |z| < R around all orthogonal disks.  M_k maps U_k onto V_k by definition.
    """

    g: PiecewiseMoebius
    P: MarkovPartition
    margin: float
    radius: float
    lenses: list
    image_lenses: list
    disjoint: bool = False
    contained: bool = False
    worst: tuple = ()

    @property
    def passed(self) -> bool:
        return self.disjoint and self.contained

    def in_U(self, k: int, z):
        M = self.g.pieces[k]
        return self.lenses[k].contains(z) & (np.abs(M(z)) < self.radius)

    def in_V(self, k: int, z):
        return self.image_lenses[k].contains(z) & (np.abs(z) < self.radius)

    def boundary_U(self, k: int, n: int) -> np.ndarray:
        """About n points of the boundary of U_k."""
        L, M = self.lenses[k], self.g.pieces[k]
        a = L.boundary(n // 2)
        a = a[np.abs(M(a)) <= self.radius]
        circle = M.inverse()(self.radius * to_complex(np.arange(n // 2) / (n // 2)))
        circle = circle[L.contains(circle)]
        return np.concatenate([a, circle])

    def export(self) -> list[dict]:
        out = []
        for k, L in enumerate(self.lenses):
            Minv = self.g.pieces[k].inverse()
            # image of |z| = R under M_k^{-1}, from three points
            z = Minv(self.radius * to_complex(np.array([0.0, 1 / 3, 2 / 3])))
            out.append({
                "arc": k,
                "lens_circles": [(complex(c), float(r)) for c, r in L.circles()],
                "outer_circle": _circle_through(*z),
            })
        return out


def _circle_through(a, b, c) -> tuple[complex, float]:
    w = (c - a) / (b - a)
    center = (b - a) * (w - abs(w) ** 2) / (2j * w.imag) + a
    return complex(center), float(abs(a - center))


def _verify(ns: NeighborhoodSystem, samples: int) -> NeighborhoodSystem:
    size = ns.P.size
    bd = [ns.boundary_U(k, samples) for k in range(size)]
    worst_dis, worst_con = 0, 0
    for k in range(size):
        for j in range(size):
            if j != k:
                worst_dis += int(np.count_nonzero(ns.in_U(k, bd[j])))
        for j in np.flatnonzero(ns.P.transition[k]):
            worst_con += int(np.count_nonzero(~ns.in_V(k, bd[j])))
    ns.disjoint = worst_dis == 0
    ns.contained = worst_con == 0
    ns.worst = (worst_dis, worst_con)
    return ns


def _system(g: PiecewiseMoebius, Pg: MarkovPartition, margin: float) -> NeighborhoodSystem:
    size = Pg.size
    theta = margin * math.pi / 2
    far = []
    for k in range(size):
        D = orthogonal_disk(g.points[k], g.points[(k + 1) % size])
        far.append(abs(D.center) + D.radius)
    radius = 1 + (max(far) - 1) / margin
    lenses = [Lens(g.points[k], g.points[(k + 1) % size], theta) for k in range(size)]
    images = [Lens(g.points[Pg.sigma[k]], g.points[Pg.sigma[(k + 1) % size]], theta) for k in range(size)]
    return NeighborhoodSystem(g, Pg, margin, radius, lenses, images)


def build_neighborhoods(g: PiecewiseMoebius, Pg: MarkovPartition, margin: float = MARGIN,
                        samples: int = 10_000) -> NeighborhoodSystem:
    """Disjointness and U_j in V_k checked on boundary samples; retried once at a tighter margin."""
    if np.any(Pg.lengths >= 0.5):
        raise ModelError("every arc must be shorter than half a turn")
    ns = _verify(_system(g, Pg, margin), samples)
    if not ns.passed:
        ns = _verify(_system(g, Pg, RETRY_MARGIN), samples)
        if not ns.passed:
            raise ModelError(f"neighborhood checks failed at margin {RETRY_MARGIN}: {ns.worst}")
    return ns


# ---------------------------------------------------------------------------
# Verification


@dataclass
class PointCheck:
    index: int
    point: float
    prescribed: str
    verdict: str
    lam: float | None
    exponent: float | None
    ok: bool


@dataclass
class ModelReport:
    transition_preserved: bool
    primitive: bool
    expansivity: str
    derivative_residual: float
    points: list

    @property
    def passed(self) -> bool:
        return (self.transition_preserved and self.primitive and self.expansivity.startswith("expansive")
                and all(p.ok for p in self.points))

    @property
    def mismatches(self) -> list:
        return [p for p in self.points if not p.ok]


def verify_model(g: PiecewiseMoebius, Pg: MarkovPartition, prescriptions: Prescription | dict,
                 Pf: MarkovPartition | None = None, multiplier: float = 2.0, n_range=(8, 20)) -> ModelReport:
    """Re-validate the model and compare classified verdicts with the prescription."""
    if not isinstance(prescriptions, Prescription):
        prescriptions = Prescription(dict(prescriptions))
    P = validate_partition(g, g.points)
    kinds = prescriptions.resolve(P)
    transition_ok = Pf is None or np.array_equal(P.transition, Pf.transition)
    res = derivative_residuals(g, P, kinds, multiplier)
    worst = max((abs(x) for pair in res.values() for x in pair), default=0.0)
    per = periods(P)
    checks = []
    for k in sorted(kinds):
        want = kinds[k]
        rep = classify_point(P, P.points[k], n_range)
        lam = rep.lam
        exps = [e.exponent_fit for e in rep.sides]
        if want == HYPERBOLIC:
            ok = rep.kind == HYPERBOLIC and abs(lam - multiplier ** per[k]) <= 0.05 * multiplier ** per[k]
            exponent = None
        else:
            ok = rep.kind == PARABOLIC and all(e is not None and abs(e + 1) <= 0.2 for e in exps)
            exponent = float(np.mean(exps)) if all(e is not None for e in exps) else None
        checks.append(PointCheck(k, float(P.points[k]), want, rep.kind, lam, exponent, ok))
    return ModelReport(
        transition_preserved=transition_ok,
        primitive=is_primitive(P).primitive,
        expansivity=expansivity_profile(P, 10).verdict,
        derivative_residual=worst,
        points=checks,
    )


__all__ = [
    "HYPERBOLIC",
    "PARABOLIC",
    "Lens",
    "ModelError",
    "ModelReport",
    "NeighborhoodSystem",
    "Prescription",
    "build_model",
    "build_neighborhoods",
    "continuity_residuals",
    "derivative_residuals",
    "periods",
    "repels",
    "verify_model",
]
