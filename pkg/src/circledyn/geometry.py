"""Circle geometry in turn coordinates: points, oriented arcs, Moebius maps
and circles orthogonal to the unit circle.

Angles are stored in turns (1 turn = 2*pi radians) so that dyadic partition
points of z -> z**d stay exactly representable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
POINT_TOL = 1e-14


class GeometryError(ValueError):
    """Degenerate or infeasible geometric request."""


def wrap(x):
    """Reduce turns to [0, 1); works on scalars and arrays."""
    r = np.mod(x, 1.0)
    # np.mod can return 1.0 for tiny negative inputs
    if np.ndim(r) == 0:
        return 0.0 if r >= 1.0 else float(r)
    r[r >= 1.0] = 0.0
    return r


def circle_dist(x, y):
    """Distance between angles along the circle, in turns (<= 1/2)."""
    d = np.mod(np.asarray(x) - np.asarray(y), 1.0)
    return np.minimum(d, 1.0 - d)


def to_complex(x):
    return np.exp(1j * TWO_PI * np.asarray(x, dtype=float))


def to_turns(z):
    return wrap(np.angle(z) / TWO_PI)


def chord(length):
    """Chordal diameter of an arc with the given length in turns."""
    length = np.asarray(length, dtype=float)
    return np.where(length <= 0.5, 2.0 * np.sin(np.pi * np.minimum(length, 0.5)), 2.0)


@dataclass(frozen=True, eq=False)
class CirclePoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap(float(self.angle)))

    @property
    def z(self) -> complex:
        return cmath.exp(1j * TWO_PI * self.angle)

    def __eq__(self, other):
        if isinstance(other, CirclePoint):
            other = other.angle
        if not isinstance(other, (int, float, np.floating)):
            return NotImplemented
        return float(circle_dist(self.angle, other)) <= POINT_TOL

    __hash__ = None

    def __float__(self):
        return self.angle

    def __repr__(self):
        return f"CirclePoint({self.angle!r})"


def turns(x) -> float:
    """Accept a CirclePoint or a float and return the angle in [0, 1)."""
    if isinstance(x, CirclePoint):
        return x.angle
    return wrap(float(x))


@dataclass(frozen=True)
class Arc:
    """Closed arc from ``start`` running ``length`` turns counter-clockwise.

    A length of exactly 1 denotes the whole circle (the arc of the empty word).
    """

    start: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= 1.0):
            raise GeometryError(f"arc length must lie in (0, 1], got {self.length}")
        object.__setattr__(self, "start", wrap(float(self.start)))
        object.__setattr__(self, "length", float(self.length))

    @classmethod
    def between(cls, a, b) -> "Arc":
        a, b = turns(a), turns(b)
        length = wrap(b - a)
        if length <= 0.0:
            raise GeometryError("degenerate arc: endpoints coincide")
        return cls(a, length)

    @classmethod
    def full(cls, start=0.0) -> "Arc":
        return cls(turns(start), 1.0)

    @property
    def end(self) -> float:
        return wrap(self.start + self.length)

    @property
    def is_full(self) -> bool:
        return self.length >= 1.0

    @property
    def diam(self) -> float:
        return float(chord(self.length))

    @property
    def midpoint(self) -> float:
        return wrap(self.start + 0.5 * self.length)

    def offset(self, x) -> float:
        """Position of x measured from the start of the arc, in [0, 1)."""
        return wrap(turns(x) - self.start)

    def contains(self, x, tol: float = 1e-12) -> bool:
        if self.is_full:
            return True
        off = self.offset(x)
        return off <= self.length + tol or off >= 1.0 - tol

    def contains_arc(self, other: "Arc", tol: float = 1e-12) -> bool:
        if self.is_full:
            return True
        if other.is_full:
            return False
        off = self.offset(other.start)
        if off >= 1.0 - tol:
            off -= 1.0
        return off >= -tol and off + other.length <= self.length + tol

    def interior_contains_arc(self, other: "Arc", tol: float = 1e-12) -> bool:
        """True if ``other`` sits inside the open arc, away from both endpoints."""
        if self.is_full:
            return True
        off = self.offset(other.start)
        if off >= 1.0 - tol:
            return False
        return off > tol and off + other.length < self.length - tol


# ---------------------------------------------------------------------------
# Moebius transformations


@dataclass(frozen=True)
class MoebiusTransform:
    """z -> (a z + b) / (c z + d), precomposed with conjugation when ``anti``."""

    a: complex
    b: complex
    c: complex
    d: complex
    anti: bool = False

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-300:
            raise GeometryError("singular Moebius coefficients (ad - bc = 0)")
        s = cmath.sqrt(det)
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, turns_: float) -> "MoebiusTransform":
        w = cmath.exp(1j * math.pi * turns_)
        return cls(w, 0, 0, 1 / w)

    @classmethod
    def from_matrix(cls, m, anti: bool = False) -> "MoebiusTransform":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1], anti)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z):
        return moebius_apply(self, z)

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """Return self o other."""
        inner = other.matrix.conj() if self.anti else other.matrix
        return MoebiusTransform.from_matrix(self.matrix @ inner, self.anti != other.anti)

    def inverse(self) -> "MoebiusTransform":
        inv = np.array([[self.d, -self.b], [-self.c, self.a]])
        if self.anti:
            inv = inv.conj()
        return MoebiusTransform.from_matrix(inv, self.anti)

    def projectively_equal(self, other: "MoebiusTransform", tol: float = 1e-10) -> bool:
        if self.anti != other.anti:
            return False
        m, n = self.matrix, other.matrix
        return bool(np.allclose(m, n, atol=tol) or np.allclose(m, -n, atol=tol))

    def is_disk_preserving(self, samples: int = 64, tol: float = 1e-12) -> bool:
        z = to_complex(np.arange(samples) / samples)
        w = self(z)
        if not np.all(np.abs(np.abs(w) - 1.0) < tol):
            return False
        # orientation of the disk, not only the circle
        return abs(self(0j)) < 1.0

    # circle action --------------------------------------------------------
    def _disk_form(self):
        """(p, u) with self(z) = u (z - p) / (1 - conj(p) z) for the holomorphic part."""
        p = -self.b / self.a if abs(self.a) > 0 else complex("inf")
        if not abs(p) < 1.0:
            raise GeometryError("not an automorphism of the unit disk")
        u = (self.a * 1 + self.b) / (self.c * 1 + self.d) * (1 - p.conjugate()) / (1 - p)
        return p, u / abs(u)

    def circle_lift(self, x):
        """Continuous lift R -> R (turns) of the circle action of a disk map."""
        p, u = self._disk_form()
        x = np.asarray(x, dtype=float)
        s = -x if self.anti else x
        phi = cmath.phase(u) / TWO_PI
        return phi + s - np.angle(1 - p.conjugate() * np.exp(1j * TWO_PI * s)) / math.pi

    def circle_derivative(self, x):
        """|M'(z)| at z = exp(2 pi i x) for a disk map (= |d lift / dx|)."""
        p, _ = self._disk_form()
        x = np.asarray(x, dtype=float)
        s = -x if self.anti else x
        return (1 - abs(p) ** 2) / np.abs(1 - p.conjugate() * np.exp(1j * TWO_PI * s)) ** 2

    def circle_map(self, x):
        return wrap(self.circle_lift(x))


def moebius_apply(M: MoebiusTransform, z):
    """Apply M; poles give complex infinity, and infinity maps to a/c."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if M.anti:
        z = z.conj()
    out = np.empty_like(z)
    inf = np.isinf(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = M.a * z + M.b
        den = M.c * z + M.d
        out[:] = num / den
    out[(den == 0) & ~inf] = complex("inf")
    if inf.any():
        out[inf] = M.a / M.c if M.c != 0 else complex("inf")
    return complex(out[0]) if scalar else out


def three_point_moebius(p1, p2, p3, q1, q2, q3) -> MoebiusTransform:
    """Moebius map sending p_i to q_i (finite, distinct points)."""

    def to_standard(z1, z2, z3):
        # z -> (z - z1)(z2 - z3) / ((z - z3)(z2 - z1)), sends z1,z2,z3 to 0,1,inf
        return np.array([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]])

    A = to_standard(p1, p2, p3)
    B = to_standard(q1, q2, q3)
    Binv = np.array([[B[1, 1], -B[0, 1]], [-B[1, 0], B[0, 0]]])
    return MoebiusTransform.from_matrix(Binv @ A)


def _to_one_minus_one(p: float, q: float) -> MoebiusTransform:
    """Disk map sending p -> 1, q -> -1 and the arc midpoint to i."""
    m = Arc.between(p, q).midpoint
    return three_point_moebius(to_complex(p), to_complex(m), to_complex(q), 1, 1j, -1)


def disk_moebius_from_constraints(p, q, P, Q, deriv_at_p: float | None = None) -> MoebiusTransform:
    """Disk automorphism with M(p) = P, M(q) = Q and, optionally, |M'(p)| = deriv_at_p.

    Without a derivative the midpoint of the arc [p, q] is sent to the midpoint
    of [P, Q].  With one, the remaining real parameter of the family is solved
    through the hyperbolic maps fixing +1 and -1.
    """
    p, q, P, Q = turns(p), turns(q), turns(P), turns(Q)
    if circle_dist(p, q) <= POINT_TOL or circle_dist(P, Q) <= POINT_TOL:
        raise GeometryError("infeasible Moebius constraints: coincident points")
    R1 = _to_one_minus_one(p, q)
    R2 = _to_one_minus_one(P, Q)
    if deriv_at_p is None:
        return R2.inverse().compose(R1)
    if not (deriv_at_p > 0 and math.isfinite(deriv_at_p)):
        raise GeometryError(f"infeasible Moebius constraints: derivative {deriv_at_p}")
    kappa = deriv_at_p * float(R2.circle_derivative(P)) / float(R1.circle_derivative(p))
    s = (kappa - 1) / (kappa + 1)
    H = MoebiusTransform(1, -s, -s, 1)
    return R2.inverse().compose(H).compose(R1)


# ---------------------------------------------------------------------------
# Circles orthogonal to S^1


@dataclass(frozen=True)
class OrthoDisk:
    center: complex
    radius: float

    def contains(self, z, strict: bool = True):
        d = np.abs(np.asarray(z) - self.center)
        return d < self.radius if strict else d <= self.radius

    def boundary(self, n: int) -> np.ndarray:
        t = np.arange(n) / n
        return self.center + self.radius * to_complex(t)


def orthogonal_disk(a, b) -> OrthoDisk:
    """The disk bounded by the circle through a, b meeting S^1 at right angles."""
    a, b = turns(a), turns(b)
    d = wrap(b - a)
    if d <= POINT_TOL or d >= 1 - POINT_TOL:
        raise GeometryError("orthogonal disk through coincident points")
    if abs(d - 0.5) < 1e-12:
        raise GeometryError("antipodal points: the orthogonal circle degenerates to a line")
    if d > 0.5:
        a, d = b, 1.0 - d
    half = math.pi * d  # half the central angle, in radians
    center = cmath.exp(1j * TWO_PI * (a + d / 2)) / math.cos(half)
    return OrthoDisk(center, math.tan(half))
