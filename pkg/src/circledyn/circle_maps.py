"""Covering maps of the unit circle and rational maps of the sphere.

Every covering map is handled through its lift F: R -> R in turns, which
satisfies F(x + 1) = F(x) + orientation * degree.  Inverse branches are
computed by a bracketed Newton/bisection solve on the lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    TWO_PI,
    CirclePoint,
    GeometryError,
    MoebiusTransform,
    circle_dist,
    to_complex,
    turns,
    wrap,
)

MAX_SOLVE_ITER = 200


class NumericalFailure(RuntimeError):
    """An iterative solve did not converge."""


def _snap_offset(d):
    """wrap() that sends values within 1e-14 of a full turn back to 0."""
    d = np.mod(d, 1.0)
    return np.where(d > 1.0 - 1e-14, 0.0, d)


class CoveringMap:
    """Base class: subclasses provide lift() and lift_derivative()."""

    degree: int
    orientation: int
    kind = "covering"

    def lift(self, x):
        raise NotImplementedError

    def lift_derivative(self, x):
        raise NotImplementedError

    def lift_and_derivative(self, x):
        return self.lift(x), self.lift_derivative(x)

    def eval(self, x):
        """Image angle(s) in turns."""
        if isinstance(x, CirclePoint):
            return CirclePoint(float(self.lift(x.angle)))
        return wrap(self.lift(x))

    __call__ = eval

    def derivative_modulus(self, x):
        return float(self.lift_derivative(turns(x)))

    def _lift_table(self):
        table = getattr(self, "_table_cache", None)
        if table is None:
            xs = np.linspace(0.0, 2.0, 2 * 4096 + 1)
            table = (xs, self.orientation * self.lift(xs))
            object.__setattr__(self, "_table_cache", table)
        return table

    def solve_lift(self, Y, lo, hi):
        """x in [lo, hi] with lift(x) = Y, assuming the lift is monotone there."""
        Y, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (Y, lo, hi)))
        shape = Y.shape
        Y, lo, hi = Y.ravel(), lo.ravel(), hi.ravel()
        o = self.orientation
        # narrow each bracket with a tabulated lift over two periods
        xs, table = self._lift_table()
        shift = np.floor(lo)
        target = o * Y - self.degree * shift
        i = np.clip(np.searchsorted(table, target) - 1, 0, xs.size - 2)
        a = np.maximum(lo, xs[i] + shift)
        b = np.minimum(hi, xs[i + 1] + shift)
        bad = a > b
        a, b = np.where(bad, lo, a), np.where(bad, hi, b)
        x = 0.5 * (a + b)
        out = x.copy()
        active = np.arange(x.size)
        for _ in range(MAX_SOLVE_ITER):
            F, dF = self.lift_and_derivative(x)
            g = o * (F - Y[active])
            pos = g > 0
            b = np.where(pos, x, b)
            a = np.where(pos, a, x)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x - g / dF
            outside = ~((xn > a) & (xn < b)) | ~np.isfinite(xn)
            xn = np.where(outside, 0.5 * (a + b), xn)
            tol = 2 * np.spacing(np.maximum(1.0, np.abs(x)))
            done = (np.abs(xn - x) <= tol) | (b - a <= tol) | (g == 0)
            x = np.where(g == 0, x, xn)
            out[active[done]] = x[done]
            keep = ~done
            if not keep.any():
                return np.clip(out, lo, hi).reshape(shape)
            active, x, a, b = active[keep], x[keep], a[keep], b[keep]
        raise NumericalFailure("lift inversion did not converge in 200 iterations")

    def preimages(self, y) -> np.ndarray:
        """The degree-many preimages of y, in increasing angle order."""
        y = turns(y)
        base = float(self.lift(0.0))
        o = self.orientation
        k = np.arange(self.degree, dtype=float)
        if o > 0:
            Y = base + float(_snap_offset(y - base)) + k
        else:
            Y = base - float(_snap_offset(base - y)) - k
        x = self.solve_lift(Y, np.zeros_like(Y), np.ones_like(Y))
        return np.sort(wrap(x))

    def fixed_points(self, grid: int = 4096, tol: float = 1e-12):
        """Fixed points on the circle with their multipliers |f'|."""
        xs = np.linspace(0.0, 1.0, grid + 1)
        g = self.lift(xs) - xs
        roots = []
        exact = np.abs(g - np.round(g)) <= 1e-14
        roots.extend(xs[exact].tolist())
        g = np.where(exact, np.round(g), g)
        fl = np.floor(g)
        for i in range(grid):
            lo_n, hi_n = sorted((g[i], g[i + 1]))
            for n in range(int(math.floor(lo_n)) + 1, int(math.ceil(hi_n))):
                roots.append(self._fixed_root(xs[i], xs[i + 1], n))
        # tangential fixed points: local minima of distance to the integers
        dist = np.abs(g - np.round(g))
        for i in range(1, grid):
            if dist[i] <= dist[i - 1] and dist[i] <= dist[i + 1] and dist[i] < 1e-6 and fl[i - 1] == fl[i + 1]:
                if any(circle_dist(xs[i], r) < 2.0 / grid for r in roots):
                    continue
                x = self._polish_touch(xs[i - 1], xs[i + 1], round(g[i]))
                d = float(self.lift(x) - x)
                if abs(d - round(d)) < tol:
                    roots.append(x)
        pts = []
        for r in sorted(wrap(np.array(roots))) if roots else []:
            if all(circle_dist(r, p) > 1e-10 for p in pts):
                pts.append(float(r))
        return [(CirclePoint(p), self.derivative_modulus(p)) for p in pts]

    def _fixed_root(self, a, b, n):
        ga = self.lift(a) - a - n
        for _ in range(MAX_SOLVE_ITER):
            m = 0.5 * (a + b)
            gm = self.lift(m) - m - n
            if gm == 0 or b - a <= 2 * np.spacing(1.0):
                return m
            if (gm > 0) == (ga > 0):
                a, ga = m, gm
            else:
                b = m
        return 0.5 * (a + b)

    def _polish_touch(self, a, b, n):
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(lambda x: abs(float(self.lift(x)) - x - n), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-15})
        return float(res.x)

    def rational(self) -> "RationalMap | None":
        """Rational extension to the sphere, when one exists."""
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PowerMap(CoveringMap):
    """z -> z**d, or conj(z)**d when orientation is -1."""

    d: int
    orientation: int = 1
    kind = "power"

    def __post_init__(self):
        if self.d < 2 or self.orientation not in (1, -1):
            raise ValueError("power map needs d >= 2 and orientation +-1")

    @property
    def degree(self):
        return self.d

    def lift(self, x):
        return self.orientation * self.d * np.asarray(x, dtype=float)

    def lift_derivative(self, x):
        return np.full(np.shape(x), float(self.d))

    def solve_lift(self, Y, lo, hi):
        return np.clip(np.asarray(Y, dtype=float) / (self.orientation * self.d), lo, hi)

    def rational(self):
        if self.orientation < 0:
            return None
        return RationalMap([1] + [0] * self.d, [1])

    def to_spec(self):
        return {"type": "power", "degree": self.d, "orientation": self.orientation}


class BlaschkeProduct(CoveringMap):
    """rotation * prod (z - a_i) / (1 - conj(a_i) z) with all |a_i| < 1."""

    kind = "blaschke"
    orientation = 1

    def __init__(self, zeros, rotation=1.0 + 0j, rational: "RationalMap | None" = None):
        self.zeros = np.asarray(zeros, dtype=complex).reshape(-1)
        if self.zeros.size < 2:
            raise ValueError("a covering Blaschke product needs degree >= 2")
        if np.any(np.abs(self.zeros) >= 1.0):
            raise ValueError("Blaschke zeros must lie in the open unit disk")
        rotation = complex(rotation)
        self.rotation = rotation / abs(rotation)
        self._phase = math.atan2(self.rotation.imag, self.rotation.real) / TWO_PI
        self._rational = rational

    @classmethod
    def from_rational(cls, numerator, denominator) -> "BlaschkeProduct":
        """Normalize num/den (descending coefficients) to factored form."""
        R = RationalMap(numerator, denominator)
        zeros = np.roots(R.num)
        if np.any(np.abs(zeros) >= 1.0):
            raise ValueError("numerator has zeros outside the open disk; not a Blaschke product")
        poles = np.roots(R.den) if len(R.den) > 1 else np.array([])
        expected = 1.0 / np.conj(zeros[np.abs(zeros) > 1e-12])
        if poles.size != expected.size or not all(np.min(np.abs(poles - e)) < 1e-8 for e in expected):
            raise ValueError("poles are not the reflections of the zeros; not a Blaschke product")
        factors = np.prod((1 - zeros) / (1 - np.conj(zeros)))
        rotation = R(1.0 + 0j)[0] / factors
        if abs(abs(rotation) - 1) > 1e-9:
            raise ValueError("rational map does not preserve the unit circle")
        return cls(zeros, rotation, rational=R)

    @property
    def degree(self):
        return int(self.zeros.size)

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        z = np.exp(1j * TWO_PI * x)[..., None]
        args = np.angle(1 - np.conj(self.zeros) * z) / math.pi
        return self._phase + self.degree * x - args.sum(axis=-1)

    def lift_derivative(self, x):
        z = to_complex(x)[..., None]
        a = self.zeros
        return ((1 - np.abs(a) ** 2) / np.abs(1 - np.conj(a) * z) ** 2).sum(axis=-1)

    def lift_and_derivative(self, x):
        x = np.asarray(x, dtype=float)
        q = 1 - np.conj(self.zeros) * np.exp(1j * TWO_PI * x)[..., None]
        F = self._phase + self.degree * x - (np.arctan2(q.imag, q.real) / math.pi).sum(axis=-1)
        dF = ((1 - np.abs(self.zeros) ** 2) / (q.real**2 + q.imag**2)).sum(axis=-1)
        return F, dF

    def __call__(self, x):
        return self.eval(x)

    def complex_eval(self, z):
        if self._rational is not None:
            return self._rational(z)[0]
        z = np.asarray(z, dtype=complex)[..., None]
        return self.rotation * np.prod((z - self.zeros) / (1 - np.conj(self.zeros) * z), axis=-1)

    def rational(self):
        if self._rational is not None:
            return self._rational
        num = np.array([self.rotation], dtype=complex)
        den = np.array([1.0], dtype=complex)
        for a in self.zeros:
            num = np.polymul(num, [1, -a])
            den = np.polymul(den, [-np.conj(a), 1])
        return RationalMap(num, den)

    def to_spec(self):
        if self._rational is not None:
            return {
                "type": "blaschke_rational",
                "numerator": [[c.real, c.imag] for c in self._rational.num],
                "denominator": [[c.real, c.imag] for c in self._rational.den],
            }
        return {
            "type": "blaschke",
            "zeros": [[a.real, a.imag] for a in self.zeros],
            "rotation": [self.rotation.real, self.rotation.imag],
        }


class PiecewiseMoebius(CoveringMap):
    """Circle map equal to the disk automorphism M_k on the arc [b_k, b_{k+1})."""

    kind = "piecewise_moebius"

    def __init__(self, points, pieces, tol: float = 1e-10):
        pts = [turns(p) for p in points]
        if len(pts) != len(pieces) or len(pts) < 2:
            raise ValueError("need one Moebius piece per partition point (at least 2)")
        self.points = np.array(pts)
        self.pieces = list(pieces)
        anti = {M.anti for M in self.pieces}
        if len(anti) != 1:
            raise ValueError("pieces must all be Moebius or all anti-Moebius")
        self.orientation = -1 if anti.pop() else 1
        b0 = self.points[0]
        self._t = np.append(b0 + _snap_offset(self.points - b0), b0 + 1.0)
        if np.any(np.diff(self._t) <= 0):
            raise ValueError("partition points must be distinct and listed in cyclic order")
        r1 = len(self.pieces)
        offsets = np.zeros(r1)
        for k in range(1, r1):
            prev = float(self.pieces[k - 1].circle_lift(self._t[k])) + offsets[k - 1]
            here = float(self.pieces[k].circle_lift(self._t[k]))
            offsets[k] = round(prev - here)
            if abs(prev - here - offsets[k]) > tol:
                raise ValueError(f"pieces {k - 1} and {k} disagree at their shared endpoint")
        end = float(self.pieces[-1].circle_lift(self._t[-1])) + offsets[-1]
        start = float(self.pieces[0].circle_lift(self._t[0]))
        total = self.orientation * (end - start)
        if abs(total - round(total)) > tol:
            raise ValueError("last and first pieces disagree at the base point")
        self._offsets = offsets
        self._wrap_fix = end - start - self.orientation * round(total)
        self._degree = int(round(total))
        if self._degree < 1:
            raise ValueError("piecewise map has non-positive degree")

    @property
    def degree(self):
        return self._degree

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        m = np.floor(x - self._t[0])
        xr = x - m
        k = np.clip(np.searchsorted(self._t, xr, side="right") - 1, 0, len(self.pieces) - 1)
        return xr, m, k

    def lift(self, x):
        xr, m, k = self._locate(x)
        out = np.empty(np.shape(xr))
        for j, M in enumerate(self.pieces):
            sel = k == j
            if np.any(sel):
                out[sel] = M.circle_lift(xr[sel]) + self._offsets[j]
        return out + m * self.orientation * self._degree

    def lift_derivative(self, x):
        xr, _, k = self._locate(x)
        out = np.empty(np.shape(xr))
        for j, M in enumerate(self.pieces):
            sel = k == j
            if np.any(sel):
                out[sel] = M.circle_derivative(xr[sel])
        return out

    def derivative_modulus(self, x):
        """|g'(x)|; at a break point, the pair (left, right) of one-sided values."""
        x = turns(x)
        hits = np.nonzero(circle_dist(self.points, x) <= 1e-14)[0]
        if hits.size:
            k = int(hits[0])
            left = float(self.pieces[k - 1].circle_derivative(x))
            right = float(self.pieces[k].circle_derivative(x))
            if abs(left - right) > 1e-12:
                return (left, right)
            return right
        return float(self.lift_derivative(x))

    def to_spec(self):
        return {
            "type": "piecewise_moebius",
            "points": [float(p) for p in self.points],
            "pieces": [
                {
                    "coefficients": [[c.real, c.imag] for c in (M.a, M.b, M.c, M.d)],
                    "anti": M.anti,
                }
                for M in self.pieces
            ],
        }


class ConjugatedMap(CoveringMap):
    """by o base o by^{-1} for a disk automorphism ``by``."""

    kind = "conjugated"

    def __init__(self, base: CoveringMap, by: MoebiusTransform):
        if not by.is_disk_preserving():
            raise GeometryError("conjugating map must preserve the unit disk")
        self.base = base
        self.by = by
        self.inv = by.inverse()
        self.orientation = base.orientation

    @property
    def degree(self):
        return self.base.degree

    def lift(self, x):
        return self.by.circle_lift(self.base.lift(self.inv.circle_lift(x)))

    def lift_derivative(self, x):
        u = self.inv.circle_lift(x)
        v = self.base.lift(u)
        return self.by.circle_derivative(v) * self.base.lift_derivative(u) * self.inv.circle_derivative(x)

    def rational(self):
        R = self.base.rational()
        if R is None or self.by.anti:
            return None
        return R.conjugate_by(self.by)

    def to_spec(self):
        M = self.by
        return {
            "type": "conjugated",
            "base": self.base.to_spec(),
            "by": {"coefficients": [[c.real, c.imag] for c in (M.a, M.b, M.c, M.d)], "anti": M.anti},
        }


# ---------------------------------------------------------------------------
# Rational maps


@dataclass(eq=False)
class RationalMap:
    """num(z) / den(z), coefficients in descending powers (numpy.polyval order)."""

    num: np.ndarray
    den: np.ndarray
    _dnum: np.ndarray = field(init=False, repr=False)
    _dden: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.num = np.trim_zeros(np.asarray(self.num, dtype=complex), "f")
        self.den = np.trim_zeros(np.asarray(self.den, dtype=complex), "f")
        if self.num.size == 0 or self.den.size == 0:
            raise ValueError("numerator and denominator must be nonzero polynomials")
        if self.num.size > 1 and self.den.size > 1:
            rn, rd = np.roots(self.num), np.roots(self.den)
            if rn.size and rd.size and np.min(np.abs(rn[:, None] - rd[None, :])) < 1e-9:
                raise ValueError("numerator and denominator share a root")
        self._dnum = np.polyder(self.num) if self.num.size > 1 else np.zeros(1, complex)
        self._dden = np.polyder(self.den) if self.den.size > 1 else np.zeros(1, complex)

    @property
    def degree(self) -> int:
        return max(self.num.size, self.den.size) - 1

    def __call__(self, z):
        return self.eval_and_derivative(z)

    def eval_and_derivative(self, z):
        """(R(z), R'(z)); a pole yields complex infinity for both."""
        z = np.asarray(z, dtype=complex)
        p, q = np.polyval(self.num, z), np.polyval(self.den, z)
        dp, dq = np.polyval(self._dnum, z), np.polyval(self._dden, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = p / q
            der = (dp * q - p * dq) / (q * q)
        pole = q == 0
        val = np.where(pole, complex("inf"), val)
        der = np.where(pole, complex("inf"), der)
        if z.ndim == 0:
            return complex(val), complex(der)
        return val, der

    def iterate(self, z, n: int):
        for _ in range(n):
            z = np.polyval(self.num, z) / np.polyval(self.den, z)
        return z

    def fixed_points(self, cluster: float = 1e-4):
        """Distinct finite fixed points with their multipliers R'(z)."""
        poly = np.polysub(self.num, np.polymul([1, 0], self.den))
        poly = np.trim_zeros(poly, "f")
        pts = np.roots(poly) if poly.size > 1 else np.array([])
        # a root of multiplicity m comes back as m points spread by ~eps^(1/m); merge them
        groups: list[list[complex]] = []
        for z in sorted(pts, key=lambda z: (z.real, z.imag)):
            for g in groups:
                if abs(z - g[0]) < cluster * (1 + abs(g[0])):
                    g.append(z)
                    break
            else:
                groups.append([z])
        out = []
        for g in groups:
            z = complex(np.mean(g))
            out.append((z, complex(self.eval_and_derivative(z)[1])))
        return out

    def preimages(self, w):
        """All solutions of R(z) = w, batched over an array of w."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        n = self.degree
        num = np.concatenate([np.zeros(n + 1 - self.num.size, complex), self.num])
        den = np.concatenate([np.zeros(n + 1 - self.den.size, complex), self.den])
        coeffs = num[None, :] - w[:, None] * den[None, :]
        lead = coeffs[:, 0]
        comp = np.zeros((w.size, n, n), dtype=complex)
        comp[:, 0, :] = -coeffs[:, 1:] / lead[:, None]
        if n > 1:
            comp[:, np.arange(1, n), np.arange(n - 1)] = 1.0
        return np.linalg.eigvals(comp)

    def conjugate_by(self, M: MoebiusTransform) -> "RationalMap":
        """Coefficients of M o R o M^{-1}."""
        Mi = M.inverse()
        # R o M^{-1}: substitute z -> (d z - b)/(-c z + a), homogenized
        n = self.degree
        a, b, c, d = Mi.a, Mi.b, Mi.c, Mi.d
        num = np.concatenate([np.zeros(n + 1 - self.num.size, complex), self.num])
        den = np.concatenate([np.zeros(n + 1 - self.den.size, complex), self.den])

        def homog(coeffs):
            out = np.zeros(1, complex)
            for i, ci in enumerate(coeffs):
                k = n - i
                term = np.array([ci], dtype=complex)
                for _ in range(k):
                    term = np.polymul(term, [a, b])
                for _ in range(n - k):
                    term = np.polymul(term, [c, d])
                out = np.polyadd(out, term)
            return out

        P, Q = homog(num), homog(den)
        new_num = np.polyadd(M.a * P, M.b * Q)
        new_den = np.polyadd(M.c * P, M.d * Q)
        return RationalMap(new_num, new_den)

    def to_spec(self):
        return {
            "type": "rational",
            "numerator": [[c.real, c.imag] for c in self.num],
            "denominator": [[c.real, c.imag] for c in self.den],
        }


def rational_eval_and_derivative(R: RationalMap, z):
    return R.eval_and_derivative(z)


# ---------------------------------------------------------------------------
# Named examples


def pine_tree_blaschke() -> BlaschkeProduct:
    """B(z) = (2 z^3 + 1) / (z^3 + 2): parabolic at 1, repelling at -1."""
    return BlaschkeProduct.from_rational([2, 0, 0, 1], [1, 0, 0, 2])


def half_blaschke() -> BlaschkeProduct:
    """z (z + 1/2) / (1 + z / 2), a hyperbolic degree-2 Blaschke product."""
    return BlaschkeProduct([0.0, -0.5])


def cusp_polynomial_b() -> float:
    return -1.0 - math.sqrt(2.0 / 3.0)


def cusp_polynomial() -> RationalMap:
    """z - (z - 1)^3 (z - b)^2 / (b (3b - 2)) with b = -1 - sqrt(2/3)."""
    b = cusp_polynomial_b()
    prod = np.polymul(np.polymul(np.polymul([1, -1], [1, -1]), [1, -1]), np.polymul([1, -b], [1, -b]))
    num = np.polysub(np.array([0, 0, 0, 0, 1, 0], dtype=float), prod / (b * (3 * b - 2)))
    return RationalMap(num, [1.0])
