"""The conjugacy h between two circle coverings with matched Markov partitions.

h sends the source arc A_w onto the target arc B_w for every admissible word
w.  A point x is located by its itinerary under f; its image is read off the
target arc B_w by linear interpolation of x's position inside A_w, so h is
exact at every point of every F_n and strictly increasing everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle_maps import _snap_offset
from .geometry import chord, circle_dist, to_turns, turns, wrap
from .markov import MarkovPartition, expansivity_profile, validate_partition

MAX_DEPTH = 20000
HIT_TOL = 1e-14
# fewest dyadic scales extension_class will judge
MIN_SCALES = 8


class ConjugacyError(ValueError):
    """The two partitions cannot be matched by an orientation-preserving conjugacy."""


class ToleranceError(RuntimeError):
    """The depth cap was reached before the requested accuracy."""


class Conjugacy:
    def __init__(self, Pf: MarkovPartition, Pg: MarkovPartition, pairing=None, check_expansive: bool = True):
        if Pf.size != Pg.size:
            raise ConjugacyError(f"partitions have {Pf.size} and {Pg.size} points")
        if Pf.orientation != Pg.orientation:
            raise ConjugacyError("orientation mismatch")
        if Pf.map.degree != Pg.map.degree:
            raise ConjugacyError(f"degree mismatch: {Pf.map.degree} vs {Pg.map.degree}")
        size = Pf.size
        if pairing is None:
            pairing = list(range(size))
        pairing = [int(p) for p in pairing]
        c = pairing[0]
        if sorted(pairing) != list(range(size)) or any(pairing[k] != (k + c) % size for k in range(size)):
            raise ConjugacyError("pairing must preserve the cyclic order of the points")
        if c:
            Pg = validate_partition(Pg.map, [Pg.points[(k + c) % size] for k in range(size)], Pg.tol)
        if not np.array_equal(Pf.sigma, Pg.sigma):
            raise ConjugacyError("pairing does not conjugate f to g on the partition points")
        if not np.array_equal(Pf.transition, Pg.transition):
            raise ConjugacyError("transition matrices differ under the pairing")
        if check_expansive:
            for P in (Pf, Pg):
                n = 1
                while P.size * P.map.degree ** (n) <= 20000 and n < 8:
                    n += 1
                if expansivity_profile(P, n).verdict == "not decreasing":
                    raise ConjugacyError("arc diameters do not decrease; map looks non-expansive")
        self.source = Pf
        self.target = Pg
        self.f = Pf.map
        self.g = Pg.map

    # -- symbolic coding ------------------------------------------------------
    def itinerary(self, x, depth: int):
        """Letters of x under f for ``depth`` steps and the step (or -1) at which
        the orbit lands on a partition point."""
        P = self.source
        x = wrap(np.asarray(x, dtype=float)).copy()
        npts = x.size
        letters = np.empty((npts, depth), dtype=np.int32)
        hit = np.full(npts, -1)
        a0 = P.t[0]
        for i in range(depth):
            d = circle_dist(P.points[None, :], x[:, None])
            k = np.argmin(d, axis=1)
            on = d[np.arange(npts), k] <= HIT_TOL
            newly = on & (hit < 0)
            hit[newly] = i
            x = np.where(on, P.points[k], x)
            letters[:, i] = np.clip(np.searchsorted(P.t, a0 + _snap_offset(x - a0), side="right") - 1, 0, P.r)
            nxt = wrap(self.f.lift(x))
            x = np.where(on, P.points[P.sigma[k]], nxt)
        return letters, hit

    @staticmethod
    def _pull_chain(P: MarkovPartition, letters: np.ndarray, depths: np.ndarray):
        """Arcs A_w for w = letters[p, :depths[p]], as (start, length) arrays."""
        npts = letters.shape[0]
        last = letters[np.arange(npts), depths - 1]
        s = P.t[last].copy()
        ln = (P.t[last + 1] - P.t[last]).copy()
        for i in range(int(depths.max()) - 2, -1, -1):
            active = depths - 2 >= i
            col = letters[:, i]
            for k in range(P.size):
                sel = np.nonzero(active & (col == k))[0]
                if sel.size:
                    x0, l0, _ = P.pull_back(k, s[sel], ln[sel])
                    s[sel], ln[sel] = x0, l0
        return s, ln

    def eval(self, x, tol: float = 1e-10, max_depth: int = MAX_DEPTH, strict: bool = True, start_depth: int = 24):
        """h(x) in turns with a bound on the error (the chord of the target arc)."""
        xs = np.atleast_1d(wrap(np.asarray(x, dtype=float)))
        npts = xs.size
        out = np.empty(npts)
        bound = np.full(npts, np.inf)
        todo = np.arange(npts)
        depth = start_depth
        while todo.size:
            depth = min(depth, max_depth)
            letters, hit = self.itinerary(xs[todo], depth)
            depths = np.where(hit >= 0, hit + 1, depth)
            sa, la = self._pull_chain(self.source, letters, depths)
            sb, lb = self._pull_chain(self.target, letters, depths)
            with np.errstate(divide="ignore", invalid="ignore"):
                frac = np.where(la > 0, _snap_offset(xs[todo] - sa) / la, 0.5)
            frac = np.where(frac > 1.0 + 1e-9, 0.0, np.clip(frac, 0.0, 1.0))
            val = wrap(sb + frac * lb)
            err = np.where(hit >= 0, 1e-15, np.maximum(chord(lb), 1e-15))
            done = err < tol
            out[todo] = val
            bound[todo] = err
            todo = todo[~done]
            if depth >= max_depth:
                break
            depth *= 2
        if todo.size and strict:
            raise ToleranceError(
                f"{todo.size} point(s) not resolved to {tol:g} within {max_depth} letters; loosen tol"
            )
        if np.ndim(x) == 0:
            return float(out[0]), float(bound[0])
        return out, bound

    def lift_eval(self, s, tol: float = 1e-10):
        """Increasing lift H of h with H(s + 1) = H(s) + 1."""
        return _conjugacy_lift(self, tol)(s)

    def equivariance_residual(self, x, tol: float = 1e-10) -> float:
        x = np.asarray(x, dtype=float)
        hx, _ = self.eval(x, tol=tol)
        hfx, _ = self.eval(self.f.eval(x), tol=tol)
        return float(np.max(circle_dist(hfx, self.g.eval(hx))))


def build_conjugacy(Pf: MarkovPartition, Pg: MarkovPartition, pairing=None, **kw) -> Conjugacy:
    return Conjugacy(Pf, Pg, pairing, **kw)


def eval_h(C: Conjugacy, x, tol: float = 1e-10):
    return C.eval(turns(x) if np.ndim(x) == 0 else x, tol=tol)


# ---------------------------------------------------------------------------
# Distortion


def _chord_turns(d):
    return 2.0 * np.abs(np.sin(np.pi * np.asarray(d)))


def distortion_batch(h, z, t: float, rel: float = 0.01, passes: int = 3):
    """rho_h(z, t) for an array of base angles z.

    ``h`` is a Conjugacy or a callable returning turns.  Entries whose chords
    cannot be resolved to relative error ``rel`` come back as nan.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    pts = np.concatenate([z, z + t, z - t])
    if not isinstance(h, Conjugacy):
        hv = np.asarray(h(wrap(pts)), dtype=float)
        e = np.zeros_like(hv)
    else:
        tol = np.full(pts.size, 1e-3 * t)
        hv = np.empty(pts.size)
        e = np.full(pts.size, np.inf)
        todo = np.arange(pts.size)
        for _ in range(passes):
            if not todo.size:
                break
            groups = {}
            for i in todo:
                groups.setdefault(float(tol[i]), []).append(i)
            for tl, idx in groups.items():
                idx = np.array(idx)
                v, b = h.eval(pts[idx], tol=tl, strict=False)
                hv[idx], e[idx] = v, b
            n = z.size
            dp = _snap_offset(hv[n:2 * n] - hv[:n])
            dm = _snap_offset(hv[:n] - hv[2 * n:])
            need = np.minimum(dp, dm)
            err = np.maximum(e[:n] + e[n:2 * n], e[:n] + e[2 * n:])
            bad = np.nonzero(err > rel * need)[0]
            if not bad.size:
                todo = bad
                break
            sel = np.concatenate([bad, bad + n, bad + 2 * n])
            newtol = np.tile(np.maximum(0.2 * rel * need[bad], 1e-15), 3)
            tol[sel] = np.minimum(tol[sel], newtol)
            todo = sel
    n = z.size
    dp = _snap_offset(hv[n:2 * n] - hv[:n])
    dm = _snap_offset(hv[:n] - hv[2 * n:])
    cp, cm = _chord_turns(dp), _chord_turns(dm)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.maximum(cp / cm, cm / cp)
    err = np.maximum(e[:n] + e[n:2 * n], e[:n] + e[2 * n:])
    rho = np.where(err <= rel * np.minimum(dp, dm), rho, np.nan)
    return rho


def symmetric_distortion(h, z, t: float) -> float:
    if not 0.0 < t < 0.5:
        raise ValueError("t must lie in (0, 1/2)")
    rho = distortion_batch(h, np.array([turns(z)]), t)[0]
    if not np.isfinite(rho):
        raise ToleranceError("chords could not be resolved to 1% relative error")
    return float(rho)


_NEAR_ONE = tuple(1.0 - 2.0**-k for k in range(1, 11))
ANCHOR_OFFSETS = tuple(sorted({0.0, 1.0, -1.0, 2.0, -2.0} | set(_NEAR_ONE) | {-s for s in _NEAR_ONE}))


def sample_plan(C: Conjugacy | None, n_uniform: int = 512, anchor_level: int = 6) -> dict:
    """Anchors (F_n points of the source) and uniform angles.

    Each anchor p is visited at z = p + s t.  The ratio peaks sharply when one
    of z +- t sits just past a point where h is singular, so the offsets
    crowd towards s = +-1 from inside.
    """
    anchors = np.array([])
    if C is not None:
        P = C.source
        n = anchor_level
        while n > 1 and P.size * P.map.degree ** (n - 1) > 20000:
            n -= 1
        anchors = P.refine(n).points
    return {"anchors": anchors, "offsets": ANCHOR_OFFSETS, "uniform": np.arange(n_uniform) / n_uniform}


def _plan_points(plan: dict, t: float) -> np.ndarray:
    a = np.asarray(plan["anchors"], dtype=float)
    pts = [np.asarray(plan["uniform"], dtype=float)]
    if a.size:
        pts.append((a[:, None] + t * np.asarray(plan["offsets"])[None, :]).ravel())
    return np.unique(wrap(np.concatenate(pts)))


def scalewise_distortion(h, t: float, plan: dict | None = None):
    """(max rho over the plan, maximizing angle, number of skipped samples): a lower bound for the sup."""
    if plan is None:
        plan = sample_plan(h if isinstance(h, Conjugacy) else None)
    z = _plan_points(plan, t)
    rho = distortion_batch(h, z, t)
    ok = np.isfinite(rho)
    if not ok.any():
        raise ToleranceError("no sample could be resolved")
    i = int(np.nanargmax(rho))
    return float(rho[i]), float(z[i]), int((~ok).sum())


@dataclass
class DistortionProfile:
    rows: list = field(default_factory=list)  # (j, t, rho_max, argmax_angle, class_running)
    skipped: int = 0

    @property
    def js(self):
        return np.array([r[0] for r in self.rows])

    @property
    def rho(self):
        return np.array([r[2] for r in self.rows])

    @property
    def verdict(self) -> str:
        return extension_class(self)


def extension_class(profile) -> str:
    """Bounded, Logarithmic or Faster growth of rho(2^-j).

    Boundedness is judged on the whole profile: logarithmic growth changes by
    less than a factor 2 across any 8 consecutive dyadic scales up to j = 18,
    so the deepest samples alone cannot separate the two.  The logarithmic
    test uses rho / j over the deepest 8 samples.
    """
    if isinstance(profile, DistortionProfile):
        js, rho = profile.js, profile.rho
    else:
        arr = np.asarray(profile, dtype=float)
        js, rho = arr[:, 0], arr[:, 1]
    if len(js) < MIN_SCALES:
        raise ValueError(f"need at least {MIN_SCALES} dyadic samples")
    order = np.argsort(js)
    js, rho = js[order], rho[order]
    if rho.max() / rho.min() < 2.0:
        return "Bounded"
    js, rho = js[-8:], rho[-8:]
    q = rho / js
    if q.max() / q.min() < 3.0:
        return "Logarithmic"
    return "Faster"


def distortion_profile(h, js=range(3, 19), plan: dict | None = None) -> DistortionProfile:
    if plan is None:
        plan = sample_plan(h if isinstance(h, Conjugacy) else None)
    prof = DistortionProfile()
    for j in js:
        t = 2.0 ** (-j)
        rho, arg, skipped = scalewise_distortion(h, t, plan)
        prof.skipped += skipped
        seen = [(r[0], r[2]) for r in prof.rows] + [(j, rho)]
        running = extension_class(seen) if len(seen) >= 8 else ""
        prof.rows.append((j, t, rho, arg, running))
    return prof


# ---------------------------------------------------------------------------
# Beurling-Ahlfors extension


def _lift_from_turns(h):
    """Increasing lift of a circle homeomorphism given on turns."""

    def H(s):
        s = np.asarray(s, dtype=float)
        fl = np.floor(s)
        base = float(np.asarray(h(np.array([0.0])))[0])
        v = np.asarray(h(np.ravel(s - fl)), dtype=float).reshape(s.shape)
        return base + _snap_offset(v - base) + fl

    return H


def _conjugacy_lift(C: Conjugacy, tol: float):
    base = float(C.eval(np.array([0.0]), tol=tol)[0][0])

    def H(s):
        s = np.asarray(s, dtype=float)
        fl = np.floor(s)
        v, _ = C.eval(np.ravel(s - fl), tol=tol)
        return base + _snap_offset(np.reshape(v, s.shape) - base) + fl

    return H


class TabulatedLift:
    """Piecewise-linear lift through the exact correspondence F_n -> G_n.

    Level-n arcs of both partitions carry the same words in the same circle
    order, so h(start of A_i) = start of B_i exactly.  Integrals of the
    interpolant are exact; its distance to the true lift integrates to at most
    sum |A_i| |B_i| over the arcs involved.
    """

    def __init__(self, C: Conjugacy, n: int | None = None, max_points: int = 2**20):
        P, Q = C.source, C.target
        if n is None:
            n = 1
            while P.size * P.map.degree ** n <= max_points:
                n += 1
        A, B = P.refine(n), Q.refine(n)
        if not (np.array_equal(A.first, B.first) and np.array_equal(A.tail, B.tail)):
            raise ConjugacyError("level sets of the two partitions are not matched")
        self.n = n
        self.x = np.append(A.starts, P.t[0] + 1.0)
        self.y = np.append(B.starts, Q.t[0] + 1.0)
        self.a0 = P.t[0]
        seg = 0.5 * np.diff(self.x) * (self.y[:-1] + self.y[1:])
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.total = self.cum[-1]
        self.cum_err = np.concatenate([[0.0], np.cumsum(np.diff(self.x) * np.diff(self.y))])

    def _split(self, s):
        s = np.asarray(s, dtype=float)
        m = np.floor(s - self.a0)
        r = s - m
        i = np.clip(np.searchsorted(self.x, r, side="right") - 1, 0, self.x.size - 2)
        return s, m, r, i

    def __call__(self, s):
        s, m, r, i = self._split(s)
        w = (r - self.x[i]) / (self.x[i + 1] - self.x[i])
        return self.y[i] + w * (self.y[i + 1] - self.y[i]) + m

    def antiderivative(self, s):
        """Integral of the interpolant from a_0 to s."""
        s, m, r, i = self._split(s)
        hr = self(r)
        part = self.cum[i] + 0.5 * (r - self.x[i]) * (self.y[i] + hr)
        return m * self.total + 0.5 * m * (m - 1) + part + m * (r - self.a0)

    def integral(self, a, b):
        return self.antiderivative(b) - self.antiderivative(a)

    def integral_error(self, a, b):
        """Bound on |integral of (H - interpolant)| over [a, b] (b - a <= 1)."""
        _, ma, ra, ia = self._split(a)
        _, mb, rb, ib = self._split(b)
        inner = np.where(mb == ma, self.cum_err[ib + 1] - self.cum_err[ia],
                         self.cum_err[-1] - self.cum_err[ia] + self.cum_err[ib + 1])
        return inner


def integrate_batch(F, a, b, tol: float = 1e-8, max_level: int = 48):
    """Adaptive Simpson for many intervals at once; F must be vectorized."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    owner = np.arange(a.size)
    m = 0.5 * (a + b)
    vals = F(np.concatenate([a, m, b]))
    fa, fm, fb = np.split(vals, 3)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    tl = np.broadcast_to(np.asarray(tol, dtype=float), a.shape).copy()
    total = np.zeros(a.size)
    for _ in range(max_level):
        if not owner.size:
            return total
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = np.split(F(np.concatenate([lm, rm])), 2)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        err = left + right - whole
        done = np.abs(err) <= 15.0 * tl
        np.add.at(total, owner[done], (left + right + err / 15.0)[done])
        k = ~done
        owner = np.concatenate([owner[k], owner[k]])
        a, b = np.concatenate([a[k], m[k]]), np.concatenate([m[k], b[k]])
        fa, fb = np.concatenate([fa[k], fm[k]]), np.concatenate([fm[k], fb[k]])
        fm = np.concatenate([flm[k], frm[k]])
        whole = np.concatenate([left[k], right[k]])
        tl = np.concatenate([tl[k], tl[k]]) / 2.0
    raise RuntimeError("adaptive Simpson did not converge")


def beurling_ahlfors_upper(H, x, y, tol: float = 1e-8):
    """u + iv of the extension of the increasing lift H at x + iy (y >= 0).

    ``H`` is a vectorized callable (integrated by adaptive Simpson) or a
    :class:`TabulatedLift` (integrated exactly).  At y = 0 the formula reduces
    to H(x).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()
    edge = yf <= 0
    ys = np.where(edge, 1.0, yf)
    if isinstance(H, TabulatedLift):
        lo = H.integral(xf - ys, xf) - 0.5 * ((xf**2) - (xf - ys) ** 2)
        hi = H.integral(xf, xf + ys) - 0.5 * ((xf + ys) ** 2 - xf**2)
    else:
        # integrate with the identity removed: H(s) - s is periodic and bounded
        G = lambda s: H(s) - s  # noqa: E731
        lo = integrate_batch(G, xf - ys, xf, tol=tol * ys)
        hi = integrate_batch(G, xf, xf + ys, tol=tol * ys)
    u = (lo + hi) / (2 * ys) + xf
    v = (hi - lo) / (2 * ys) + ys / 2
    u = np.where(edge, H(xf), u)
    v = np.where(edge, 0.0, v)
    return (u + 1j * v).reshape(shape)


def disk_to_upper(w):
    """Exponential chart: w = exp(2 pi i zeta) with zeta in the upper half-plane."""
    w = np.asarray(w, dtype=complex)
    return to_turns(w) + 1j * (-np.log(np.abs(w)) / (2 * math.pi))


def upper_to_disk(zeta):
    return np.exp(2j * math.pi * np.asarray(zeta, dtype=complex))


def beurling_ahlfors_extend(h, w, tol: float = 1e-8):
    """Beurling-Ahlfors extension of a circle homeomorphism to the open disk.

    ``h`` is a Conjugacy, a TabulatedLift or a callable on turns.  The lift is
    extended in the half-plane and carried back by the exponential chart,
    which respects the periodicity of the lift.
    """
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) >= 1 - 1e-6):
        raise ValueError("point too close to the boundary circle")
    if isinstance(h, Conjugacy):
        H = TabulatedLift(h)
    elif isinstance(h, TabulatedLift):
        H = h
    else:
        H = _lift_from_turns(h)
    center = np.abs(w) < 1e-12
    zeta = disk_to_upper(np.where(center, 0.5, w))
    E = beurling_ahlfors_upper(H, zeta.real, zeta.imag, tol=tol)
    out = upper_to_disk(E)
    return np.where(center, 0j, out) if out.ndim else (0j if center else complex(out))


def jacobian_signs(h, n: int = 64, tol: float = 1e-8):
    """Signed areas of the images of the cells of an n x n polar grid (positive = orientation kept)."""
    r = (np.arange(n) + 1.0) / (n + 1.0)
    th = np.arange(n + 1) / n
    R, T = np.meshgrid(r, th, indexing="ij")
    W = R * np.exp(2j * math.pi * T)
    E = beurling_ahlfors_extend(h, W, tol=tol)
    d1 = E[1:, :-1] - E[:-1, :-1]
    d2 = E[:-1, 1:] - E[:-1, :-1]
    D1 = W[1:, :-1] - W[:-1, :-1]
    D2 = W[:-1, 1:] - W[:-1, :-1]
    img = (d1.conj() * d2).imag
    dom = (D1.conj() * D2).imag
    return np.sign(img) * np.sign(dom)
