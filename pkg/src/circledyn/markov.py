"""Markov partitions of circle coverings and their symbolic dynamics.

Arcs are handled in lifted turn coordinates: an arc is a start angle plus a
length.  A_w for a word w = (j_1, ..., j_n) is obtained by pulling A_{j_n}
back through the inverse branches f_{j_{n-1}}^{-1}, ..., f_{j_1}^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle_maps import CoveringMap, _snap_offset
from .geometry import Arc, CirclePoint, GeometryError, chord, circle_dist, turns, wrap

DEFAULT_BUDGET = 2**22
POINT_DEDUP = 1e-13


class PartitionError(ValueError):
    """A proposed Markov partition violates one of its defining clauses."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class BudgetExceeded(RuntimeError):
    pass


class ExpansivityError(RuntimeError):
    """Arc-tree descent did not terminate within the depth budget."""


class UnresolvableError(ValueError):
    """Refinement produced distinct points closer than the dedup threshold."""


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree."""


def _as_word(w) -> tuple:
    return tuple(int(j) for j in w)


class MarkovPartition:
    """Validated Markov partition; build it with :func:`validate_partition`."""

    def __init__(self, f: CoveringMap, points, sigma, turning, transition, tol):
        self.map = f
        self.points = np.asarray(points, dtype=float)
        self.r = len(self.points) - 1
        a0 = self.points[0]
        # lifted coordinates t_0 < ... < t_r < t_{r+1} = t_0 + 1
        self.t = np.append(a0 + _snap_offset(self.points - a0), a0 + 1.0)
        self.sigma = np.asarray(sigma)
        self.turning = np.asarray(turning, dtype=float)
        self.transition = np.asarray(transition, dtype=int)
        self.tol = tol
        self.orientation = f.orientation
        self._lift_at_t = f.lift(self.t)
        self._levels: list[RefinementLevelSet] = []

    # -- basic structure ------------------------------------------------
    @property
    def size(self) -> int:
        return self.r + 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def arcs(self) -> list[Arc]:
        return [Arc(self.t[k], self.t[k + 1] - self.t[k]) for k in range(self.size)]

    def point_index(self, a, tol: float = 1e-12) -> int:
        d = circle_dist(self.points, turns(a))
        k = int(np.argmin(d))
        if d[k] > tol:
            raise ValueError(f"{turns(a)} is not a partition point")
        return k

    def is_admissible(self, w) -> bool:
        w = _as_word(w)
        if any(j < 0 or j > self.r for j in w):
            return False
        return all(self.transition[a, b] for a, b in zip(w, w[1:]))

    # -- inverse branches ---------------------------------------------------
    def pull_back(self, k: int, start, length, eps: float = 1e-12):
        """Preimages under f_k = f|A_k of arcs (start, length).

        Returns lifted starts inside [t_k, t_{k+1}], lengths, and a mask of the
        arcs that actually lie in f(A_k).
        """
        f = self.map
        start = np.asarray(start, dtype=float)
        length = np.asarray(length, dtype=float)
        Y0 = self._lift_at_t[k]
        T = self.turning[k]
        lo = np.full(start.shape, self.t[k])
        hi = np.full(start.shape, self.t[k + 1])
        if self.orientation > 0:
            off = _snap_offset(start - Y0)
            ok = off + length <= T + eps
            x0 = f.solve_lift(Y0 + off, lo, hi)
            x1 = f.solve_lift(Y0 + np.minimum(off + length, T), lo, hi)
        else:
            end = start + length
            off = _snap_offset(Y0 - end)
            ok = off + length <= T + eps
            # a decreasing branch sends the left end of the preimage to the image's end
            x0 = f.solve_lift(Y0 - off, lo, hi)
            x1 = f.solve_lift(Y0 - np.minimum(off + length, T), lo, hi)
        return x0, x1 - x0, ok

    def suffix_arcs(self, w) -> list[tuple[float, float]] | None:
        """[(start, length) of A_{w_i..w_n}] for i = n, n-1, ..., 1 (shortest suffix first)."""
        w = _as_word(w)
        if not w or not self.is_admissible(w):
            return None
        k = w[-1]
        s, ln = self.t[k], self.t[k + 1] - self.t[k]
        out = [(s, ln)]
        for j in reversed(w[:-1]):
            x0, l0, ok = self.pull_back(j, np.array([s]), np.array([ln]))
            if not ok[0]:
                raise ConsistencyError(f"admissible word {w} failed to pull back")
            s, ln = float(x0[0]), float(l0[0])
            out.append((s, ln))
        return out

    def arc_of_word(self, w) -> Arc | None:
        """A_w; the whole circle for the empty word, None if w is inadmissible."""
        w = _as_word(w)
        if not w:
            return Arc.full(self.points[0])
        arcs = self.suffix_arcs(w)
        if arcs is None:
            return None
        s, ln = arcs[-1]
        return Arc(s, ln)

    def children(self, w) -> list[tuple[tuple, Arc]]:
        """Admissible one-letter extensions of w with their arcs, in circle order."""
        w = _as_word(w)
        if not w:
            return [((k,), a) for k, a in enumerate(self.arcs)]
        parent = self.arc_of_word(w)
        out = []
        for j in np.nonzero(self.transition[w[-1]])[0]:
            child = w + (int(j),)
            try:
                out.append((child, self.arc_of_word(child)))
            except GeometryError as exc:
                raise UnresolvableError(f"arc of {child} is below double precision") from exc
        out.sort(key=lambda c: float(_snap_offset(c[1].start - parent.start)))
        return out

    # -- levels of points ---------------------------------------------------
    def endpoint_levels(self, w) -> tuple[int, int]:
        """Levels (smallest m with the point in F_m) of the start and end of A_w."""
        arcs = self.suffix_arcs(w)
        n = len(arcs)
        levels = []
        for which in (0, 1):
            lev = n
            for i in range(n):
                # f^i of this endpoint of A_w is an endpoint of the suffix arc
                s, ln = arcs[n - 1 - i]
                flip = self.orientation < 0 and i % 2 == 1
                use_end = (which == 1) != flip
                x = s + ln if use_end else s
                if float(np.min(circle_dist(self.points, x))) <= 1e-11:
                    lev = i + 1
                    break
            levels.append(lev)
        return levels[0], levels[1]

    def level_of(self, x, max_level: int = 64, tol: float = 1e-11) -> int | None:
        """Smallest m with x in F_m, found by iterating f (None if above max_level)."""
        x = turns(x)
        for m in range(1, max_level + 1):
            if float(np.min(circle_dist(self.points, x))) <= tol:
                return m
            x = float(self.map.eval(x))
        return None

    # -- refinement ---------------------------------------------------------
    def refine(self, n: int, budget: int = DEFAULT_BUDGET) -> "RefinementLevelSet":
        if n < 1:
            raise ValueError("refinement level must be >= 1")
        while len(self._levels) < n:
            m = len(self._levels) + 1
            if self.size * self.map.degree ** (m - 1) > budget:
                raise BudgetExceeded(
                    f"level {m} needs {self.size * self.map.degree ** (m - 1)} arcs, budget is {budget}"
                )
            self._levels.append(self._build_level(m))
        return self._levels[n - 1]

    def _build_level(self, n: int) -> "RefinementLevelSet":
        if n == 1:
            k = np.arange(self.size)
            return RefinementLevelSet(
                n=1,
                starts=self.t[:-1].copy(),
                lengths=self.lengths.copy(),
                levels=np.ones(self.size, dtype=int),
                first=k,
                tail=np.full(self.size, -1),
                parent=None,
            )
        prev = self._levels[-1]
        starts, lengths, first, tail = [], [], [], []
        for k in range(self.size):
            sel = np.nonzero(self.transition[k][prev.first])[0]
            if sel.size == 0:
                continue
            x0, ln, ok = self.pull_back(k, prev.starts[sel], prev.lengths[sel])
            if not np.all(ok):
                raise ConsistencyError("admissible arc fell outside its branch image")
            starts.append(x0)
            lengths.append(ln)
            first.append(np.full(sel.size, k))
            tail.append(sel)
        starts = np.concatenate(starts)
        lengths = np.concatenate(lengths)
        first = np.concatenate(first)
        tail = np.concatenate(tail)
        a0 = self.t[0]
        starts = a0 + _snap_offset(starts - a0)
        # reuse old values so that F_{n-1} sits exactly inside F_n
        old = prev.starts
        idx = np.clip(np.searchsorted(old, starts), 1, old.size - 1)
        cand = np.stack([old[idx - 1], old[idx], old[(idx + 1) % old.size], old[0] + np.zeros_like(starts)])
        d = circle_dist(cand, starts[None, :])
        best = np.argmin(d, axis=0)
        hit = d[best, np.arange(starts.size)] <= POINT_DEDUP
        starts = np.where(hit, cand[best, np.arange(starts.size)], starts)
        order = np.argsort(starts, kind="stable")
        starts, lengths, first, tail = starts[order], lengths[order], first[order], tail[order]
        gaps = np.diff(np.append(starts, a0 + 1.0))
        if np.any(gaps <= POINT_DEDUP):
            raise UnresolvableError(f"level {n} has distinct points closer than {POINT_DEDUP}")
        if np.max(np.abs(gaps - lengths)) > 1e-10:
            raise ConsistencyError(f"level {n} arcs do not tile the circle")
        levels = np.full(starts.size, n)
        old_pos = np.minimum(np.searchsorted(starts, old), starts.size - 1)
        if not np.array_equal(starts[old_pos], old):
            raise ConsistencyError(f"F_{n - 1} is not contained in F_{n}")
        levels[old_pos] = prev.levels
        return RefinementLevelSet(n, starts, gaps, levels, first, tail, prev)


@dataclass(eq=False)
class RefinementLevelSet:
    """F_n with one entry per complementary arc A_w, |w| = n.

    ``starts`` are lifted angles in [a_0, a_0 + 1), sorted; the arc i runs from
    starts[i] for lengths[i] turns.  ``levels[i]`` is the level of starts[i].
    The word of arc i is first[i] followed by the word of arc tail[i] of F_{n-1}.
    """

    n: int
    starts: np.ndarray
    lengths: np.ndarray
    levels: np.ndarray
    first: np.ndarray
    tail: np.ndarray
    parent: "RefinementLevelSet | None" = field(repr=False)

    @property
    def points(self) -> np.ndarray:
        return wrap(self.starts)

    def __len__(self):
        return self.starts.size

    def word(self, i: int) -> tuple:
        letters = []
        lvl = self
        while lvl is not None:
            letters.append(int(lvl.first[i]))
            i = int(lvl.tail[i])
            lvl = lvl.parent
        return tuple(letters)

    def arc(self, i: int) -> Arc:
        return Arc(self.starts[i], self.lengths[i])

    def level_of(self, x, tol: float = 1e-12) -> int:
        d = circle_dist(self.starts, turns(x))
        i = int(np.argmin(d))
        if d[i] > tol:
            raise ValueError(f"{turns(x)} is not a point of F_{self.n}")
        return int(self.levels[i])

    def max_diameter(self) -> float:
        return float(chord(np.max(self.lengths)))

    def arc_containing(self, x) -> int:
        """Index of the half-open arc [start, start + length) containing x."""
        a0 = self.starts[0]
        y = a0 + _snap_offset(turns(x) - a0)
        return int(np.searchsorted(self.starts, y, side="right") - 1)


# ---------------------------------------------------------------------------
# Validation


def validate_partition(f: CoveringMap, points, tol: float = 1e-10) -> MarkovPartition:
    pts = [turns(p) for p in points]
    if len(pts) < 2:
        raise PartitionError("injectivity", "a partition needs at least two points")
    a0 = pts[0]
    order = sorted(range(len(pts)), key=lambda i: float(_snap_offset(pts[i] - a0)))
    pts = np.array([pts[i] for i in order])
    if np.any(np.diff(_snap_offset(pts - a0)) <= POINT_DEDUP):
        raise PartitionError("injectivity", "partition points must be distinct")
    size = pts.size
    # invariance: f maps the point set into itself
    images = f.eval(pts)
    sigma = np.empty(size, dtype=int)
    for k, y in enumerate(images):
        d = circle_dist(pts, y)
        j = int(np.argmin(d))
        if d[j] > tol:
            raise PartitionError("invariance", f"f({pts[k]:.12g}) = {y:.12g} is not a partition point")
        sigma[k] = j
    t = np.append(a0 + _snap_offset(pts - a0), a0 + 1.0)
    F = f.lift(t)
    o = f.orientation
    turning = o * np.diff(F)
    if np.any(turning <= 0):
        raise PartitionError("injectivity", "lift is not monotone on a partition arc")
    big = np.nonzero(turning > 1.0 + tol)[0]
    if big.size:
        k = int(big[0])
        raise PartitionError("injectivity", f"f wraps arc {k} {turning[k]:.6g} times around the circle")
    # covering: f(A_k) is a union of consecutive partition arcs
    lengths = np.diff(t)
    B = np.zeros((size, size), dtype=int)
    for k in range(size):
        j = sigma[k] if o > 0 else sigma[(k + 1) % size]
        acc = 0.0
        while acc < turning[k] - tol:
            B[k, j] = 1
            acc += lengths[j]
            j = (j + 1) % size
        if abs(acc - turning[k]) > tol:
            raise PartitionError("covering", f"f(A_{k}) does not end at a partition point")
    P = MarkovPartition(f, pts, sigma, np.minimum(turning, 1.0), B, tol)
    return P


# ---------------------------------------------------------------------------
# Symbolic operations


def canonical_split(P: MarkovPartition, w) -> tuple[tuple, tuple]:
    w = _as_word(w)
    if not w or not P.is_admissible(w):
        raise ValueError(f"canonical split needs a nonempty admissible word, got {w}")
    m = min(P.endpoint_levels(w)) - 1
    return w[:m], w[m:]


def word_associated_to_arc(P: MarkovPartition, I: Arc, max_depth: int = 64, tol: float = 1e-13) -> tuple:
    """Deepest admissible w with I inside A_w."""
    w: tuple = ()
    for _ in range(max_depth + 1):
        for child, arc in P.children(w):
            if arc.contains_arc(I, tol=tol):
                w = child
                break
        else:
            return w
    raise ExpansivityError(f"arc descent exceeded depth {max_depth}; map may not be expansive")


def descendants(P: MarkovPartition, w, depth: int) -> list[tuple[tuple, Arc]]:
    """All admissible extensions of w by ``depth`` letters, in circle order."""
    layer = [(_as_word(w), P.arc_of_word(w))]
    for _ in range(depth):
        nxt = []
        for u, _a in layer:
            nxt.extend(P.children(u))
        layer = nxt
    return layer


@dataclass
class ElevatorReport:
    arc: Arc
    word: tuple
    alternative: str  # "A-i" or "A-ii"
    m: int
    elevated_start: float
    elevated_length: float
    cover: list = field(default_factory=list)
    contained_index: int | None = None
    split: tuple | None = None
    split_point: float | None = None
    halves: tuple | None = None
    half_words: tuple | None = None
    half_splits: tuple | None = None

    @property
    def p(self) -> int:
        return len(self.cover)


def iterate_arc(f: CoveringMap, arc: Arc, m: int) -> tuple[float, float]:
    """Start and total turning of f^m(arc), following the lift."""
    x0, x1 = np.array([arc.start]), np.array([arc.start + arc.length])
    for _ in range(m):
        x0, x1 = f.lift(x0), f.lift(x1)
    if x1[0] < x0[0]:
        x0, x1 = x1, x0
    return float(wrap(x0[0])), float(x1[0] - x0[0])


def elevator_split(P: MarkovPartition, I: Arc) -> ElevatorReport:
    w = word_associated_to_arc(P, I)
    level = len(w)
    r = P.r
    cover = descendants(P, w, r + 1)
    inside = [i for i, (_u, a) in enumerate(cover) if I.contains_arc(a, tol=1e-13)]
    if inside:
        i0 = inside[0]
        v, u = canonical_split(P, cover[i0][0])
        m = len(v)
        es, el = iterate_arc(P.map, I, m)
        bound = (r + 1) ** (r + 2)
        if len(cover) > bound:
            raise ConsistencyError(f"elevator cover has {len(cover)} arcs, above {bound}")
        return ElevatorReport(I, w, "A-i", m, es, el, cover=cover, contained_index=i0, split=(v, u))
    # alternative (A-ii): exactly one F_{l+1} point in the interior of I
    kids = P.children(w)
    cuts = [a.start for _c, a in kids[1:]]
    inner = [c for c in cuts if 1e-13 < I.offset(c) < I.length - 1e-13]
    if len(inner) != 1:
        raise ConsistencyError(f"expected one split point in I, found {len(inner)}")
    c = float(inner[0])
    lo = Arc.between(I.start, c)
    hi = Arc.between(c, I.end)
    words = (word_associated_to_arc(P, lo), word_associated_to_arc(P, hi))
    splits = tuple(canonical_split(P, x) for x in words)
    es, el = iterate_arc(P.map, I, level)
    return ElevatorReport(
        I, w, "A-ii", level, es, el, cover=cover, split_point=c, halves=(lo, hi), half_words=words,
        half_splits=splits,
    )


# ---------------------------------------------------------------------------
# Primitivity


def _matrix_primitive(B: np.ndarray) -> int | None:
    """Smallest n <= size^2 with B^n > 0, or None."""
    size = B.shape[0]
    M = (B > 0).astype(np.int64)
    Bb = M.copy()
    for n in range(1, size * size + 1):
        if np.all(M > 0):
            return n
        M = ((M @ Bb) > 0).astype(np.int64)
    return None


def _arc_test_counts(B: np.ndarray) -> np.ndarray:
    """Number of level-(p+1) arcs inside each A_k, p = max(r, 1)."""
    size = B.shape[0]
    p = max(size - 1, 1)
    return np.linalg.matrix_power(B.astype(np.int64), p).sum(axis=1)


def arc_test_primitive(B) -> tuple[bool, int | None]:
    """Subdivision test: every A_k contains at least two arcs of F_{p+1}."""
    counts = _arc_test_counts(np.asarray(B))
    bad = np.nonzero(counts < 2)[0]
    return (bad.size == 0, None if bad.size == 0 else int(bad[0]))


def _cyclic_run(row) -> tuple[int, int] | None:
    """(first, last) index of the single cyclic block of ones in a non-full row."""
    size = len(row)
    ones = [j for j in range(size) if row[j]]
    if not ones or len(ones) == size:
        return None
    starts = [j for j in ones if not row[(j - 1) % size]]
    if len(starts) != 1:
        return None
    s = starts[0]
    return s, (s + len(ones) - 1) % size


def is_realizable(B) -> bool:
    """Whether B is the transition matrix of some Markov partition of a circle covering.

    Row k is the run of arcs from the image of a_k to the image of a_{k+1}
    (reversed for orientation -1), full exactly when the two images agree.
    """
    B = np.asarray(B, dtype=int)
    size = B.shape[0]
    for o in (1, -1):
        parent = list(range(size))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        fixed: list[tuple[int, int]] = []
        ok = True
        for k in range(size):
            row = B[k]
            nxt = (k + 1) % size
            if np.all(row == 1):
                parent[find(k)] = find(nxt)
                continue
            run = _cyclic_run(row)
            if run is None:
                ok = False
                break
            s, e = run
            if o > 0:
                fixed += [(k, s), (nxt, (e + 1) % size)]
            else:
                fixed += [(nxt, s), (k, (e + 1) % size)]
        if not ok:
            continue
        value: dict[int, int] = {}
        for i, v in fixed:
            root = find(i)
            if value.setdefault(root, v) != v:
                ok = False
                break
        if ok:
            # a non-full row needs distinct endpoint images
            for k in range(size):
                if not np.all(B[k] == 1):
                    a, b = find(k), find((k + 1) % size)
                    if a == b:
                        ok = False
                        break
        if ok:
            return True
    return False


@dataclass
class PrimitivityReport:
    primitive: bool
    witness_power: int | None
    offending_arc: int | None
    arc_test_applicable: bool = True

    def __bool__(self):
        return self.primitive


def is_primitive(P: MarkovPartition | np.ndarray, geometric: bool = True) -> PrimitivityReport:
    """Matrix-power test and arc-subdivision test; they must agree.

    The subdivision test only characterizes primitivity for matrices coming
    from circle coverings, so for a bare matrix that no covering realizes the
    matrix verdict is returned alone.
    """
    B = P.transition if isinstance(P, MarkovPartition) else np.asarray(P, dtype=int)
    n = _matrix_primitive(B)
    ok, bad = arc_test_primitive(B)
    applicable = isinstance(P, MarkovPartition) or is_realizable(B)
    if isinstance(P, MarkovPartition) and geometric:
        p = max(P.r, 1)
        if P.size * P.map.degree**p <= DEFAULT_BUDGET:
            lvl = P.refine(p + 1)
            geo = np.bincount(lvl.first, minlength=P.size)
            if not np.array_equal(geo, _arc_test_counts(B)):
                raise ConsistencyError("refinement arc counts disagree with the transition matrix")
    if applicable and (n is not None) != ok:
        raise ConsistencyError(f"primitivity tests disagree: matrix power {n}, arc test {ok}")
    return PrimitivityReport(n is not None, n, bad if applicable else None, applicable)


def realizable_transitions(size: int) -> dict[tuple, list]:
    """Transition matrices of circle-covering partitions with ``size`` arcs.

    Enumerates image start indices sigma and both orientations; rows are runs
    of consecutive arcs (full rows allowed).  Keys are flattened matrices.
    """
    import itertools

    out: dict[tuple, list] = {}
    for o in (1, -1):
        for sigma in itertools.product(range(size), repeat=size):
            B = np.zeros((size, size), dtype=int)
            for k in range(size):
                a, b = (sigma[k], sigma[(k + 1) % size]) if o > 0 else (sigma[(k + 1) % size], sigma[k])
                if a == b:
                    B[k, :] = 1
                    continue
                j = a
                while j != b:
                    B[k, j] = 1
                    j = (j + 1) % size
            out.setdefault(tuple(B.ravel()), []).append((o, sigma))
    return out


# ---------------------------------------------------------------------------
# Expansivity


def _r2(x, y) -> float:
    slope, icpt = np.polyfit(x, y, 1)
    ss = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - float(np.sum((y - slope * x - icpt) ** 2)) / ss if ss > 0 else 1.0


@dataclass
class ExpansivityProfile:
    rows: list  # (n, max diam)
    verdict: str


def expansivity_profile(P: MarkovPartition, n_max: int, budget: int = DEFAULT_BUDGET) -> ExpansivityProfile:
    rows = [(n, P.refine(n, budget).max_diameter()) for n in range(1, n_max + 1)]
    d = np.array([r[1] for r in rows])
    tail = d[len(d) // 2:]
    n = np.arange(len(d) - tail.size + 1, len(d) + 1, dtype=float)
    if tail.size < 3 or np.any(np.diff(tail) > 1e-15):
        verdict = "not decreasing"
    elif _r2(n, np.log(tail)) >= _r2(np.log(n), np.log(tail)):
        verdict = "expansive (numerical, geometric decay)"
    else:
        verdict = "expansive (numerical, sub-geometric decay)"
    return ExpansivityProfile(rows, verdict)


def side_arcs(P: MarkovPartition, a, side: int, n: int, min_length: float = 0.0) -> list[tuple[Arc, Arc]]:
    """For m = 1..n, the two consecutive F_m arcs next to the partition point a.

    ``side`` is +1 for the arcs running counter-clockwise from a, -1 for the
    other side; the arc touching a comes first.  The list stops early once an
    arc gets shorter than ``min_length`` turns.
    """
    k = P.point_index(a)
    words = [(k,), ((k + 1) % P.size,)] if side > 0 else [((k - 1) % P.size,), ((k - 2) % P.size,)]
    out = []
    for m in range(1, n + 1):
        if m > 1:
            first, second = P.children(words[0]), P.children(words[1])
            if side < 0:
                first, second = first[::-1], second[::-1]
            kids = first + second
            words = [kids[0][0], kids[1][0]]
            if min(kids[0][1].length, kids[1][1].length) < min_length:
                break
        out.append((P.arc_of_word(words[0]), P.arc_of_word(words[1])))
    return out


def export_partition(P: MarkovPartition, n_max: int = 6) -> dict:
    prof = expansivity_profile(P, n_max)
    return {
        "points": [float(x) for x in P.points],
        "transition": P.transition.tolist(),
        "diameter_profile": [{"n": n, "max_diam": d} for n, d in prof.rows],
        "expansivity": prof.verdict,
    }


__all__ = [
    "Arc",
    "BudgetExceeded",
    "CirclePoint",
    "ConsistencyError",
    "ElevatorReport",
    "ExpansivityError",
    "MarkovPartition",
    "PartitionError",
    "RefinementLevelSet",
    "UnresolvableError",
    "arc_test_primitive",
    "canonical_split",
    "descendants",
    "elevator_split",
    "expansivity_profile",
    "export_partition",
    "is_primitive",
    "is_realizable",
    "realizable_transitions",
    "side_arcs",
    "validate_partition",
    "word_associated_to_arc",
]
