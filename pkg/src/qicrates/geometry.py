"""Convex rate-region arithmetic in the (R1, R2) plane.

Regions are stored as vertex lists in counterclockwise order starting from the
lexicographically smallest vertex, which for every downward-closed region is the
origin. Half-plane views are derived on demand.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ValidationError

MERGE_TOL = 1e-9
CONTAINS_TOL = 1e-9


class RatePoint(NamedTuple):
    r1: float
    r2: float


@dataclass(frozen=True, eq=False)
class RateRegion:
    """Convex polygon of rate pairs; ``vertices`` has shape ``(k, 2)``."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if v.shape[0] == 0:
            raise ValidationError("a rate region needs at least one vertex")
        if v.min() < -MERGE_TOL:
            raise ValidationError(f"rate region leaves the nonnegative quadrant (min coordinate {v.min():.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.shape[0]

    def __repr__(self):
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"RateRegion([{pts}])"

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def max_sum_rate(self) -> float:
        return float(self.vertices.sum(axis=1).max())

    def support(self, w1: float, w2: float) -> float:
        """``max w1 R1 + w2 R2`` over the region."""
        return float((self.vertices @ np.array([w1, w2])).max())

    def halfplanes(self) -> list[tuple[np.ndarray, float]]:
        """Constraints ``n . r <= c`` whose intersection is the region."""
        return _halfplanes(self.vertices)

    def contains(self, p, tol: float = CONTAINS_TOL) -> bool:
        return contains(self, p, tol)

    def bounds(self) -> tuple[float, float]:
        return float(self.vertices[:, 0].max()), float(self.vertices[:, 1].max())


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_chain(pts: np.ndarray) -> list:
    chain: list = []
    for p in pts:
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
            chain.pop()
        chain.append(p)
    return chain


def _chord_distance(o, a, p) -> float:
    span = np.hypot(p[0] - o[0], p[1] - o[1])
    if span == 0:
        return float(np.hypot(a[0] - o[0], a[1] - o[1]))
    return abs(_cross(o, a, p)) / span


def _canonical(points: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Convex hull vertices, counterclockwise from the lexicographic minimum.

    Points are snapped to 12 decimals, the exact hull is taken, and vertices
    within ``tol`` of the chord between their neighbours are then merged away.
    """
    pts = np.round(np.asarray(points, dtype=float).reshape(-1, 2), 12) + 0.0
    pts = np.unique(pts, axis=0)  # also sorts lexicographically
    if len(pts) > 2:
        lower = _hull_chain(pts)
        upper = _hull_chain(pts[::-1])
        hull = lower[:-1] + upper[:-1]
        changed = True
        while changed and len(hull) > 2:
            changed = False
            for i in range(len(hull)):
                k = len(hull)
                if _chord_distance(hull[i - 1], hull[i], hull[(i + 1) % k]) <= tol:
                    del hull[i]
                    changed = True
                    break
        pts = np.array(hull)
    if len(pts) == 2 and np.hypot(*(pts[1] - pts[0])) <= tol:
        pts = pts[:1]
    start = np.lexsort((pts[:, 1], pts[:, 0]))[0]
    return np.roll(pts, -start, axis=0)


def _halfplanes(v: np.ndarray) -> list[tuple[np.ndarray, float]]:
    k = len(v)
    if k == 1:
        p = v[0]
        return [(np.array([1.0, 0.0]), p[0]), (np.array([-1.0, 0.0]), -p[0]),
                (np.array([0.0, 1.0]), p[1]), (np.array([0.0, -1.0]), -p[1])]
    if k == 2:
        p, q = v
        d = (q - p) / np.hypot(*(q - p))
        n = np.array([-d[1], d[0]])
        return [(n, float(n @ p)), (-n, float(-n @ p)), (d, float(d @ q)), (-d, float(-d @ p))]
    out = []
    for i in range(k):
        a, b = v[i], v[(i + 1) % k]
        e = b - a
        length = np.hypot(*e)
        n = np.array([e[1], -e[0]]) / length  # outward normal for CCW order
        out.append((n, float(n @ a)))
    return out


def _clip(poly: list, n: np.ndarray, c: float, tol: float = 1e-12) -> list:
    """Sutherland-Hodgman clip of a convex vertex loop against ``n . x <= c``."""
    if not poly:
        return poly
    out = []
    k = len(poly)
    for i in range(k):
        cur, nxt = poly[i], poly[(i + 1) % k]
        fc, fn = float(n @ cur) - c, float(n @ nxt) - c
        if fc <= tol:
            out.append(cur)
        if (fc < -tol and fn > tol) or (fc > tol and fn < -tol):
            t = fc / (fc - fn)
            out.append(cur + t * (nxt - cur))
        if k == 1:
            break
    return out


def clip_halfplanes(start: Sequence, constraints: Iterable[tuple]) -> RateRegion | None:
    """Intersect a convex polygon with half-planes ``n . r <= c``; ``None`` if empty."""
    poly = [np.asarray(p, dtype=float) for p in start]
    for n, c in constraints:
        poly = _clip(poly, np.asarray(n, dtype=float), float(c))
        if not poly:
            return None
    return RateRegion(_canonical(np.array(poly)))


def pentagon_region(p: "Pentagon") -> RateRegion:
    """``{0 <= R1 <= a, 0 <= R2 <= b, R1 + R2 <= c}`` as a vertex list."""
    a = max(min(p.a, p.c), 0.0)
    b = max(min(p.b, p.c), 0.0)
    c = max(min(p.c, a + b), 0.0)
    pts = [(0.0, 0.0), (a, 0.0), (a, c - a), (c - b, b), (0.0, b)]
    return RateRegion(_canonical(np.array(pts)))


@dataclass(frozen=True)
class Pentagon:
    """Individual bounds ``a`` (R1), ``b`` (R2) and sum bound ``c``.

    ``i1`` and ``i2`` optionally carry the unconditioned informations ``I(X1;B)``
    and ``I(X2;B)`` needed for the successive-decoding corner points.
    """

    a: float
    b: float
    c: float
    i1: float | None = None
    i2: float | None = None

    @classmethod
    def from_informations(cls, i1_given2: float, i2_given1: float, i12: float,
                          i1: float | None = None, i2: float | None = None,
                          tol: float = 1e-9) -> "Pentagon":
        """Build from MAC informations, enforcing ``max(a, b) <= c <= a + b``."""
        a, b, c = float(i1_given2), float(i2_given1), float(i12)
        if min(a, b) < -tol:
            raise ValidationError(f"negative individual bound (a={a}, b={b})")
        if c < max(a, b) - tol or c > a + b + tol:
            raise ValidationError(f"inconsistent MAC informations: a={a}, b={b}, c={c}")
        return cls(max(a, 0.0), max(b, 0.0), c, i1, i2)

    def region(self) -> RateRegion:
        return pentagon_region(self)


def corner_points(p: Pentagon, tol: float = 1e-9) -> tuple[RatePoint, RatePoint]:
    """Successive-decoding vertices ``alpha`` (decode m1 first) and ``beta`` (m2 first)."""
    if p.i1 is None or p.i2 is None:
        raise ValueError("corner_points needs a pentagon carrying i1 = I(X1;B) and i2 = I(X2;B)")
    if p.i1 > p.a + tol or p.i2 > p.b + tol:
        raise ValidationError(
            f"marginal information exceeds its conditional counterpart (I(X1;B)={p.i1} vs {p.a}, "
            f"I(X2;B)={p.i2} vs {p.b})"
        )
    alpha = RatePoint(p.i1, max(p.c - p.i1, 0.0))
    beta = RatePoint(max(p.c - p.i2, 0.0), p.i2)
    return alpha, beta


def convex_hull(points: Iterable, closure: bool = True) -> RateRegion:
    """Convex hull of rate points; with ``closure`` also of their axis projections.

    The closure adds ``(r1, 0)``, ``(0, r2)`` and ``(0, 0)`` for every point, which is
    the free rate reduction available to any code.
    """
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    pts = pts.reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("convex_hull needs at least one point")
    if closure:
        pts = np.clip(pts, 0.0, None)
        zeros = np.zeros(len(pts))
        pts = np.concatenate([pts, np.column_stack([pts[:, 0], zeros]),
                              np.column_stack([zeros, pts[:, 1]]), [[0.0, 0.0]]])
    return RateRegion(_canonical(pts))


def union_hull(regions: Iterable[RateRegion]) -> RateRegion:
    """Time-sharing hull of a family of regions."""
    vs = [r.vertices for r in regions]
    if not vs:
        raise ValueError("union_hull needs at least one region")
    return convex_hull(np.concatenate(vs))


def intersect(a: RateRegion, b: RateRegion) -> RateRegion:
    """Intersection of two convex regions; an empty result collapses to the origin."""
    res = clip_halfplanes(list(a.vertices), b.halfplanes())
    if res is None:
        return RateRegion(np.zeros((1, 2)))
    return res


def halfplane_region(constraints: Iterable[tuple], box: float | None = None) -> RateRegion:
    """Polygon ``{r : n . r <= c for all constraints}`` in the nonnegative quadrant.

    Infeasible systems yield the single point ``(0, 0)``.
    """
    constraints = [(np.asarray(n, dtype=float), float(c)) for n, c in constraints]
    if box is None:
        box = 1.0 + sum(abs(c) for _, c in constraints)
    start = [np.array(p) for p in ((0.0, 0.0), (box, 0.0), (box, box), (0.0, box))]
    res = clip_halfplanes(start, constraints)
    if res is None:
        return RateRegion(np.zeros((1, 2)))
    return res


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(max(float((p - a) @ ab) / denom, 0.0), 1.0)
    return float(np.hypot(*(p - (a + t * ab))))


def distance_outside(r: RateRegion, p) -> float:
    """Euclidean distance from ``p`` to the region (0 inside)."""
    p = np.asarray(p, dtype=float)
    v = r.vertices
    k = len(v)
    if k >= 3:
        inside = all(_cross(v[i], v[(i + 1) % k], p) >= 0 for i in range(k))
        if inside:
            return 0.0
    if k == 1:
        return float(np.hypot(*(p - v[0])))
    return min(_segment_distance(p, v[i], v[(i + 1) % k]) for i in range(k))


def contains(r: RateRegion, p, tol: float = CONTAINS_TOL) -> bool:
    """Point membership with tolerance ``tol`` (distance to the polygon)."""
    p = np.asarray(p, dtype=float)
    v = r.vertices
    k = len(v)
    if k >= 3:
        for i in range(k):
            a, b = v[i], v[(i + 1) % k]
            length = np.hypot(*(b - a))
            if _cross(a, b, p) < -tol * length:
                return False
        return True
    return distance_outside(r, p) <= tol


def contains_many(r: RateRegion, pts, tol: float = CONTAINS_TOL) -> np.ndarray:
    """Vectorised membership for an ``(m, 2)`` array of points."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    v = r.vertices
    if len(v) < 3:
        return np.array([contains(r, p, tol) for p in pts], dtype=bool)
    ok = np.ones(len(pts), dtype=bool)
    for n, c in _halfplanes(v):
        ok &= pts @ n <= c + tol
    return ok


def same_region(a: RateRegion, b: RateRegion, tol: float = 1e-9) -> bool:
    """Vertex lists agree coordinate-wise within ``tol``."""
    return a.vertices.shape == b.vertices.shape and bool(np.all(np.abs(a.vertices - b.vertices) <= tol))


def hausdorff(a: RateRegion, b: RateRegion) -> float:
    """Hausdorff distance between two convex polygons (attained at vertices)."""
    d1 = max(distance_outside(b, p) for p in a.vertices)
    d2 = max(distance_outside(a, p) for p in b.vertices)
    return max(d1, d2)


def grid_points(bounds: tuple[float, float], size: int = 100) -> np.ndarray:
    """``size x size`` sample grid over ``[0, b1] x [0, b2]``."""
    xs = np.linspace(0.0, bounds[0], size)
    ys = np.linspace(0.0, bounds[1], size)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def subset_by_sampling(inner: RateRegion, outer: RateRegion, size: int = 100, tol: float = 1e-6) -> bool:
    """Every grid sample inside ``inner`` is inside ``outer`` (and every inner vertex)."""
    b = np.maximum(inner.bounds(), outer.bounds())
    pts = grid_points((float(b[0]), float(b[1])), size)
    m_in = contains_many(inner, pts, tol=0.0)
    m_out = contains_many(outer, pts, tol=tol)
    verts_ok = all(distance_outside(outer, v) <= tol for v in inner.vertices)
    return bool(np.all(m_out[m_in])) and verts_ok


# ------------------------------------------------------------------ CSV output

def _fmt(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def region_to_csv(r: RateRegion) -> str:
    buf = io.StringIO()
    buf.write("R1,R2\n")
    for x, y in r.vertices:
        buf.write(f"{_fmt(x)},{_fmt(y)}\n")
    return buf.getvalue()


def region_from_csv(text: str) -> RateRegion:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "R1,R2":
        raise ValidationError("region CSV must start with header 'R1,R2'")
    pts = [tuple(float(t) for t in ln.split(",")) for ln in lines[1:]]
    return RateRegion(np.array(pts))
