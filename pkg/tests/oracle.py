"""Independent classical reference implementation used as a test oracle.

Everything here works on classical probability tables with Shannon
formulas and shares no code with the package: entropies come from explicit
joint distributions, hulls from scipy's Qhull, and HK polygons from
brute-force intersection of constraint lines.
"""

import itertools

import numpy as np
from scipy.spatial import ConvexHull, QhullError


def H(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 1e-300]
    return float(-(p * np.log2(p)).sum())


def marginal(joint, keep):
    drop = tuple(i for i in range(joint.ndim) if i not in keep)
    return joint.sum(axis=drop) if drop else joint


def cmi(joint, t, y, c=()):
    """I(T; Y | C) for axis tuples of a joint pmf."""
    t, y, c = tuple(t), tuple(y), tuple(c)
    return (H(marginal(joint, t + c)) + H(marginal(joint, y + c))
            - H(marginal(joint, t + y + c)) - (H(marginal(joint, c)) if c else 0.0))


def ic_joint(table, p1, p2):
    """Joint pmf over axes (X1, X2, Y1, Y2)."""
    return np.einsum("i,j,ijab->ijab", p1, p2, table)


def mac_joint(table, p1, p2, receiver):
    j = ic_joint(table, p1, p2)
    return j.sum(axis=3) if receiver == 1 else j.sum(axis=2)


X1, X2, Y1, Y2 = 0, 1, 2, 3


def ic_infos(table, p1, p2):
    j = ic_joint(table, p1, p2)
    out = {}
    for k, y in ((1, (Y1,)), (2, (Y2,))):
        out[f"i1_b{k}_x2"] = cmi(j, (X1,), y, (X2,))
        out[f"i2_b{k}_x1"] = cmi(j, (X2,), y, (X1,))
        out[f"i12_b{k}"] = cmi(j, (X1, X2), y)
        out[f"i1_b{k}"] = cmi(j, (X1,), y)
        out[f"i2_b{k}"] = cmi(j, (X2,), y)
    out["i12_b12"] = cmi(j, (X1, X2), (Y1, Y2))
    return out


# ----------------------------------------------------------------- geometry

def prune(vertices, tol=1e-9):
    """Drop vertices within ``tol`` of the chord joining their neighbours."""
    v = [np.asarray(x, dtype=float) for x in vertices]
    changed = True
    while changed and len(v) > 2:
        changed = False
        for i in range(len(v)):
            o, a, p = v[i - 1], v[i], v[(i + 1) % len(v)]
            span = np.hypot(*(p - o))
            d = np.hypot(*(a - o)) if span == 0 else abs((a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])) / span
            if d <= tol:
                del v[i]
                changed = True
                break
    return np.array(v)


def hull(points):
    """Downward-closed convex hull vertices (no particular order, pruned)."""
    pts = np.clip(np.asarray(points, dtype=float).reshape(-1, 2), 0, None)
    z = np.zeros(len(pts))
    pts = np.vstack([pts, np.c_[pts[:, 0], z], np.c_[z, pts[:, 1]], [[0.0, 0.0]]])
    pts = np.unique(np.round(pts, 12), axis=0)
    mx1, mx2 = pts[:, 0].max(), pts[:, 1].max()
    if mx1 <= 1e-12 and mx2 <= 1e-12:
        return np.zeros((1, 2))
    if mx2 <= 1e-12:
        return np.array([[0.0, 0.0], [mx1, 0.0]])
    if mx1 <= 1e-12:
        return np.array([[0.0, 0.0], [0.0, mx2]])
    try:
        h = ConvexHull(pts)
    except QhullError:
        h = ConvexHull(pts, qhull_options="QJ")
    return prune(pts[h.vertices])


def pentagon_vertices(a, b, c):
    a, b = min(a, c), min(b, c)
    c = min(c, a + b)
    return [(0, 0), (a, 0), (a, c - a), (c - b, b), (0, b)]


def halfplane_vertices(coeffs, rhs):
    """Vertices of {r >= 0 : coeffs . r <= rhs} by brute-force line intersection."""
    rows = [np.asarray(c, dtype=float) for c in coeffs] + [np.array([-1.0, 0.0]), np.array([0.0, -1.0])]
    vals = list(rhs) + [0.0, 0.0]
    pts = []
    for i, j in itertools.combinations(range(len(rows)), 2):
        m = np.array([rows[i], rows[j]])
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        x = np.linalg.solve(m, [vals[i], vals[j]])
        if all(r @ x <= v + 1e-10 for r, v in zip(rows, vals)):
            pts.append(x)
    return pts if pts else [np.zeros(2)]


def same_vertices(a, b, tol=1e-9):
    """Every vertex of each set has a partner in the other within ``tol`` per coordinate."""
    a, b = np.asarray(a, dtype=float).reshape(-1, 2), np.asarray(b, dtype=float).reshape(-1, 2)

    def covered(x, y):
        return all(np.min(np.max(np.abs(y - p), axis=1)) <= tol for p in x)

    return covered(a, b) and covered(b, a)


# ------------------------------------------------------------------ regions

def mac_region(table, receiver, pairs):
    pts = []
    for p1, p2 in pairs:
        j = mac_joint(table, p1, p2, receiver)
        a = cmi(j, (0,), (2,), (1,))
        b = cmi(j, (1,), (2,), (0,))
        c = cmi(j, (0, 1), (2,))
        pts += pentagon_vertices(a, b, c)
    return hull(pts)


def very_strong_region(table, pairs):
    pts = []
    for p1, p2 in pairs:
        v = ic_infos(table, p1, p2)
        pts.append((v["i1_b1_x2"], v["i2_b2_x1"]))
    return hull(pts)


def strong_region(table, pairs):
    pts = []
    for p1, p2 in pairs:
        v = ic_infos(table, p1, p2)
        pts += pentagon_vertices(v["i1_b1_x2"], v["i2_b2_x1"], min(v["i12_b1"], v["i12_b2"]))
    return hull(pts)


def sato_region(table, pairs):
    pts = []
    for p1, p2 in pairs:
        v = ic_infos(table, p1, p2)
        pts += pentagon_vertices(v["i1_b1_x2"], v["i2_b2_x1"], v["i12_b12"])
    return hull(pts)


def successive_points(table, p1, p2):
    v = ic_infos(table, p1, p2)
    # all four ordering pairs, written out case by case
    return [
        (v["i1_b1"], v["i2_b2"]),                                        # each decodes only its own
        (min(v["i1_b1"], v["i1_b2"]), v["i2_b2_x1"]),                   # rx2 decodes m1 first
        (v["i1_b1_x2"], min(v["i2_b1"], v["i2_b2"])),                    # rx1 decodes m2 first
        (min(v["i1_b1_x2"], v["i1_b2"]), min(v["i2_b1"], v["i2_b2_x1"])),  # both decode the interferer first
    ]


def hk_joint(table, hk):
    """Joint pmf over (U1, W1, U2, W2, Y1, Y2)."""
    pU1, pW1, pU2, pW2, f1, f2 = hk
    cond = table[np.asarray(f1)[:, :, None, None], np.asarray(f2)[None, None, :, :]]
    return np.einsum("a,b,c,d,abcdxy->abcdxy", pU1, pW1, pU2, pW2, cond)


U1, W1, U2, W2, B1, B2 = range(6)


def hk_rhs(table, hk):
    j = hk_joint(table, hk)
    i = lambda t, y, c=(): cmi(j, t, (y,), c)
    return [
        i((U1, W1), B1, (W2,)),
        i((U1,), B1, (W1, W2)) + i((W1,), B2, (U2, W2)),
        i((U2, W2), B2, (W1,)),
        i((W2,), B1, (U1, W1)) + i((U2,), B2, (W1, W2)),
        i((U1, W1, W2), B1) + i((U2,), B2, (W1, W2)),
        i((U1,), B1, (W1, W2)) + i((U2, W2, W1), B2),
        i((U1, W2), B1, (W1,)) + i((U2, W1), B2, (W2,)),
        i((U1,), B1, (W1, W2)) + i((U2, W1), B2, (W2,)) + i((U1, W1, W2), B1),
        i((U1, W2), B1, (W1,)) + i((U2,), B2, (W1, W2)) + i((U2, W2, W1), B2),
    ]


HK_COEFFS = [(1, 0), (1, 0), (0, 1), (0, 1), (1, 1), (1, 1), (1, 1), (2, 1), (1, 2)]


def hk_region(table, inputs):
    pts = []
    for hk in inputs:
        pts += halfplane_vertices(HK_COEFFS, hk_rhs(table, hk))
    return hull(pts)


def sd_rs_points(table, hk):
    j = hk_joint(table, hk)
    rx1 = {"1p": U1, "1c": W1, "2c": W2}
    rx2 = {"2p": U2, "2c": W2, "1c": W1}
    pts = []
    for o1 in itertools.permutations(rx1):
        r1 = {}
        for k, tag in enumerate(o1):
            r1[tag] = cmi(j, (rx1[tag],), (B1,), tuple(rx1[t] for t in o1[:k]))
        for o2 in itertools.permutations(rx2):
            r2 = {}
            for k, tag in enumerate(o2):
                r2[tag] = cmi(j, (rx2[tag],), (B2,), tuple(rx2[t] for t in o2[:k]))
            pts.append((r1["1p"] + min(r1["1c"], r2["1c"]), min(r1["2c"], r2["2c"]) + r2["2p"]))
    return pts


def sd_rs_region(table, inputs):
    return hull([p for hk in inputs for p in sd_rs_points(table, hk)])


def simplex(k, step):
    n = round(1 / step)
    out = []
    for parts in itertools.product(range(n + 1), repeat=k):
        if sum(parts) == n:
            out.append(np.array(parts, dtype=float) / n)
    return out
