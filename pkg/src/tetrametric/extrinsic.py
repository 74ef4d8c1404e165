"""Chord (straight-line) size measures of the tetrahedron surface.

The farthest surface point from any fixed point is a vertex, because the
chord distance to a point of a flat face or edge is maximized at one of its
corners.  Consequently the chord diameter is the longest edge, and the chord
eccentricity of a surface point is its largest distance to the four
vertices.  The chord radius minimizes that eccentricity over the surface;
restricted to one face the objective is a maximum of four convex distance
cones, so each face carries a unique minimum.  A projected subgradient
drive with a shrinking Polyak gap locates it, and a finite enumeration of
the stationary candidates (vertex feet, equal-distance line feet, and their
crossings with the face boundary) then sharpens it to machine precision.
"""

from dataclasses import dataclass
import math

from .geometry import (DEFAULT_CFG, EDGES, SurfacePoint, dist3, face_point)

__all__ = [
    "FarthestSet",
    "ChordDiameter",
    "ChordRadius",
    "extrinsic_diameter",
    "extrinsic_radius_at",
    "extrinsic_radius",
]


@dataclass(frozen=True)
class FarthestSet:
    """Largest chord distance from a fixed surface point, with its witnesses.

    vertices lists every vertex id attaining the maximum within
    geom_tol * diam of the instance it was computed on.
    """

    distance: float
    vertices: tuple

    def to_json(self):
        return {"distance": self.distance, "vertices": list(self.vertices)}


@dataclass(frozen=True)
class ChordDiameter:
    """Longest chord of the surface: an edge, reported with its endpoints."""

    value: float
    pair: tuple


@dataclass(frozen=True)
class ChordRadius:
    """Smallest chord eccentricity over the surface and where it is attained."""

    value: float
    center: SurfacePoint
    farthest: FarthestSet


def extrinsic_diameter(T):
    """Longest chord between two surface points.

    Both endpoints of a longest chord are vertices, so this is the longest
    edge; ties break toward the lowest edge index.
    """
    i = T.longest_edge
    return ChordDiameter(T.edge_lengths[i], EDGES[i])


def extrinsic_radius_at(T, x, cfg=DEFAULT_CFG):
    """Largest chord distance from surface point x, with attaining vertices."""
    p = T.xyz(x)
    ds = [dist3(p, T.vertices[v]) for v in range(4)]
    top = max(ds)
    slack = cfg.geom_tol * T.diam
    verts = tuple(v for v in range(4) if ds[v] >= top - slack)
    return FarthestSet(top, verts)


# ---------------------------------------------------------------------------
# per-face minimization

def _face_sites(T, f):
    """Chart projections (qx, qy) and squared heights of all 4 vertices.

    The chart is the isometric 2D frame of face f used by face_frames, so
    bary_from_frame2 applies to chart points directly.
    """
    from .geometry import FACES, _sub3, _dot3, _cross3, _norm3

    p_ids = FACES[f]
    origin = T.vertices[p_ids[0]]
    d1 = _sub3(T.vertices[p_ids[1]], origin)
    d2 = _sub3(T.vertices[p_ids[2]], origin)
    n = _cross3(d1, d2)
    nn = _norm3(n)
    n = (n[0] / nn, n[1] / nn, n[2] / nn)
    l1 = _norm3(d1)
    e1 = (d1[0] / l1, d1[1] / l1, d1[2] / l1)
    e2 = _cross3(n, e1)
    sites = []
    for v in range(4):
        d = _sub3(T.vertices[v], origin)
        h = _dot3(d, n)
        sites.append((_dot3(d, e1), _dot3(d, e2), h * h))
    return sites


def _ecc(p, sites):
    """max_v sqrt(|p - q_v|^2 + h_v^2) at chart point p."""
    best = 0.0
    for (qx, qy, h2) in sites:
        dx, dy = p[0] - qx, p[1] - qy
        d2 = dx * dx + dy * dy + h2
        if d2 > best:
            best = d2
    return math.sqrt(best)


def _closest_in_triangle(p, tri):
    """Closest point of a 2D triangle to p (corner/edge/interior cases)."""
    a, b, c = tri
    ab = (b[0] - a[0], b[1] - a[1])
    ac = (c[0] - a[0], c[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    d1 = ab[0] * ap[0] + ab[1] * ap[1]
    d2 = ac[0] * ap[0] + ac[1] * ap[1]
    if d1 <= 0.0 and d2 <= 0.0:
        return a
    bp = (p[0] - b[0], p[1] - b[1])
    d3 = ab[0] * bp[0] + ab[1] * bp[1]
    d4 = ac[0] * bp[0] + ac[1] * bp[1]
    if d3 >= 0.0 and d4 <= d3:
        return b
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        t = d1 / (d1 - d3)
        return (a[0] + t * ab[0], a[1] + t * ab[1])
    cp = (p[0] - c[0], p[1] - c[1])
    d5 = ab[0] * cp[0] + ab[1] * cp[1]
    d6 = ac[0] * cp[0] + ac[1] * cp[1]
    if d6 >= 0.0 and d5 <= d6:
        return c
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        t = d2 / (d2 - d6)
        return (a[0] + t * ac[0], a[1] + t * ac[1])
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return (b[0] + t * (c[0] - b[0]), b[1] + t * (c[1] - b[1]))
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return (a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w)


def _subgradient_drive(tri, sites, scale, opt_tol):
    """Projected subgradient with Polyak step on a shrinking optimality gap.

    The gap estimate gamma halves on each restart from the incumbent; the
    convexity of the objective makes the incumbent monotone.
    """
    p = ((tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
         (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0)
    best_p, best = p, _ecc(p, sites)
    gamma = 0.25 * scale
    floor = 0.5 * opt_tol * scale
    while gamma > floor:
        for _ in range(40):
            val = 0.0
            gx = gy = 0.0
            for (qx, qy, h2) in sites:
                dx, dy = p[0] - qx, p[1] - qy
                d = math.sqrt(dx * dx + dy * dy + h2)
                if d > val:
                    val, gx, gy = d, dx, dy
            if val < best:
                best, best_p = val, p
            g2 = gx * gx + gy * gy
            if g2 <= 0.0:
                return best_p, best
            step = (val - (best - gamma)) / g2
            p = _closest_in_triangle((p[0] - step * gx, p[1] - step * gy), tri)
        gamma *= 0.5
        p = best_p
    return best_p, best


def _plane_candidates(sites, scale):
    """Stationary points of the eccentricity over the whole chart plane.

    Covers active sets of size 1 (foot of a vertex), 2 (foot of the shared
    center line on the equal-distance line), and 3 (equal-distance point of
    the triple); a fourfold tie is an equal-distance point of its triples.
    """
    cands = [(q[0], q[1]) for q in sites]
    n = len(sites)
    rows = {}
    for u in range(n):
        qu = sites[u]
        for v in range(u + 1, n):
            qv = sites[v]
            dx, dy = qv[0] - qu[0], qv[1] - qu[1]
            # equal distance: 2 p . (q_v - q_u) = (|q_v|^2 + h_v^2) - (|q_u|^2 + h_u^2)
            c = (qv[0] * qv[0] + qv[1] * qv[1] - qu[0] * qu[0] - qu[1] * qu[1]
                 + qv[2] - qu[2])
            rows[(u, v)] = (2.0 * dx, 2.0 * dy, c)
            d2 = dx * dx + dy * dy
            if d2 <= (1e-12 * scale) ** 2:
                continue
            t = (0.5 * c - (qu[0] * dx + qu[1] * dy)) / d2
            cands.append((qu[0] + t * dx, qu[1] + t * dy))
    for u in range(n):
        for v in range(u + 1, n):
            a1, b1, c1 = rows[(u, v)]
            for w in range(v + 1, n):
                a2, b2, c2 = rows[(u, w)]
                det = a1 * b2 - a2 * b1
                if abs(det) <= 1e-12 * scale * scale:
                    continue
                cands.append(((c1 * b2 - c2 * b1) / det,
                              (a1 * c2 - a2 * c1) / det))
    return cands, rows


def _edge_candidates(tri, sites, rows, scale):
    """Breakpoints and per-site minima of the eccentricity on the boundary."""
    cands = []
    for i in range(3):
        a, b = tri[i], tri[(i + 1) % 3]
        dirx, diry = b[0] - a[0], b[1] - a[1]
        len2 = dirx * dirx + diry * diry
        ts = [0.0, 1.0]
        for (qx, qy, _h2) in sites:
            t = ((qx - a[0]) * dirx + (qy - a[1]) * diry) / len2
            if 0.0 < t < 1.0:
                ts.append(t)
        for (ca, cb, cc) in rows.values():
            denom = ca * dirx + cb * diry
            if abs(denom) <= 1e-12 * scale:
                continue
            t = (cc - (ca * a[0] + cb * a[1])) / denom
            if 0.0 < t < 1.0:
                ts.append(t)
        cands.extend((a[0] + t * dirx, a[1] + t * diry) for t in ts)
    return cands


def _face_minimum(T, f, cfg):
    """Unique minimizer of the chord eccentricity restricted to face f."""
    tri = T.face_frames[f]
    sites = _face_sites(T, f)
    scale = T.diam
    best_p, best = _subgradient_drive(tri, sites, scale, cfg.opt_tol)
    plane, rows = _plane_candidates(sites, scale)
    pool = [best_p]
    pool.extend(_closest_in_triangle(p, tri) for p in plane)
    pool.extend(_edge_candidates(tri, sites, rows, scale))
    for p in pool:
        val = _ecc(p, sites)
        if val < best:
            best, best_p = val, p
    return best, best_p


def extrinsic_radius(T, cfg=DEFAULT_CFG):
    """Smallest chord eccentricity over the surface.

    The objective is convex on each face, so the global minimum is the best
    of the four per-face minima; ties break toward the lowest face index.
    The exact per-plane candidates are projected into the face, so interior
    stationary points outside the face fall back to their boundary minima.
    """
    best = None
    for f in range(4):
        val, p2 = _face_minimum(T, f, cfg)
        if best is None or val < best[0]:
            best = (val, f, p2)
    val, f, p2 = best
    bary = T.bary_from_frame2(f, p2)
    clipped = [max(x, 0.0) for x in bary]
    s = clipped[0] + clipped[1] + clipped[2]
    center = face_point(f, tuple(x / s for x in clipped))
    fs = extrinsic_radius_at(T, center, cfg)
    return ChordRadius(fs.distance, center, fs)
