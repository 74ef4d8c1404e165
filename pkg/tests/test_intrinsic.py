"""Star unfoldings, cut loci, and intrinsic diameter/radius extraction."""

import math

import pytest

from tetrametric import (Triangle2, cut_locus, edge_point, face_point,
                         geodesic_distance, intrinsic_diameter,
                         intrinsic_radius, intrinsic_radius_at,
                         make_isosceles, make_normal_eps_thick, make_regular,
                         normalize, random_tetrahedron, source_unfold,
                         star_unfold, triangle_is_acute, vertex_point)

REG = normalize(make_regular(1.0))
DIAM_REG = 2.0 / math.sqrt(3.0)

# closed-form oracle for the (5,6,7) opposite-pairs shape: every vertex has
# angle sum pi, so the star unfolding from a vertex is the doubled triangle
# with sides (10, 12, 14) and the farthest distance from the vertex is that
# triangle's circumradius abc/(4K)
_A, _B, _C = 10.0, 12.0, 14.0
_S = (_A + _B + _C) / 2.0
_K = math.sqrt(_S * (_S - _A) * (_S - _B) * (_S - _C))
ISO_FAR = _A * _B * _C / (4.0 * _K)


def _tree_ok(locus, expect_leaves):
    """The locus must be a connected tree whose leaves are expect_leaves."""
    n = len(locus.nodes)
    assert len(locus.arcs) == n - 1
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for arc in locus.arcs:
        a, b = (find(x) for x in arc.nodes)
        assert a != b  # an equal root here would mean a cycle
        parent[a] = b
    assert len({find(i) for i in range(n)}) == 1
    leaves = sorted(locus.nodes[i].vertex for i in locus.leaves())
    assert leaves == sorted(expect_leaves)


# ---------------------------------------------------------------------------
# star unfoldings

def test_star_regular_vertex_is_doubled_triangle():
    star = star_unfold(REG, vertex_point(0))
    poly = star.reduced_polygon(tol=1e-7)
    assert len(poly) == 3
    sides = sorted(math.dist(poly[i], poly[(i + 1) % 3]) for i in range(3))
    for s in sides:
        assert s == pytest.approx(2.0, abs=1e-9)
    assert star.area() == pytest.approx(math.sqrt(3.0), abs=1e-9)


def test_star_isosceles_vertices_acute_triangles():
    T = make_isosceles(5.0, 6.0, 7.0)
    for v in range(4):
        star = star_unfold(T, vertex_point(v))
        poly = star.reduced_polygon(tol=1e-7)
        assert len(poly) == 3
        sides = sorted(math.dist(poly[i], poly[(i + 1) % 3]) for i in range(3))
        assert sides[0] == pytest.approx(10.0, abs=1e-9)
        assert sides[1] == pytest.approx(12.0, abs=1e-9)
        assert sides[2] == pytest.approx(14.0, abs=1e-9)
        assert triangle_is_acute(Triangle2(poly[0], poly[1], poly[2]))
        assert star.area() == pytest.approx(4.0 * _K / 4.0, rel=1e-9)


def test_star_gluing_lengths():
    T = normalize(random_tetrahedron(2))
    x = face_point(1, (0.3, 0.45, 0.25))
    star = star_unfold(T, x)
    m = len(star.images)
    assert m == 4  # one cut per vertex from an interior source
    for k in range(m):
        left = math.dist(star.images[k], star.corners[k])
        right = math.dist(star.images[(k + 1) % m], star.corners[k])
        assert left == pytest.approx(star.cuts[k].length, abs=1e-9)
        assert right == pytest.approx(star.cuts[k].length, abs=1e-9)


def test_star_area_is_surface_area(cfg):
    for seed in (0, 1, 2):
        T = normalize(random_tetrahedron(seed))
        surf = sum(T.face_areas)
        star = star_unfold(T, face_point(0, (0.4, 0.35, 0.25)))
        assert star.area() == pytest.approx(surf, rel=1e-9)


def test_source_unfold_tiles():
    T = normalize(random_tetrahedron(4))
    src = source_unfold(T, face_point(2, (0.5, 0.3, 0.2)))
    # the cells tile the development: areas add up to the surface area

    def shoelace(poly):
        return 0.5 * abs(sum(p[0] * q[1] - q[0] * p[1]
                             for p, q in zip(poly, poly[1:] + poly[:1])))

    total = sum(shoelace(list(c)) for c in src.cells if len(c) >= 3)
    assert total == pytest.approx(sum(T.face_areas), rel=1e-6)
    # every cell corner lies within the farthest distance from the source
    far = intrinsic_radius_at(T, src.star.source).value
    assert src.radius() <= far + 1e-6 * T.diam


# ---------------------------------------------------------------------------
# cut loci

def test_cut_locus_regular_vertex_is_symmetric_y():
    locus = cut_locus(REG, vertex_point(0))
    _tree_ok(locus, [1, 2, 3])
    juncs = locus.junctions()
    assert len(juncs) == 1
    node = locus.nodes[juncs[0]]
    assert node.distance == pytest.approx(DIAM_REG, abs=1e-9)
    # the junction develops at the centroid of the opposite face
    want = REG.xyz(face_point(0, (1 / 3, 1 / 3, 1 / 3)))
    got = REG.xyz(node.surface)
    assert math.dist(got, want) <= 1e-6


def test_cut_locus_random_sources_are_trees():
    for seed in range(5):
        T = normalize(random_tetrahedron(seed))
        for v in range(4):
            locus = cut_locus(T, vertex_point(v))
            _tree_ok(locus, [w for w in range(4) if w != v])
    # interior sources see all four vertices as leaves
    T = normalize(random_tetrahedron(6))
    locus = cut_locus(T, face_point(0, (0.5, 0.3, 0.2)))
    _tree_ok(locus, [0, 1, 2, 3])


def test_cut_locus_bisector_residuals():
    T = normalize(random_tetrahedron(0))
    locus = cut_locus(T, vertex_point(1))
    scale = T.diam
    for arc in locus.arcs:
        si = locus.star.images[arc.images[0]]
        sj = locus.star.images[arc.images[1]]
        for s in range(1, 5):
            p = arc.point_at(s / 5.0)
            di = math.dist(p, si)
            dj = math.dist(p, sj)
            assert abs(di - dj) <= 1e-6 * scale


def test_cut_locus_junction_spread():
    for seed in (0, 3):
        T = normalize(random_tetrahedron(seed))
        locus = cut_locus(T, vertex_point(0))
        for i in locus.junctions():
            assert locus.nodes[i].spread <= 1e-6 * T.diam


def test_cut_locus_symmetric_interior_source():
    # a maximally symmetric source must still produce a well-formed tree
    locus = cut_locus(REG, face_point(0, (1 / 3, 1 / 3, 1 / 3)))
    _tree_ok(locus, [0, 1, 2, 3])
    assert locus.radius() == pytest.approx(DIAM_REG, abs=1e-6)


# ---------------------------------------------------------------------------
# farthest-point distances

def test_radius_at_regular_vertex():
    aset = intrinsic_radius_at(REG, vertex_point(0))
    assert aset.value == pytest.approx(DIAM_REG, abs=1e-9)
    want = REG.xyz(face_point(0, (1 / 3, 1 / 3, 1 / 3)))
    assert min(math.dist(REG.xyz(p), want) for p in aset.points) <= 1e-6


def test_radius_at_regular_edge_midpoint():
    aset = intrinsic_radius_at(REG, edge_point(0, 1, 0.5))
    assert aset.value == pytest.approx(1.0, abs=1e-9)
    want = REG.xyz(edge_point(2, 3, 0.5))
    assert min(math.dist(REG.xyz(p), want) for p in aset.points) <= 1e-6


def test_radius_at_isosceles_vertices_circumradius():
    T = make_isosceles(5.0, 6.0, 7.0)
    for v in range(4):
        aset = intrinsic_radius_at(T, vertex_point(v))
        assert aset.value == pytest.approx(ISO_FAR, abs=1e-9)


def test_radius_at_thin_long_edge_midpoint():
    T = make_normal_eps_thick(0.01)
    m = edge_point(0, 1, 0.5)
    aset = intrinsic_radius_at(T, m)
    # the farthest points are the long edge's endpoints, half an edge away
    assert aset.value == pytest.approx(0.5, abs=2e-3)
    ends = [T.xyz(vertex_point(0)), T.xyz(vertex_point(1))]
    for p in aset.points:
        assert min(math.dist(T.xyz(p), e) for e in ends) <= 2e-2


# ---------------------------------------------------------------------------
# diameter

def test_diameter_regular():
    res = intrinsic_diameter(REG)
    assert res.value == pytest.approx(DIAM_REG, abs=1e-6)
    assert res.multiplicity == 3
    p, q = res.pair
    d, _ = geodesic_distance(REG, p, q)
    assert d == pytest.approx(res.value, abs=1e-9)
    # the witness is a vertex against the centroid of its opposite face
    supports = sorted(len(s.support()) for s in (p, q))
    assert supports == [1, 3]


def test_diameter_isosceles_closed_form():
    T = make_isosceles(5.0, 6.0, 7.0)
    res = intrinsic_diameter(T)
    assert res.value == pytest.approx(ISO_FAR, rel=1e-9)


def test_diameter_dominates_sampled_pairs():
    for seed in (0, 5):
        T = normalize(random_tetrahedron(seed))
        res = intrinsic_diameter(T)
        for k in range(12):
            p = face_point(k % 4, (0.2 + 0.05 * (k % 5), 0.3, 0.5 - 0.05 * (k % 5)))
            q = face_point((k + 1) % 4, (0.25, 0.35 + 0.04 * (k % 7), 0.4 - 0.04 * (k % 7)))
            d, _ = geodesic_distance(T, p, q)
            assert d <= res.value + 1e-9


def test_diameter_thin_approaches_long_edge():
    T = make_normal_eps_thick(0.01)
    res = intrinsic_diameter(T)
    assert 1.0 - 1e-9 <= res.value <= 1.01


# ---------------------------------------------------------------------------
# radius

def test_radius_regular():
    res = intrinsic_radius(REG)
    assert res.value == pytest.approx(1.0, abs=1e-6)
    c = REG.xyz(res.center)
    mids = [REG.xyz(edge_point(a, b, 0.5)) for a, b in
            ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))]
    assert min(math.dist(c, m) for m in mids) <= 1e-3


def test_radius_thin():
    T = make_normal_eps_thick(0.01)
    res = intrinsic_radius(T)
    assert res.value == pytest.approx(0.5, abs=2e-3)
    # the center sits near the middle cross-section of the long edge
    assert abs(T.xyz(res.center)[0]) <= 2e-2


def test_radius_scaling():
    big = intrinsic_radius(make_regular(3.0))
    assert big.value == pytest.approx(3.0, abs=3e-6)
    bigd = intrinsic_diameter(make_regular(3.0))
    assert bigd.value == pytest.approx(3.0 * DIAM_REG, abs=3e-6)
