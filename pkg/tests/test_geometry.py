import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stitsim import DegenerateSplit, InvalidPolygon, Polygon
from stitsim.geometry import (
    Hyperplane,
    Segment,
    clip_segment,
    intrinsic_volumes,
    offset_interval,
    random_convex_polygon,
    rectangle,
    sample_uniform_point,
    split,
    support,
    vertex_count,
    width,
)


class TestPolygonValidation:
    def test_canonical_start_is_lexicographic_min(self):
        p = Polygon([(1, 1), (0, 1), (0, 0), (1, 0)])
        assert p.vertices[0] == (0.0, 0.0)

    def test_rejects_clockwise(self):
        with pytest.raises(InvalidPolygon):
            Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_rejects_too_few_vertices(self):
        with pytest.raises(InvalidPolygon):
            Polygon([(0, 0), (1, 0)])

    def test_rejects_nonconvex(self):
        with pytest.raises(InvalidPolygon):
            Polygon([(0, 0), (2, 0), (1, 0.1), (2, 2), (0, 2)])

    def test_drops_collinear_midpoints(self):
        p = Polygon([(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1)])
        assert vertex_count(p) == 4

    def test_rejects_nan(self):
        with pytest.raises(InvalidPolygon):
            Polygon([(0, 0), (1, 0), (float("nan"), 1)])

    def test_duplicate_vertices_deduped(self):
        p = Polygon([(0, 0), (1, 0), (1, 0), (1, 1), (0, 1)])
        assert vertex_count(p) == 4


class TestSplit:
    def test_vertical_bisection_of_square(self, unit_square):
        plus, minus, trace = split(unit_square, Hyperplane(0.0, 0.5))
        assert plus.area == pytest.approx(0.5, abs=1e-15)
        assert minus.area == pytest.approx(0.5, abs=1e-15)
        assert trace.length == pytest.approx(1.0, abs=1e-15)
        # plus side holds the larger x values (normal points along +x)
        assert all(x >= 0.5 - 1e-12 for x, _ in plus.vertices)

    def test_missing_line_returns_whole_cell(self, unit_square):
        plus, minus, trace = split(unit_square, Hyperplane(0.0, 2.0))
        assert plus is None
        assert minus is unit_square
        assert trace is None

    def test_diagonal_split_of_triangle(self, triangle):
        # line x + y = 0.5: small corner triangle has area 1/8, the rest 3/8
        plus, minus, trace = split(triangle, Hyperplane(math.pi / 4, math.sqrt(2) / 4))
        assert minus.area == pytest.approx(0.125, rel=1e-12)
        assert plus.area == pytest.approx(0.375, rel=1e-12)
        assert plus.area + minus.area == pytest.approx(triangle.area, rel=1e-12)

    def test_generic_chord_adds_two_vertices_per_piece(self, unit_square):
        plus, minus, _ = split(unit_square, Hyperplane(0.3, 0.4))
        assert vertex_count(plus) + vertex_count(minus) == 8

    def test_split_through_vertex_small_pieces(self, unit_square):
        # line through two opposite corners: both pieces are triangles
        plus, minus, trace = split(unit_square, Hyperplane(3 * math.pi / 4, 0.0))
        assert vertex_count(plus) == 3
        assert vertex_count(minus) == 3
        assert trace.length == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_snap_tolerance_absorbs_near_edge_line(self, unit_square):
        # within snap tolerance of the boundary: treated as a non-hitting line
        plus, minus, trace = split(unit_square, Hyperplane(0.0, 1e-16))
        assert (plus is None) != (minus is None)
        assert trace is None

    def test_sliver_raises_degenerate(self, unit_square):
        # corner cut with area ~1e-16, far below the sliver floor
        with pytest.raises(DegenerateSplit):
            split(unit_square, Hyperplane(math.pi / 4, 1e-8))


class TestSupportWidth:
    def test_square_axis(self, unit_square):
        assert support(unit_square, 0.0, +1) == pytest.approx(1.0)
        assert support(unit_square, 0.0, -1) == pytest.approx(0.0)

    def test_square_diagonal(self, unit_square):
        assert support(unit_square, math.pi / 4, +1) == pytest.approx(math.sqrt(2))
        assert width(unit_square, math.pi / 4) == pytest.approx(math.sqrt(2))

    def test_square_widths(self, unit_square):
        assert width(unit_square, 0.0) == pytest.approx(1.0)
        assert width(unit_square, math.pi / 2) == pytest.approx(1.0)

    def test_hitting_interval(self, unit_square):
        lo, hi = offset_interval(unit_square, 0.0)
        assert (lo, hi) == (0.0, 1.0)


class TestIntrinsicVolumes:
    def test_unit_square(self, unit_square):
        assert intrinsic_volumes(unit_square) == pytest.approx((1.0, 2.0, 1.0))

    def test_rectangle_2x3(self):
        r = rectangle(0, 0, 2, 3)
        assert intrinsic_volumes(r) == pytest.approx((1.0, 5.0, 6.0))

    def test_right_triangle(self, triangle):
        v0, v1, v2 = intrinsic_volumes(triangle)
        assert v0 == 1.0
        assert v1 == pytest.approx((2.0 + math.sqrt(2)) / 2.0)
        assert v2 == pytest.approx(0.5)


class TestUniformSampling:
    def test_square_mean(self, unit_square, rng):
        n = 100_000
        pts = np.array([sample_uniform_point(unit_square, rng) for _ in range(n)])
        sigma = (1.0 / math.sqrt(12.0)) / math.sqrt(n)
        assert abs(pts[:, 0].mean() - 0.5) < 3 * sigma
        assert abs(pts[:, 1].mean() - 0.5) < 3 * sigma

    def test_containment(self, rng):
        poly = random_convex_polygon(rng, n_points=7)
        for _ in range(500):
            assert poly.contains_point(sample_uniform_point(poly, rng))

    def test_triangle_corner_probability(self, triangle, rng):
        # P(x + y < 0.5) = 0.25 by similar triangles
        n = 50_000
        hits = sum(1 for _ in range(n) if sum(sample_uniform_point(triangle, rng)) < 0.5)
        sigma = math.sqrt(0.25 * 0.75 / n)
        assert abs(hits / n - 0.25) < 3 * sigma


def _random_hitting_line(poly, rng):
    theta = rng.random() * math.pi
    lo, hi = offset_interval(poly, theta)
    return Hyperplane(theta, lo + rng.random() * (hi - lo))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_split_additivity_and_perimeter(seed):
    rng = np.random.default_rng(seed)
    poly = random_convex_polygon(rng, n_points=int(rng.integers(4, 10)))
    h = _random_hitting_line(poly, rng)
    try:
        plus, minus, trace = split(poly, h)
    except DegenerateSplit:
        return
    if plus is None or minus is None:
        return
    assert abs(plus.area + minus.area - poly.area) <= 1e-12 * poly.area
    assert abs(
        plus.perimeter + minus.perimeter - poly.perimeter - 2 * trace.length
    ) <= 1e-10 * max(1.0, poly.perimeter)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_split_vertex_bound_and_convexity(seed):
    rng = np.random.default_rng(seed)
    poly = random_convex_polygon(rng, n_points=int(rng.integers(4, 10)))
    n = vertex_count(poly)
    h = _random_hitting_line(poly, rng)
    try:
        plus, minus, _ = split(poly, h)
    except DegenerateSplit:
        return
    for piece in (plus, minus):
        if piece is not None:
            assert vertex_count(piece) <= n + 2
            Polygon(piece.vertices)  # revalidates convexity


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_width_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    poly = random_convex_polygon(rng, n_points=6)
    theta = rng.random() * math.pi
    moved = poly.translate(rng.standard_normal() * 10, rng.standard_normal() * 10)
    w = width(poly, theta)
    assert abs(width(moved, theta) - w) <= 1e-12 * max(1.0, w) * 20


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hitting_predicate_matches_split(seed):
    rng = np.random.default_rng(seed)
    poly = random_convex_polygon(rng, n_points=6)
    theta = rng.random() * math.pi
    lo, hi = offset_interval(poly, theta)
    margin = 0.05 * (hi - lo)
    a = lo - margin + rng.random() * (hi - lo + 2 * margin)
    try:
        plus, minus, _ = split(poly, Hyperplane(theta, a))
    except DegenerateSplit:
        return
    both = plus is not None and minus is not None
    strictly_inside = lo + poly.snap_tol < a < hi - poly.snap_tol
    strictly_outside = a < lo - poly.snap_tol or a > hi + poly.snap_tol
    if strictly_inside:
        assert both
    if strictly_outside:
        assert not both


class TestClipSegment:
    def test_crossing_segment(self, unit_square):
        s = clip_segment(Segment((-1.0, 0.5), (2.0, 0.5)), unit_square)
        assert s.length == pytest.approx(1.0)

    def test_disjoint_segment(self, unit_square):
        assert clip_segment(Segment((2.0, 2.0), (3.0, 3.0)), unit_square) is None

    def test_inside_segment_unchanged(self, unit_square):
        s = clip_segment(Segment((0.2, 0.2), (0.8, 0.8)), unit_square)
        assert s.p == (0.2, 0.2) and s.q == (0.8, 0.8)
