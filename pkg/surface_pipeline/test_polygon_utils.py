import random
from fractions import Fraction

import pytest

from utils.endpoint_utils import EndpointCase
from utils.errors import DegenerateInput, NonLatticeVertices, Unbounded
from utils.polygon_utils import (
    RationalPolygon, Shape, interior_hull, interior_points, lattice_length, lattice_points,
    level_keel, nmc_polygon, normalize, offset_scale, polygon_adjoint_chain, scale, transform,
)

HEXAGON = [(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)]


def triangle(n):
    return normalize([(0, 0), (n, 0), (0, n)])


def rectangle(m, n):
    return normalize([(0, 0), (n, 0), (n, m), (0, m)])


def test_normalize_orders_hull_counterclockwise():
    polygon = normalize([(2, 2), (0, 0), (1, 1), (2, 0), (0, 2)])
    assert polygon.vertices == ((0, 0), (2, 0), (2, 2), (0, 2))
    assert polygon.area2 == 8
    for (nx, ny), a in polygon.edges:
        assert all(nx * x + ny * y >= a for x, y in polygon.vertices)


@pytest.mark.parametrize("points", [[], [(0, 0)], [(0, 0), (1, 1), (2, 2)]])
def test_normalize_rejects_degenerate_input(points):
    with pytest.raises(DegenerateInput):
        normalize(points)


def test_normalize_rejects_non_integer_vertices():
    with pytest.raises(DegenerateInput):
        normalize([(0, 0), (Fraction(1, 2), 0), (0, 1)])


def test_offset_scale_identity_and_emptiness():
    square = normalize([(0, 0), (2, 0), (2, 2), (0, 2)])
    assert offset_scale(square, 1, 0).vertices == square.as_rational().vertices
    assert offset_scale(square, 1, 1).shape == Shape.POINT
    assert offset_scale(square, 1, 2).is_empty


def test_lattice_points_counts_and_unbounded_halfplanes():
    assert len(lattice_points(triangle(2).as_rational())) == 6
    half = RationalPolygon.empty()
    assert lattice_points(half) == []
    with pytest.raises(Unbounded):
        RationalPolygon.from_halfplanes([((1, 0), 0), ((0, 1), 0)])


def test_interior_hull_of_triangle_side_six():
    inner = interior_hull(triangle(6))
    assert inner.vertices == ((1, 1), (4, 1), (1, 4))
    assert inner.shape == Shape.TWO_DIMENSIONAL


def test_interior_hull_of_unit_square_is_empty():
    assert interior_hull(normalize([(0, 0), (1, 0), (1, 1), (0, 1)])).is_empty


def test_lattice_length_of_rational_segment():
    assert lattice_length((Fraction(3, 2), Fraction(3, 2)), (Fraction(7, 2), Fraction(3, 2))) == 2
    assert lattice_length((0, 0), (2, 4)) == 2
    assert lattice_length((0, 0), (Fraction(1, 2), Fraction(1, 2))) == Fraction(1, 2)


@pytest.mark.parametrize("n", range(1, 31))
def test_triangle_level_is_a_third_of_the_side(n):
    inv = level_keel(triangle(n))
    assert inv.level == Fraction(n, 3)
    assert inv.keel == 0


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 13) for n in range(m, 13)])
def test_rectangle_level_and_keel(m, n):
    inv = level_keel(rectangle(m, n))
    assert inv.level == Fraction(m, 2)
    assert inv.keel == n - m


def test_rectangle_optimal_face():
    inv = level_keel(rectangle(3, 5))
    assert inv.optimal_face.shape == Shape.SEGMENT
    assert inv.optimal_face.vertices == ((Fraction(3, 2), Fraction(3, 2)), (Fraction(7, 2), Fraction(3, 2)))
    assert inv.denominator == 2


def test_hexagon_level_one_keel_zero():
    inv = level_keel(normalize(HEXAGON))
    assert (inv.level, inv.keel) == (1, 0)


@pytest.mark.parametrize("polygon,expected", [
    (triangle(9), (Fraction(3), Fraction(0))),
    (rectangle(4, 6), (Fraction(2), Fraction(2))),
    (rectangle(5, 6), (Fraction(5, 2), Fraction(1))),
    (triangle(7), (Fraction(7, 3), Fraction(0))),
    (triangle(8), (Fraction(8, 3), Fraction(0))),
])
def test_caption_values(polygon, expected):
    inv = level_keel(polygon)
    assert (inv.level, inv.keel) == expected


def test_level_scales_linearly():
    polygon = normalize([(0, 0), (3, 0), (1, 2)])
    base = level_keel(polygon)
    for s in (2, 3):
        scaled = level_keel(scale(polygon, s))
        assert scaled.level == s * base.level
        assert scaled.keel == s * base.keel


def _random_unimodular(rng, factors=6):
    U = ((1, 0), (0, 1))
    for _ in range(factors):
        k = rng.randint(-2, 2)
        E = rng.choice([((1, k), (0, 1)), ((1, 0), (k, 1)), ((0, 1), (1, 0))])
        U = tuple(tuple(sum(U[i][m] * E[m][j] for m in range(2)) for j in range(2)) for i in range(2))
    return U


@pytest.mark.parametrize("vertices", [
    [(0, 0), (4, 0), (4, 1), (1, 3)],
    [(0, 0), (5, 0), (5, 3), (0, 3)],
    HEXAGON,
    [(0, 0), (7, 2), (3, 5)],
])
def test_level_invariant_under_unimodular_maps(vertices):
    rng = random.Random(31)
    polygon = normalize(vertices)
    base = level_keel(polygon)
    for _ in range(25):
        U = _random_unimodular(rng)
        t = (rng.randint(-9, 9), rng.randint(-9, 9))
        image = level_keel(transform(polygon, U, t))
        assert (image.level, image.keel) == (base.level, base.keel), (U, t)


def test_transform_rejects_non_unimodular_matrix():
    with pytest.raises(DegenerateInput):
        transform(triangle(2), ((2, 0), (0, 1)))


def test_nmc_polygon_cases():
    assert nmc_polygon(RationalPolygon.empty()) == 0
    assert nmc_polygon(RationalPolygon.from_points([(1, 1)])) == 0
    assert nmc_polygon(RationalPolygon.from_points([(0, 0), (3, 0)])) == 3
    assert nmc_polygon(triangle(2).as_rational()) == 1
    with pytest.raises(NonLatticeVertices):
        nmc_polygon(offset_scale(rectangle(3, 5), 1, Fraction(3, 2)))


def test_chain_of_triangle_side_six_ends_in_point():
    chain = polygon_adjoint_chain(triangle(6))
    assert chain.a == 2
    assert chain.members[-1].shape == Shape.POINT
    assert chain.endpoint == EndpointCase.ZERO_CLASS
    assert (chain.level, chain.keel) == (2, 0)


def test_chain_of_rectangle_ends_in_segment():
    chain = polygon_adjoint_chain(rectangle(4, 7))
    assert chain.endpoint == EndpointCase.FIBER_MULTIPLE
    assert (chain.level, chain.keel) == (2, 3)


@pytest.mark.parametrize("vertices,case,level,keel", [
    ([(0, 0), (1, 0), (0, 1)], EndpointCase.THIRD, Fraction(1, 3), 0),
    ([(0, 0), (2, 0), (0, 2)], EndpointCase.TWO_THIRDS, Fraction(2, 3), 0),
    ([(0, 0), (2, 0), (0, 1)], EndpointCase.HALF, Fraction(1, 2), 0),
    ([(0, 0), (1, 0), (1, 3), (0, 3)], EndpointCase.HALF_FIBER, Fraction(1, 2), 2),
])
def test_terminal_subcases(vertices, case, level, keel):
    polygon = normalize(vertices)
    chain = polygon_adjoint_chain(polygon)
    assert chain.a == 0
    assert chain.endpoint == case
    assert (chain.level, chain.keel) == (level, keel)
    assert (level_keel(polygon).level, level_keel(polygon).keel) == (level, keel)


def test_chain_never_contains_empty_members():
    chain = polygon_adjoint_chain(normalize([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert all(not m.is_empty for m in chain.members)
    assert chain.a == 0


def test_keel_counts_lattice_points_of_segment_endpoint():
    for m, n in [(2, 5), (4, 9), (6, 6)]:
        chain = polygon_adjoint_chain(rectangle(m, n))
        last = chain.members[-1]
        if last.shape == Shape.SEGMENT:
            assert chain.keel == len(lattice_points(last)) - 1
        assert len(interior_points(chain.members[0])) == (m - 1) * (n - 1)
