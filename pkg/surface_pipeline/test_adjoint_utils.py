from fractions import Fraction

import pytest

from utils.adjoint_utils import (
    EndpointSurface, adjoint_chain, check_chain_invariants, classify_endpoint, level_by_search,
    level_keel_divisor, pdeg_bounds, pushed_source,
)
from utils.endpoint_utils import EndpointCase
from utils.errors import NotBig, NotNef
from utils.picard_utils import (
    hirzebruch, plane_blowup, plane_deg4_blowup, quadric, quadric_deg2_blowup,
)
from utils.polygon_utils import level_keel, normalize
from verify_examples import generated_classes

HEXAGON = [(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)]


@pytest.mark.parametrize("n", range(1, 10))
def test_plane_multiples_of_the_line(n):
    P2 = plane_blowup(0)
    result = adjoint_chain(P2, P2.cls((n,)))
    assert (result.level, result.keel) == (Fraction(n, 3), 0)
    assert result.a == n // 3


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 7) for n in range(m, 7)])
def test_quadric_bidegrees(m, n):
    Q = quadric()
    assert level_keel_divisor(Q, Q.cls((m, n))) == (Fraction(m, 2), Fraction(n - m))


@pytest.mark.parametrize("S,coeffs,case,level,keel", [
    (plane_blowup(0), (1,), EndpointCase.THIRD, Fraction(1, 3), 0),
    (plane_blowup(0), (2,), EndpointCase.TWO_THIRDS, Fraction(2, 3), 0),
    (plane_blowup(0), (3,), EndpointCase.ZERO_CLASS, 1, 0),
    (quadric(), (1, 1), EndpointCase.HALF, Fraction(1, 2), 0),
    (quadric(), (1, 2), EndpointCase.HALF_FIBER, Fraction(1, 2), 1),
    (quadric(), (2, 5), EndpointCase.FIBER_MULTIPLE, 1, 3),
    (plane_blowup(1), (2, -1), EndpointCase.HALF_FIBER, Fraction(1, 2), Fraction(1, 2)),
    (plane_blowup(1), (4, -2), EndpointCase.FIBER_MULTIPLE, 1, 1),
    (hirzebruch(3), (2, 7), EndpointCase.FIBER_MULTIPLE, 1, 2),
])
def test_endpoint_cases(S, coeffs, case, level, keel):
    result = adjoint_chain(S, S.cls(coeffs))
    assert result.endpoint_case == case
    assert (result.level, result.keel) == (level, keel)
    assert all(check_chain_invariants(result).values())


def test_anticanonical_del_pezzo_contracts_to_plane():
    S = plane_blowup(6)
    result = adjoint_chain(S, -S.K)
    assert result.a == 1
    assert result.last.surface == plane_blowup(0)
    assert result.last.divisor.is_zero()
    assert len(result.last.contractions) == 6
    assert pushed_source(result) == plane_blowup(0).cls((3,))


@pytest.mark.parametrize("S,coeffs,expected", [
    (quadric(), (2, 5), (6, 12, 7)),
    (plane_blowup(0), (3,), (3, 6, 3)),
    (hirzebruch(3), (2, 7), (5, 10, 7)),
    (quadric_deg2_blowup(), (3, 1), (4, 8, 6)),
    (plane_deg4_blowup(), (5, -2), (4, 8, 5)),
])
def test_bounds_examples(S, coeffs, expected):
    bounds = pdeg_bounds(S, S.cls(coeffs))
    assert (bounds.lower, bounds.upper, bounds.constructive_upper) == expected
    assert bounds.checks and all(bounds.checks.values())


def test_bounds_of_anticanonical_sextic_blowup():
    S = plane_blowup(6)
    bounds = pdeg_bounds(S, -S.K)
    assert (bounds.level, bounds.keel) == (1, 0)
    assert (bounds.lower, bounds.upper, bounds.constructive_upper) == (3, 6, 3)
    assert bounds.endpoint_surface == EndpointSurface.PLANE


def test_fractional_endpoint_has_no_constructive_bound():
    Q = quadric()
    bounds = pdeg_bounds(Q, Q.cls((1, 1)))
    assert bounds.constructive_upper is None
    assert (bounds.lower, bounds.lower_int, bounds.upper) == (Fraction(3, 2), 2, 3)


@pytest.mark.parametrize("S,coeffs,tag", [
    (plane_blowup(0), (3,), EndpointSurface.PLANE),
    (quadric(), (2, 2), EndpointSurface.QUADRIC),
    (quadric(), (2, 5), EndpointSurface.RULED),
    (hirzebruch(3), (2, 7), EndpointSurface.RULED),
    (plane_blowup(1), (2, -1), EndpointSurface.RULED),
    (quadric_deg2_blowup(), (3, 1), EndpointSurface.CONIC_BUNDLE_DEG2),
    (plane_deg4_blowup(), (5, -2), EndpointSurface.CONIC_BUNDLE_DEG4),
])
def test_classify_endpoint(S, coeffs, tag):
    got, Q, _, _ = classify_endpoint(adjoint_chain(S, S.cls(coeffs)))
    assert got == tag
    assert Q.dot(Q.surface.K) <= -3


def test_ruled_parametrizing_class():
    S = hirzebruch(3)
    _, Q, _, (C, n) = classify_endpoint(adjoint_chain(S, S.cls((2, 7))))
    assert n == 3
    assert C == S.cls((1, 0))
    assert Q == S.cls((1, 3))


def test_level_matches_definitional_search():
    S = hirzebruch(2)
    D = S.cls((2, 5))
    assert adjoint_chain(S, D).level == level_by_search(S, D) == 1
    P2 = plane_blowup(0)
    assert level_by_search(P2, P2.cls((4,))) == Fraction(4, 3)


def test_level_and_keel_scale_with_the_class():
    for S, coeffs in [(quadric(), (1, 2)), (plane_blowup(1), (2, -1)), (plane_blowup(0), (2,))]:
        base = adjoint_chain(S, S.cls(coeffs))
        for s in (2, 3):
            scaled = adjoint_chain(S, S.cls([s * c for c in coeffs]))
            assert (scaled.level, scaled.keel) == (s * base.level, s * base.keel)


def test_toric_cases_agree_with_polygons():
    hexagon = level_keel(normalize(HEXAGON))
    S3 = plane_blowup(3)
    assert level_keel_divisor(S3, -S3.K) == (hexagon.level, hexagon.keel)

    square = level_keel(normalize([(0, 0), (2, 0), (2, 2), (0, 2)]))
    Q = quadric()
    assert level_keel_divisor(Q, Q.cls((2, 2))) == (square.level, square.keel)

    rect = level_keel(normalize([(0, 0), (5, 0), (5, 3), (0, 3)]))
    assert level_keel_divisor(Q, Q.cls((3, 5))) == (rect.level, rect.keel)


def test_reversed_contraction_order_keeps_level_and_keel():
    S = plane_blowup(2)
    forward = adjoint_chain(S, -S.K)
    backward = adjoint_chain(S, -S.K, reverse=True)
    assert forward.last.surface == plane_blowup(0)
    assert backward.last.surface == quadric()
    assert (forward.level, forward.keel) == (backward.level, backward.keel)
    assert classify_endpoint(backward)[0] == EndpointSurface.QUADRIC

    S6 = plane_blowup(6)
    forward = adjoint_chain(S6, -S6.K)
    backward = adjoint_chain(S6, -S6.K, reverse=True)
    assert (forward.level, forward.keel) == (backward.level, backward.keel)


def test_rejects_classes_that_are_not_nef_and_big():
    S = plane_blowup(1)
    with pytest.raises(NotNef):
        adjoint_chain(S, S.cls((2, 1)))
    with pytest.raises(NotBig):
        adjoint_chain(quadric(), quadric().cls((0, 3)))


@pytest.mark.slow
def test_sandwich_on_generated_classes():
    checked = 0
    for S, D in generated_classes():
        result = adjoint_chain(S, D)
        assert all(check_chain_invariants(result).values()), D.describe()
        bounds = pdeg_bounds(S, D, chain=result)
        assert bounds.lower <= bounds.upper
        if bounds.constructive_upper is not None:
            checked += 1
            assert all(bounds.checks.values()), D.describe()
    assert checked >= 100


@pytest.mark.slow
def test_rerun_from_intermediate_steps():
    for S, D in generated_classes():
        result = adjoint_chain(S, D)
        for i, step in enumerate(result.steps[1:-1], start=1):
            rerun = adjoint_chain(step.surface, step.divisor)
            assert rerun.a == result.a - i, D.describe()
            assert (rerun.level, rerun.keel) == (result.level - i, result.keel), D.describe()
            assert rerun.endpoint_case == result.endpoint_case


def test_rerun_from_first_step_of_sextic_del_pezzo():
    S = plane_blowup(6)
    result = adjoint_chain(S, -3 * S.K)
    assert result.a == 3
    step = result.steps[1]
    rerun = adjoint_chain(step.surface, step.divisor)
    assert (rerun.level, rerun.keel) == (result.level - 1, result.keel)
