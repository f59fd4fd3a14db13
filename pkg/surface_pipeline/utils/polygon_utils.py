import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import gcd, floor, ceil
from typing import List, Optional, Sequence, Tuple, Union

from utils.endpoint_utils import EndpointCase, LEVEL_OFFSET
from utils.errors import DegenerateInput, Unbounded, NonLatticeVertices

logger = logging.getLogger("PolygonUtils")

Point = Tuple[int, int]
RationalPoint = Tuple[Fraction, Fraction]
Normal = Tuple[int, int]
HalfPlane = Tuple[Normal, Fraction]


class Shape(Enum):
    EMPTY = "Empty"
    POINT = "Point"
    SEGMENT = "Segment"
    TWO_DIMENSIONAL = "TwoDimensional"


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Monotone chain hull, counterclockwise from the lexicographically smallest point.

    Collinear points are dropped, so a collinear input collapses to its two ends.
    Works for ints and Fractions alike.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)

    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    return lower[:-1] + upper[:-1]


def _primitive(dx, dy) -> Normal:
    """Primitive integer vector on the ray of a (possibly rational) direction."""
    dx, dy = Fraction(dx), Fraction(dy)
    den = dx.denominator * dy.denominator // gcd(dx.denominator, dy.denominator)
    ix, iy = int(dx * den), int(dy * den)
    g = gcd(ix, iy)
    return ix // g, iy // g


def lattice_length(p0: RationalPoint, p1: RationalPoint) -> Fraction:
    """The rational factor lam with p1 - p0 = lam * (primitive direction)."""
    dx, dy = Fraction(p1[0] - p0[0]), Fraction(p1[1] - p0[1])
    if dx == 0 and dy == 0:
        return Fraction(0)
    den = dx.denominator * dy.denominator // gcd(dx.denominator, dy.denominator)
    return Fraction(gcd(int(dx * den), int(dy * den)), den)


def _half_sort_key(v):
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(u, v):
    hu, hv = _half_sort_key(u), _half_sort_key(v)
    if hu != hv:
        return hu - hv
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def normals_bound_region(normals: Sequence[Normal]) -> bool:
    """True iff the inner normals positively span the plane (region is bounded)."""
    directions = sorted({_primitive(*n) for n in normals}, key=cmp_to_key(_angle_cmp))
    if len(directions) < 3:
        return False
    for i, u in enumerate(directions):
        v = directions[(i + 1) % len(directions)]
        if u[0] * v[1] - u[1] * v[0] <= 0:
            return False
    return True


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon: CCW vertices plus primitive inner normals and supports.

    The polygon is {x : <n_e, x> >= a_e for every edge e}.
    """
    vertices: Tuple[Point, ...]
    edges: Tuple[Tuple[Normal, int], ...]

    @property
    def halfplanes(self) -> Tuple[HalfPlane, ...]:
        return tuple((n, Fraction(a)) for n, a in self.edges)

    @property
    def area2(self) -> int:
        """Twice the area (an integer)."""
        vs = self.vertices
        return sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
                   for i in range(len(vs)))

    def as_rational(self) -> "RationalPolygon":
        return RationalPolygon(
            halfplanes=self.halfplanes,
            vertices=tuple((Fraction(x), Fraction(y)) for x, y in self.vertices),
            shape=Shape.TWO_DIMENSIONAL,
        )


@dataclass(frozen=True)
class RationalPolygon:
    """Intersection of rational half-planes with its exact vertex list and shape tag."""
    halfplanes: Tuple[HalfPlane, ...]
    vertices: Tuple[RationalPoint, ...]
    shape: Shape

    @classmethod
    def from_halfplanes(cls, halfplanes) -> "RationalPolygon":
        halfplanes = tuple((tuple(n), Fraction(a)) for n, a in halfplanes)
        if not normals_bound_region([n for n, _ in halfplanes]):
            raise Unbounded(f"half-plane normals {[n for n, _ in halfplanes]} do not bound a region")

        candidates = set()
        for (n1, a1), (n2, a2) in combinations(halfplanes, 2):
            det = n1[0] * n2[1] - n1[1] * n2[0]
            if det == 0:
                continue
            x = (a1 * n2[1] - a2 * n1[1]) / det
            y = (n1[0] * a2 - n2[0] * a1) / det
            if all(n[0] * x + n[1] * y >= a for n, a in halfplanes):
                candidates.add((x, y))

        vertices = tuple(convex_hull(candidates))
        return cls(halfplanes=halfplanes, vertices=vertices, shape=_shape_of(vertices))

    @classmethod
    def from_points(cls, points) -> "RationalPolygon":
        """Convex hull of finitely many points, with a half-plane description."""
        hull = [(Fraction(x), Fraction(y)) for x, y in convex_hull(points)]
        if not hull:
            return cls.empty()

        if len(hull) == 1:
            x, y = hull[0]
            halfplanes = (((1, 0), x), ((-1, 0), -x), ((0, 1), y), ((0, -1), -y))
        elif len(hull) == 2:
            p0, p1 = hull
            d = _primitive(p1[0] - p0[0], p1[1] - p0[1])
            n = (-d[1], d[0])
            on_line = n[0] * p0[0] + n[1] * p0[1]
            halfplanes = ((n, on_line), ((-n[0], -n[1]), -on_line),
                          (d, d[0] * p0[0] + d[1] * p0[1]),
                          ((-d[0], -d[1]), -(d[0] * p1[0] + d[1] * p1[1])))
        else:
            halfplanes = []
            for i, v in enumerate(hull):
                w = hull[(i + 1) % len(hull)]
                n = _primitive(v[1] - w[1], w[0] - v[0])
                halfplanes.append((n, n[0] * v[0] + n[1] * v[1]))
            halfplanes = tuple(halfplanes)

        return cls(halfplanes=tuple((n, Fraction(a)) for n, a in halfplanes),
                   vertices=tuple(hull), shape=_shape_of(hull))

    @classmethod
    def empty(cls) -> "RationalPolygon":
        # x >= 1 and x <= 0
        halfplanes = (((1, 0), Fraction(1)), ((-1, 0), Fraction(0)),
                      ((0, 1), Fraction(0)), ((0, -1), Fraction(0)))
        return cls(halfplanes=halfplanes, vertices=(), shape=Shape.EMPTY)

    @property
    def is_empty(self) -> bool:
        return self.shape == Shape.EMPTY

    def has_lattice_vertices(self) -> bool:
        return all(x.denominator == 1 and y.denominator == 1 for x, y in self.vertices)


def _shape_of(vertices) -> Shape:
    return {0: Shape.EMPTY, 1: Shape.POINT, 2: Shape.SEGMENT}.get(len(vertices), Shape.TWO_DIMENSIONAL)


@dataclass(frozen=True)
class PolygonInvariants:
    level: Fraction
    keel: Fraction
    optimal_face: RationalPolygon
    denominator: int


@dataclass(frozen=True)
class PolygonChain:
    """Members Γ, interior_hull(Γ), ... and how the chain ends."""
    members: Tuple[RationalPolygon, ...]
    endpoint: Optional[EndpointCase]
    level: Optional[Fraction]
    keel: Optional[Fraction]

    @property
    def a(self) -> int:
        return len(self.members) - 1


def normalize(points: Sequence[Point]) -> LatticePolygon:
    """Convex hull of integer points as a full-dimensional LatticePolygon."""
    if not points:
        raise DegenerateInput("empty point list")
    pts = []
    for p in points:
        x, y = p
        if int(x) != x or int(y) != y:
            raise DegenerateInput(f"non-integer vertex {p}")
        pts.append((int(x), int(y)))

    hull = convex_hull(pts)
    if len(hull) < 3:
        raise DegenerateInput(f"hull of {len(pts)} points is a {'point' if len(hull) == 1 else 'segment'}")

    edges = []
    for i, v in enumerate(hull):
        w = hull[(i + 1) % len(hull)]
        dx, dy = w[0] - v[0], w[1] - v[1]
        g = gcd(dx, dy)
        n = (-dy // g, dx // g)
        edges.append((n, n[0] * v[0] + n[1] * v[1]))

    return LatticePolygon(vertices=tuple(hull), edges=tuple(edges))


def scale(polygon: LatticePolygon, s: int) -> LatticePolygon:
    return normalize([(s * x, s * y) for x, y in polygon.vertices])


def transform(polygon: LatticePolygon, U, t=(0, 0)) -> LatticePolygon:
    """Image under x -> U x + t for a unimodular integer matrix U."""
    (a, b), (c, d) = U
    if abs(a * d - b * c) != 1:
        raise DegenerateInput(f"matrix {U} is not unimodular")
    return normalize([(a * x + b * y + t[0], c * x + d * y + t[1]) for x, y in polygon.vertices])


def _shifted(halfplanes, q, p) -> RationalPolygon:
    return RationalPolygon.from_halfplanes([(n, q * a + p) for n, a in halfplanes])


def offset_scale(polygon: LatticePolygon, q: int, p: int) -> RationalPolygon:
    """The figure of qD + pK: scale by q, then move every edge p lattice steps inward."""
    return _shifted(polygon.halfplanes, q, p)


def _bounding_box(polygon: RationalPolygon):
    xs = [v[0] for v in polygon.vertices]
    ys = [v[1] for v in polygon.vertices]
    return ceil(min(xs)), floor(max(xs)), ceil(min(ys)), floor(max(ys))


def _grid_points(polygon, strict: bool) -> List[Point]:
    if isinstance(polygon, LatticePolygon):
        polygon = polygon.as_rational()
    if polygon.is_empty:
        return []
    x_lo, x_hi, y_lo, y_hi = _bounding_box(polygon)
    found = []
    for x in range(x_lo, x_hi + 1):
        for y in range(y_lo, y_hi + 1):
            values = (n[0] * x + n[1] * y - a for n, a in polygon.halfplanes)
            if all(v > 0 for v in values) if strict else all(v >= 0 for v in values):
                found.append((x, y))
    return found


def interior_points(polygon: Union[LatticePolygon, RationalPolygon]) -> List[Point]:
    return _grid_points(polygon, strict=True)


def interior_hull(polygon: Union[LatticePolygon, RationalPolygon]) -> RationalPolygon:
    """Convex hull of the lattice points strictly inside the polygon."""
    return RationalPolygon.from_points(interior_points(polygon))


def lattice_points(polygon: RationalPolygon) -> List[Point]:
    """All integer points of a bounded polygon, in lexicographic order."""
    if not normals_bound_region([n for n, _ in polygon.halfplanes]):
        raise Unbounded("constraint set does not bound the region")
    return _grid_points(polygon, strict=False)


def _solve3(rows):
    """Cramer's rule for three rows (nx, ny, a) of <n, x> - t = a; None if singular."""
    (a1, b1, r1), (a2, b2, r2), (a3, b3, r3) = rows
    # columns: x, y, t with coefficient -1 on t
    det = a1 * (b2 * -1 - (-1) * b3) - b1 * (a2 * -1 - (-1) * a3) + (-1) * (a2 * b3 - b2 * a3)
    if det == 0:
        return None
    det_x = r1 * (b2 * -1 - (-1) * b3) - b1 * (r2 * -1 - (-1) * r3) + (-1) * (r2 * b3 - b2 * r3)
    det_y = a1 * (r2 * -1 - (-1) * r3) - r1 * (a2 * -1 - (-1) * a3) + (-1) * (a2 * r3 - r2 * a3)
    det_t = a1 * (b2 * r3 - r2 * b3) - b1 * (a2 * r3 - r2 * a3) + r1 * (a2 * b3 - b2 * a3)
    return Fraction(det_x, det), Fraction(det_y, det), Fraction(det_t, det)


def level_keel(polygon: LatticePolygon) -> PolygonInvariants:
    """Level and keel of a lattice polygon by exact vertex enumeration in (x, y, t).

    The level is the largest t for which {<n_e, x> >= a_e + t} is nonempty; the keel is
    the lattice length of that last nonempty figure (0 when it is a point).
    """
    rows = [(n[0], n[1], a) for n, a in polygon.edges]
    best: Optional[Fraction] = None
    for triple in combinations(rows, 3):
        solution = _solve3(triple)
        if solution is None:
            continue
        x, y, t = solution
        if best is not None and t <= best:
            continue
        if all(nx * x + ny * y - t >= a for nx, ny, a in rows):
            best = t

    if best is None:
        raise DegenerateInput("no feasible vertex; the polygon is not full-dimensional")

    face = _shifted(polygon.halfplanes, 1, best)
    if face.shape == Shape.POINT:
        keel = Fraction(0)
    elif face.shape == Shape.SEGMENT:
        keel = lattice_length(*face.vertices)
    else:
        raise DegenerateInput(f"optimal face has shape {face.shape.value}")

    logger.debug(f"🔎 level_keel: level={best} keel={keel} face={face.shape.value}")
    return PolygonInvariants(level=best, keel=keel, optimal_face=face, denominator=best.denominator)


def nmc_polygon(polygon: RationalPolygon) -> int:
    """Number of moving components read off the figure of a lattice-vertex polygon."""
    if not polygon.has_lattice_vertices():
        raise NonLatticeVertices(f"vertices {polygon.vertices} are not all integral")
    if polygon.shape in (Shape.EMPTY, Shape.POINT):
        return 0
    if polygon.shape == Shape.SEGMENT:
        return len(lattice_points(polygon)) - 1
    return 1


def _scaled_members(polygon: RationalPolygon, s: int) -> RationalPolygon:
    return RationalPolygon.from_points([(s * x, s * y) for x, y in polygon.vertices])


def _collinear(points: Sequence[Point]) -> bool:
    return len(convex_hull(points)) <= 2


def _terminal_subcase(polygon: RationalPolygon):
    """Endpoint subcase and keel of a 2-dimensional polygon without interior lattice points."""
    # 1. scale by 3: one interior point
    tripled = _scaled_members(polygon, 3)
    if len(interior_points(tripled)) == 1:
        return EndpointCase.THIRD, Fraction(0)

    # 2. scale by 3, pass to the interior hull: one interior point
    if len(interior_points(interior_hull(tripled))) == 1:
        return EndpointCase.TWO_THIRDS, Fraction(0)

    # 3. scale by 2: one interior point, or several on a line
    doubled_inside = interior_points(_scaled_members(polygon, 2))
    if len(doubled_inside) == 1:
        return EndpointCase.HALF, Fraction(0)
    if len(doubled_inside) > 1 and _collinear(doubled_inside):
        return EndpointCase.HALF_FIBER, Fraction(len(doubled_inside) - 1, 2)

    return None, None


def polygon_adjoint_chain(polygon: LatticePolygon) -> PolygonChain:
    """Repeated interior hulls until a point, a segment, or a polygon without interior points."""
    members = [polygon.as_rational()]
    while members[-1].shape == Shape.TWO_DIMENSIONAL:
        inner = interior_hull(members[-1])
        if inner.is_empty:
            break
        members.append(inner)

    last = members[-1]
    a = len(members) - 1
    if last.shape == Shape.POINT:
        endpoint, keel = EndpointCase.ZERO_CLASS, Fraction(0)
    elif last.shape == Shape.SEGMENT:
        endpoint, keel = EndpointCase.FIBER_MULTIPLE, Fraction(nmc_polygon(last))
    else:
        endpoint, keel = _terminal_subcase(last)

    if endpoint is None:
        logger.warning(f"⚠️ Terminal polygon {last.vertices} matches no endpoint subcase")
        return PolygonChain(members=tuple(members), endpoint=None, level=None, keel=None)

    return PolygonChain(members=tuple(members), endpoint=endpoint,
                        level=a + LEVEL_OFFSET[endpoint], keel=keel)
