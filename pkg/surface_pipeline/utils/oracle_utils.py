"""Brute-force validators: fat-point interpolation ranks and polygon offset search."""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from utils.config_utils import (
    DEFAULT_SEED, ORACLE_MAX_DEGREE, ORACLE_MAX_DENOMINATOR, ORACLE_MAX_POINTS, RESAMPLE_RETRIES,
)
from utils.errors import DegenerateInput, DegenerateSample, UnsupportedRank
from utils.picard_utils import DivisorClass, degree_mults
from utils.polygon_utils import LatticePolygon, offset_scale
from utils.retry_utils import retry

logger = logging.getLogger("OracleUtils")

COORDINATE_RANGE = 30


@dataclass(frozen=True)
class FatPointProblem:
    degree: int
    points: Tuple[Tuple[Fraction, Fraction], ...]
    multiplicities: Tuple[int, ...]

    def __post_init__(self):
        if len(self.points) != len(self.multiplicities):
            raise DegenerateInput(f"{len(self.points)} points but {len(self.multiplicities)} multiplicities")
        if len(set(self.points)) != len(self.points):
            raise DegenerateInput("fat points must be pairwise distinct")

    @classmethod
    def general(cls, degree: int, multiplicities: Sequence[int], seed: int) -> "FatPointProblem":
        """Pseudo-random integer points standing in for points in general position."""
        rng = random.Random(seed)
        points = []
        while len(points) < len(multiplicities):
            p = (rng.randint(-COORDINATE_RANGE, COORDINATE_RANGE), rng.randint(-COORDINATE_RANGE, COORDINATE_RANGE))
            if p not in points:
                points.append(p)
        return cls(degree=degree, points=tuple(points), multiplicities=tuple(multiplicities))


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _conditions(problem: FatPointProblem, monomials):
    """One row per derivative of order < m at each point (affine chart z = 1)."""
    rows = []
    for (a, b), m in zip(problem.points, problem.multiplicities):
        for s in range(m):
            for t in range(m - s):
                rows.append([
                    _falling(i, s) * _falling(j, t) * (a ** (i - s) if i >= s else 0) * (b ** (j - t) if j >= t else 0)
                    for i, j in monomials
                ])
    return rows


def _rank(rows) -> int:
    if not rows:
        return 0
    if all(isinstance(v, int) for row in rows for v in row):
        return DomainMatrix.from_list(rows, ZZ).rank()
    exact = [[(Fraction(v).numerator, Fraction(v).denominator) for v in row] for row in rows]
    return DomainMatrix.from_list(exact, QQ).rank()


def fatpoint_dim(problem: FatPointProblem) -> int:
    """Projective dimension of degree-d forms with the given multiplicities; -1 when empty."""
    d = problem.degree
    if d < 0:
        return -1
    mults = [max(m, 0) for m in problem.multiplicities]
    if any(m > d for m in mults):
        return -1
    monomials = [(i, j) for i in range(d + 1) for j in range(d + 1 - i)]
    clipped = FatPointProblem(d, problem.points, tuple(mults))
    rank = _rank(_conditions(clipped, monomials))
    return len(monomials) - rank - 1


@lru_cache(maxsize=8192)
def _two_sample_dim(degree: int, mults: Tuple[int, ...], seed: int) -> int:
    first = fatpoint_dim(FatPointProblem.general(degree, mults, seed))
    second = fatpoint_dim(FatPointProblem.general(degree, mults, seed + 1))
    if first != second:
        raise DegenerateSample(f"degree {degree}, multiplicities {mults}: dims {first} vs {second} at seed {seed}")
    return first


@retry(max_retries=RESAMPLE_RETRIES)
def fatpoint_dim_stable(degree: int, multiplicities: Sequence[int], seed: int = DEFAULT_SEED) -> int:
    """fatpoint_dim agreed on by two independent samples; resampled on disagreement."""
    key = tuple(sorted((m for m in multiplicities if m > 0), reverse=True))
    return _two_sample_dim(degree, key, seed)


def effectivity_oracle(D: DivisorClass, seed: int = DEFAULT_SEED) -> bool:
    """Effectivity of (d; m) on a plane blowup read off the interpolation rank.

    Negative multiplicities are fixed exceptional parts and are dropped.
    """
    d, mults = degree_mults(D)
    if len(mults) > ORACLE_MAX_POINTS:
        raise UnsupportedRank(f"oracle handles at most {ORACLE_MAX_POINTS} points, got {len(mults)}")
    if d > ORACLE_MAX_DEGREE:
        raise UnsupportedRank(f"oracle handles degree at most {ORACLE_MAX_DEGREE}, got {d}")
    if d < 0:
        return False
    return fatpoint_dim_stable(d, mults, seed=seed) >= 0


def _max_offset(polygon: LatticePolygon, q: int) -> int:
    """Largest p >= 0 with offset_scale(polygon, q, p) nonempty."""
    lo, hi = 0, 1
    while not offset_scale(polygon, q, hi).is_empty:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if offset_scale(polygon, q, mid).is_empty:
            hi = mid
        else:
            lo = mid
    return lo


def polygon_level_oracle(polygon: LatticePolygon, Q: int = ORACLE_MAX_DENOMINATOR) -> Fraction:
    """max over q <= Q of (largest p with a nonempty offset) / q."""
    best = Fraction(0)
    for q in range(1, Q + 1):
        best = max(best, Fraction(_max_offset(polygon, q), q))
    logger.debug(f"🔎 polygon_level_oracle Q={Q}: {best}")
    return best
