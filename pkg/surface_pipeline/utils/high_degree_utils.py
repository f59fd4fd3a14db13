"""Closed forms for the family of rational surfaces of degree n^2 + 1 with half-integral level.

The surface is the image of the plane under the linear system H of degree n^2 + 1
with the base-point profile below; everything here is exact arithmetic on that data.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Tuple

from utils.errors import BadN

logger = logging.getLogger("HighDegreeUtils")


@dataclass(frozen=True)
class HighDegreeReport:
    n: int
    level: Fraction
    keel: Fraction
    lower: Fraction
    upper: Fraction
    param_degree: int
    h_square: int
    adjoint_degree: Fraction
    derived_keel: Fraction
    profile: Tuple[Tuple[int, int], ...]             # (multiplicity, number of points)
    residual_multiplicities: Tuple[Tuple[int, Fraction], ...]
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def sandwich(self) -> bool:
        return self.lower <= self.param_degree <= self.upper


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise BadN(f"n must be an integer, got {n!r}")
    if n < 5 or n % 2 == 0:
        raise BadN(f"n must be odd and at least 5, got {n}")
    return n


def multiplicity_profile(n: int) -> Tuple[Tuple[int, int], ...]:
    """Base points of H: one of multiplicity n^2-2n, (n-3)/2 of 2n, 2n+3 of n, n^2-2n simple."""
    n = _check_n(n)
    return (
        (n * n - 2 * n, 1),
        (2 * n, (n - 3) // 2),
        (n, 2 * n + 3),
        (1, n * n - 2 * n),  # one proper point plus n^2-2n-1 infinitely near
    )


def high_degree_feasible(n: int, p: int, q: int) -> bool:
    """qH + pK is effective exactly when 2p <= (2n+1)q."""
    n = _check_n(n)
    return q > 0 and 2 * p <= (2 * n + 1) * q


def example_high_report(n: int) -> HighDegreeReport:
    n = _check_n(n)
    degree = n * n + 1
    profile = multiplicity_profile(n)
    h_square = degree * degree - sum(count * m * m for m, count in profile)

    level = n + Fraction(1, 2)
    keel = Fraction(2 * n * n - 5 * n - 5, 4)
    lower = Fraction(2 * n * n + 7 * n + 1, 4)
    upper = 6 * level + 2 * keel

    # At the level, H + level*K has degree n^2+1 - 3*level and multiplicity m - level at a point
    # of multiplicity m. Its moving part is the pencil of lines through the big point minus
    # the lines through the (n-3)/2 points of multiplicity 2n.
    adjoint_degree = degree - 3 * level
    residual = tuple((m, m - level) for m, _ in profile if m - level > 0)
    derived_keel = adjoint_degree - Fraction(n - 3, 2) * (2 * n - level)

    checks = {
        "h_square": h_square == 2 * n + 1,
        "adjoint_degree": adjoint_degree == Fraction(2 * n * n - 6 * n - 1, 2),
        "keel_from_adjoint": derived_keel == keel,
        "lower_is_3_level_plus_keel": lower == 3 * level + keel,
        "feasible_at_level": high_degree_feasible(n, 2 * n + 1, 2) and not high_degree_feasible(n, 2 * n + 2, 2),
    }
    report = HighDegreeReport(
        n=n, level=level, keel=keel, lower=lower, upper=upper, param_degree=degree,
        h_square=h_square, adjoint_degree=adjoint_degree, derived_keel=derived_keel,
        profile=profile, residual_multiplicities=residual, checks=checks,
    )
    checks["sandwich"] = report.sandwich
    if not all(checks.values()):
        failed = [name for name, ok in checks.items() if not ok]
        logger.error(f"❌ Degree {degree} example with n={n} failed: {failed}")
    else:
        logger.info(f"✅ Degree {degree} example with n={n}: level={level} keel={keel} lower={lower}")
    return report
