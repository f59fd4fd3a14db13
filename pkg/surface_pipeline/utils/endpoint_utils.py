from enum import Enum
from fractions import Fraction


class EndpointCase(Enum):
    """How an adjoint chain ends; shared by the polygon and Picard backends."""
    ZERO_CLASS = "ZeroClass"          # D_a = 0 / the chain ends in a point
    FIBER_MULTIPLE = "FiberMultiple"  # D_a = kP with P^2 = 0 / ends in a segment
    THIRD = "Third"                   # 3D_a + K_a = 0
    TWO_THIRDS = "TwoThirds"          # 3D_a + 2K_a = 0
    HALF = "Half"                     # 2D_a + K_a = 0
    HALF_FIBER = "HalfFiber"          # (2D_a + K_a)^2 = 0, 2D_a + K_a != 0


# Fractional part of the level contributed by each endpoint
LEVEL_OFFSET = {
    EndpointCase.ZERO_CLASS: Fraction(0),
    EndpointCase.FIBER_MULTIPLE: Fraction(0),
    EndpointCase.THIRD: Fraction(1, 3),
    EndpointCase.TWO_THIRDS: Fraction(2, 3),
    EndpointCase.HALF: Fraction(1, 2),
    EndpointCase.HALF_FIBER: Fraction(1, 2),
}
