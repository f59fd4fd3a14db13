import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import ceil, floor
from typing import Dict, Optional, Tuple

from utils.endpoint_utils import EndpointCase, LEVEL_OFFSET
from utils.errors import (
    ChainInvariantError, NonTerminating, NotBig, NotContractible, NotNef, Undecided, UnknownEndpoint,
)
from utils.picard_utils import (
    Contraction, DivisorClass, SurfaceModel, is_effective, is_nef, minimalize,
)

logger = logging.getLogger("AdjointUtils")

DEFAULT_ITERATION_CAP = 64


class EndpointSurface(Enum):
    """Minimal model reached at the end of a chain."""
    PLANE = "plane"                          # K^2 = 9, Q = -K/3
    QUADRIC = "quadric"                      # K^2 = 8, Q = -K/2
    DEL_PEZZO_6 = "del_pezzo_6"              # K^2 = 6, Q = -K
    DEL_PEZZO_5 = "del_pezzo_5"              # K^2 = 5, Q = -K
    RULED = "ruled"                          # conic bundle on F_n
    CONIC_BUNDLE_DEG2 = "conic_bundle_deg2"  # quadric_deg2_blowup
    CONIC_BUNDLE_DEG4 = "conic_bundle_deg4"  # plane_deg4_blowup


@dataclass(frozen=True)
class ChainStep:
    surface: SurfaceModel
    divisor: DivisorClass
    contractions: Tuple[Contraction, ...]


@dataclass(frozen=True)
class AdjointChainResult:
    source: DivisorClass
    steps: Tuple[ChainStep, ...]
    endpoint_case: EndpointCase
    level: Fraction
    keel: Fraction
    fiber: Optional[DivisorClass] = None        # P with D_a = kP
    multiplicity: Optional[int] = None          # k
    half_class: Optional[DivisorClass] = None   # 2D_a + K_a

    @property
    def a(self) -> int:
        return len(self.steps) - 1

    @property
    def last(self) -> ChainStep:
        return self.steps[-1]


@dataclass(frozen=True)
class PdegBounds:
    level: Fraction
    keel: Fraction
    lower: Fraction
    lower_int: int
    upper: Fraction
    constructive_upper: Optional[int]
    endpoint_surface: Optional[EndpointSurface]
    parametrizing_class: Optional[DivisorClass] = None
    checks: Dict[str, bool] = field(default_factory=dict)


def _iteration_cap(S: SurfaceModel, D: DivisorClass) -> int:
    """floor of min D.A / (-K.A) over nef witnesses with K.A < 0, plus one."""
    ratios = []
    for w in S.nef_witnesses:
        A = S.cls(w)
        KA = S.K.dot(A)
        if KA < 0:
            ratios.append(Fraction(D.dot(A), -KA))
    if not ratios:
        return S.rank * DEFAULT_ITERATION_CAP
    return floor(min(ratios)) + 1


def _classify_terminal(S_a: SurfaceModel, D_a: DivisorClass):
    """Endpoint case, level offset data, keel, fiber, multiplicity, half class."""
    K_a = S_a.K
    if D_a.is_zero():
        return EndpointCase.ZERO_CLASS, Fraction(0), None, None, None

    if D_a.square == 0:
        k = D_a.content()
        P = D_a.primitive()
        if P.dot(K_a) != -2:
            raise ChainInvariantError(f"fiber {P.describe()} on {S_a.tag} has P.K = {P.dot(K_a)}, expected -2")
        return EndpointCase.FIBER_MULTIPLE, Fraction(k), P, k, None

    if (3 * D_a + K_a).is_zero():
        return EndpointCase.THIRD, Fraction(0), None, None, None
    if (3 * D_a + 2 * K_a).is_zero():
        return EndpointCase.TWO_THIRDS, Fraction(0), None, None, None

    B = 2 * D_a + K_a
    if B.is_zero():
        return EndpointCase.HALF, Fraction(0), None, None, B
    if B.square == 0:
        return EndpointCase.HALF_FIBER, Fraction(B.content(), 2), B.primitive(), None, B

    raise UnknownEndpoint(f"terminal class {D_a.describe()} on {S_a.tag} matches no endpoint case")


def adjoint_chain(S: SurfaceModel, D: DivisorClass, reverse: bool = False) -> AdjointChainResult:
    """D-minimalize, then push D_i + K_i down while it stays effective.

    ``reverse`` flips the tie-breaking of every minimalization.
    """
    if D.square <= 0:
        raise NotBig(f"{D.describe()} has D^2 = {D.square} <= 0")
    if not is_nef(D):
        raise NotNef(f"{D.describe()} is not nef on {S.tag}")
    if not is_effective(D):
        raise NotBig(f"{D.describe()} is not effective on {S.tag}")

    logger.debug(f"🚀 Adjoint chain of {D.describe()} on {S.tag}")
    S_i, D_i, contractions = minimalize(S, D, reverse=reverse)
    steps = [ChainStep(S_i, D_i, tuple(contractions))]
    cap = _iteration_cap(S_i, D_i)

    while True:
        adjoint = D_i + S_i.K
        if not is_effective(adjoint):
            break
        if len(steps) > cap:
            raise NonTerminating(f"chain of {D.describe()} on {S.tag} exceeded {cap} steps")
        S_i, D_i, contractions = minimalize(S_i, adjoint, reverse=reverse)
        steps.append(ChainStep(S_i, D_i, tuple(contractions)))
        logger.debug(f"🔎 Step {len(steps) - 1}: {D_i.describe()} on {S_i.tag}")

    case, keel, fiber, k, half = _classify_terminal(S_i, D_i)
    a = len(steps) - 1
    level = a + LEVEL_OFFSET[case]
    logger.info(f"✅ Chain of {D.describe()} on {S.tag}: a={a} endpoint={case.value} level={level} keel={keel}")
    return AdjointChainResult(source=D, steps=tuple(steps), endpoint_case=case, level=level, keel=keel,
                              fiber=fiber, multiplicity=k, half_class=half)


def level_keel_divisor(S: SurfaceModel, D: DivisorClass) -> Tuple[Fraction, Fraction]:
    result = adjoint_chain(S, D)
    return result.level, result.keel


def pushed_source(result: AdjointChainResult) -> DivisorClass:
    """The input class pushed through every contraction of the chain."""
    D = result.source
    for step in result.steps:
        for contraction in step.contractions:
            D = contraction.pushforward(D)
    return D


# ---------------------------------------------------------------------------
# Endpoint surfaces and parametrizing classes
# ---------------------------------------------------------------------------

def _exact_multiple(D: DivisorClass, s: int) -> Optional[DivisorClass]:
    if any(c % s for c in D.coeffs):
        return None
    return D.surface.cls([c // s for c in D.coeffs])


def _surface_from_canonical(S: SurfaceModel):
    """Minimal endpoint without a fibration: the parametrizing class is a root of -K."""
    anti = -S.K
    degree = S.K.square
    if degree == 9:
        Q = _exact_multiple(anti, 3)
        tag = EndpointSurface.PLANE
    elif degree == 8:
        Q = _exact_multiple(anti, 2)
        tag = EndpointSurface.QUADRIC
    elif degree == 6:
        Q, tag = anti, EndpointSurface.DEL_PEZZO_6
    elif degree == 5:
        Q, tag = anti, EndpointSurface.DEL_PEZZO_5
    else:
        raise UnknownEndpoint(f"{S.tag} with K^2 = {degree} is not a supported minimal endpoint")
    if Q is None:
        raise UnknownEndpoint(f"-K on {S.tag} is not divisible as required for K^2 = {degree}")
    return tag, Q


def _surface_from_fiber(S: SurfaceModel, P: DivisorClass):
    """Conic bundle endpoint with fiber P; returns the tag, Q and the section data."""
    degree = S.K.square
    if degree == 8:
        sections = [G for G in S.generators() if G.dot(P) == 1]
        if not sections:
            raise UnknownEndpoint(f"no section of the fibration {P.describe()} on {S.tag}")
        C = min(sections, key=lambda G: (G.square, G.coeffs))
        n = -C.square
        Q = C + P if n == 0 else C + n * P
        return EndpointSurface.RULED, Q, C, n
    if degree == 6:
        bisections = [G for G in S.generators() if G.dot(P) == 2]
        if not bisections:
            raise UnknownEndpoint(f"no bisection of {P.describe()} on {S.tag}")
        return EndpointSurface.CONIC_BUNDLE_DEG2, P + bisections[0], None, None
    if degree == 5 and S.name == "plane_deg4_blowup":
        return EndpointSurface.CONIC_BUNDLE_DEG4, S.cls((1, 0)), None, None
    raise UnknownEndpoint(f"fibration {P.describe()} on {S.tag} (K^2 = {degree}) matches no case")


def classify_endpoint(result: AdjointChainResult):
    """(EndpointSurface, Q, model Q lives on, ruled section data) for the chain's terminal model."""
    S_a = result.last.surface
    case = result.endpoint_case
    if case == EndpointCase.FIBER_MULTIPLE:
        tag, Q, C, n = _surface_from_fiber(S_a, result.fiber)
        return tag, Q, S_a, (C, n)
    if case == EndpointCase.HALF_FIBER:
        S_b, B, _ = minimalize(S_a, result.half_class)
        tag, Q, C, n = _surface_from_fiber(S_b, B.primitive())
        return tag, Q, S_b, (C, n)
    tag, Q = _surface_from_canonical(S_a)
    return tag, Q, S_a, (None, None)


def _class_checks(Q: DivisorClass, fiber_endpoint: bool) -> Dict[str, bool]:
    S = Q.surface
    checks = {
        "q_nef": is_nef(Q),
        "q_dot_k_le_minus_3": Q.dot(S.K) <= -3,
    }
    if not fiber_endpoint:
        checks["q_dot_minus_k_le_6"] = Q.dot(-S.K) <= 6
    return checks


def pdeg_bounds(S: SurfaceModel, D: DivisorClass, chain: Optional[AdjointChainResult] = None) -> PdegBounds:
    if chain is None:
        chain = adjoint_chain(S, D)
    level, keel = chain.level, chain.keel
    lower = 3 * level + keel
    upper = 6 * level + 2 * keel
    case = chain.endpoint_case

    tag, Q, constructive = None, None, None
    C, n = None, None
    checks: Dict[str, bool] = {}
    try:
        tag, Q, _, (C, n) = classify_endpoint(chain)
    except UnknownEndpoint as e:
        if case in (EndpointCase.ZERO_CLASS, EndpointCase.FIBER_MULTIPLE):
            raise
        logger.warning(f"⚠️ Fractional endpoint {case.value} not classified: {e}")

    if Q is not None and case in (EndpointCase.ZERO_CLASS, EndpointCase.FIBER_MULTIPLE):
        S_a, D_a = chain.last.surface, chain.last.divisor
        a = chain.a
        pulled = D_a - a * S_a.K
        constructive = Q.dot(pulled)
        checks.update(_class_checks(Q, case == EndpointCase.FIBER_MULTIPLE))
        if tag == EndpointSurface.RULED and n:
            checks["ruled_nef_guard"] = pulled.dot(C) >= 0
        checks["sandwich"] = lower <= constructive <= upper
        if not checks["sandwich"]:
            logger.error(f"❌ Sandwich violated: {lower} <= {constructive} <= {upper} for {D.describe()} on {S.tag}")

    return PdegBounds(level=level, keel=keel, lower=lower, lower_int=ceil(lower), upper=upper,
                      constructive_upper=constructive, endpoint_surface=tag,
                      parametrizing_class=Q, checks=checks)


# ---------------------------------------------------------------------------
# Invariant suite and the definitional oracle
# ---------------------------------------------------------------------------

def check_chain_invariants(result: AdjointChainResult) -> Dict[str, bool]:
    checks = {}
    try:
        checks["nef_and_effective"] = all(is_nef(s.divisor) and is_effective(s.divisor) for s in result.steps)
    except Undecided:
        checks["nef_and_effective"] = False
    checks["big_before_end"] = all(s.divisor.square > 0 for s in result.steps[:-1])
    checks["a_le_level"] = result.a <= result.level
    checks["denominator_divides_6"] = 6 % result.level.denominator == 0
    try:
        S_a, D_a = result.last.surface, result.last.divisor
        checks["pushforward_identity"] = pushed_source(result) == D_a - result.a * S_a.K
    except NotContractible:
        checks["pushforward_identity"] = False
    return checks


def level_by_search(S: SurfaceModel, D: DivisorClass, q_max: int = 12) -> Fraction:
    """max p/q over q <= q_max with qD + pK effective."""
    cap = _iteration_cap(S, D)
    best = Fraction(0)
    for q in range(1, q_max + 1):
        p = 0
        while p < q * cap and is_effective(q * D + (p + 1) * S.K):
            p += 1
        best = max(best, Fraction(p, q))
    return best
