import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, symbols
from sympy.polys.domains import ZZ
from sympy.utilities.iterables import multiset_permutations

from utils.errors import (
    InputError, ModelMismatch, NotContractible, Undecided, UnsupportedRank,
)
from utils.weyl_utils import move_to_last_exceptional

logger = logging.getLogger("PicardUtils")

Vector = Tuple[int, ...]
Gram = Tuple[Tuple[int, ...], ...]

MAX_PLANE_POINTS = 8
PEEL_STEPS_PER_RANK = 64


@dataclass(frozen=True)
class SurfaceModel:
    """Picard lattice of a rational surface model: form, canonical class and cone data.

    Every class is stored as a coefficient vector over ``basis``; the model keeps plain
    tuples so that models compare and hash by value.
    """
    name: str
    param: Optional[int]
    basis: Tuple[str, ...]
    gram: Gram
    canonical: Vector
    effective_generators: Tuple[Vector, ...]
    contractibles: Tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def tag(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"

    @cached_property
    def gram_array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    @property
    def K(self) -> "DivisorClass":
        return DivisorClass(self, self.canonical)

    def cls(self, coeffs: Sequence[int]) -> "DivisorClass":
        return DivisorClass(self, tuple(int(c) for c in coeffs))

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, (0,) * self.rank)

    def generators(self) -> List["DivisorClass"]:
        return [DivisorClass(self, g) for g in self.effective_generators]

    def exceptional_classes(self) -> List["DivisorClass"]:
        return [DivisorClass(self, e) for e in self.contractibles]

    @cached_property
    def nef_witnesses(self) -> Tuple[Vector, ...]:
        """Nef classes used to refute effectivity: nef generators, plus -K when nef."""
        if not self.effective_generators:
            return ()
        found = [g for g in self.effective_generators if is_nef(self.cls(g))]
        anti = tuple(-c for c in self.canonical)
        if is_nef(self.cls(anti)) and any(anti) and anti not in found:
            found.append(anti)
        return tuple(found)

    def __repr__(self) -> str:
        return f"SurfaceModel({self.tag})"


@dataclass(frozen=True)
class DivisorClass:
    surface: SurfaceModel
    coeffs: Vector

    def _check(self, other: "DivisorClass"):
        if self.surface is not other.surface and self.surface != other.surface:
            raise ModelMismatch(f"{self.surface.tag} vs {other.surface.tag}")

    def dot(self, other: "DivisorClass") -> int:
        self._check(other)
        a = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        return int(a @ self.surface.gram_array @ b)

    @property
    def square(self) -> int:
        return self.dot(self)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(-a for a in self.coeffs))

    def __mul__(self, s: int) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(s * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def content(self) -> int:
        """gcd of the coefficients (0 for the zero class)."""
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> "DivisorClass":
        g = self.content()
        if g == 0:
            return self
        return DivisorClass(self.surface, tuple(c // g for c in self.coeffs))

    def describe(self) -> str:
        terms = []
        for c, b in zip(self.coeffs, self.surface.basis):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            size = "" if abs(c) == 1 else str(abs(c))
            terms.append((sign, f"{size}{b}"))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            text += f" {sign} {term}"
        return text

    def __repr__(self) -> str:
        return f"DivisorClass({self.surface.tag}: {self.describe()})"


def intersect(A: DivisorClass, B: DivisorClass) -> int:
    return A.dot(B)


def arithmetic_genus_fiber(P: DivisorClass) -> Fraction:
    return Fraction(P.square + P.dot(P.surface.K), 2) + 1


def riemann_roch(D: DivisorClass) -> Fraction:
    """D(D-K)/2 + 1, a lower bound for dim|D| + 1 once h^2(D) = 0."""
    return Fraction(D.dot(D - D.surface.K), 2) + 1


def _sign_changes(coeffs) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def signature(gram) -> Tuple[int, int]:
    """(positive, negative) inertia of a symmetric integer matrix via Descartes' rule."""
    x = symbols('x')
    coeffs = Matrix(gram).charpoly(x).all_coeffs()
    n = len(coeffs) - 1
    mirrored = [c * (-1) ** (n - i) for i, c in enumerate(coeffs)]
    return _sign_changes(coeffs), _sign_changes(mirrored)


# ---------------------------------------------------------------------------
# (-1)-classes on plane blowups
# ---------------------------------------------------------------------------

def _sorted_solutions(k: int, total: int, squares: int, cap: Optional[int] = None):
    """Nonincreasing integer k-tuples with the given sum and sum of squares."""
    if k == 0:
        if total == 0 and squares == 0:
            yield ()
        return
    if squares < 0 or total * total > k * squares:
        return
    hi = isqrt(squares)
    if cap is not None:
        hi = min(hi, cap)
    for v in range(hi, -isqrt(squares) - 1, -1):
        if total - v > (k - 1) * v:
            break
        for rest in _sorted_solutions(k - 1, total - v, squares - v * v, v):
            yield (v,) + rest


@lru_cache(maxsize=None)
def _neg_one_vectors(r: int, bound: Optional[int] = None) -> Tuple[Vector, ...]:
    """Coefficient vectors of all (d; m) with d^2 - sum m^2 = -1 and 3d - sum m = 1."""
    found = []
    d = 0
    while True:
        # Cauchy-Schwarz: (3d - 1)^2 <= r (d^2 + 1)
        if d > 0 and (3 * d - 1) ** 2 > r * (d * d + 1):
            break
        if bound is not None and d > bound:
            break
        for mults in _sorted_solutions(r, 3 * d - 1, d * d + 1):
            for perm in multiset_permutations(list(mults)):
                found.append((d,) + tuple(-m for m in perm))
        d += 1
    return tuple(sorted(found))


def neg_one_classes(S: SurfaceModel, bound: Optional[int] = None) -> List[DivisorClass]:
    if S.name != "plane_blowup":
        raise UnsupportedRank(f"(-1)-class search is only defined on plane blowups, not {S.tag}")
    if S.param > MAX_PLANE_POINTS:
        raise UnsupportedRank(f"plane_blowup({S.param}) has infinitely many (-1)-classes")
    return [S.cls(v) for v in _neg_one_vectors(S.param, bound)]


# ---------------------------------------------------------------------------
# Model factories
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def plane_blowup(r: int) -> SurfaceModel:
    if r < 0:
        raise UnsupportedRank(f"negative number of points: {r}")
    if r > MAX_PLANE_POINTS:
        raise UnsupportedRank(f"plane_blowup({r}): effective cone is not finitely generated for r > 8")
    gram = tuple(tuple((1 if i == 0 else -1) if i == j else 0 for j in range(r + 1)) for i in range(r + 1))
    canonical = (-3,) + (1,) * r
    exceptional = _neg_one_vectors(r) if r > 0 else ()
    if r == 0:
        generators = ((1,),)
    elif r == 1:
        generators = ((0, 1), (1, -1))
    else:
        generators = exceptional
    return SurfaceModel(
        name="plane_blowup", param=r,
        basis=("L",) + tuple(f"E{i}" for i in range(1, r + 1)),
        gram=gram, canonical=canonical,
        effective_generators=generators, contractibles=exceptional,
    )


@lru_cache(maxsize=None)
def hirzebruch(n: int) -> SurfaceModel:
    if n < 0:
        raise InputError("n", f"Hirzebruch index must be nonnegative, got {n}")
    return SurfaceModel(
        name="hirzebruch", param=n, basis=("C", "f"),
        gram=((-n, 1), (1, 0)), canonical=(-2, -(n + 2)),
        effective_generators=((1, 0), (0, 1)),
        contractibles=((1, 0),) if n == 1 else (),
    )


@lru_cache(maxsize=None)
def quadric() -> SurfaceModel:
    return SurfaceModel(
        name="quadric", param=None, basis=("F1", "F2"),
        gram=((0, 1), (1, 0)), canonical=(-2, -2),
        effective_generators=((1, 0), (0, 1)), contractibles=(),
    )


@lru_cache(maxsize=None)
def quadric_deg2_blowup() -> SurfaceModel:
    """Conic bundle with fiber P and a Galois-stable pair of (-1)-curves E (P.E = 2)."""
    return SurfaceModel(
        name="quadric_deg2_blowup", param=None, basis=("P", "E"),
        gram=((0, 2), (2, -2)), canonical=(-2, -1),
        effective_generators=((1, 0), (0, 1)), contractibles=((0, 1),),
    )


@lru_cache(maxsize=None)
def plane_deg4_blowup() -> SurfaceModel:
    """Plane blown up in a Galois orbit of four points; E is the sum of the exceptional curves."""
    return SurfaceModel(
        name="plane_deg4_blowup", param=None, basis=("L", "E"),
        gram=((1, 0), (0, -4)), canonical=(-3, 1),
        effective_generators=((0, 1), (2, -1)), contractibles=((0, 1),),
    )


def custom_model(gram, K, effective_generators=(), contractibles=(), name="custom") -> SurfaceModel:
    """Validated lattice model from raw data (the JSON custom-surface input)."""
    try:
        gram_t = tuple(tuple(int(v) for v in row) for row in gram)
    except (TypeError, ValueError):
        raise InputError("gram", "must be a square integer matrix")
    n = len(gram_t)
    if n == 0 or any(len(row) != n for row in gram_t):
        raise InputError("gram", "must be a nonempty square matrix")
    if any(gram_t[i][j] != gram_t[j][i] for i in range(n) for j in range(n)):
        raise InputError("gram", "must be symmetric")
    if signature(gram_t) != (1, n - 1):
        raise InputError("gram", f"signature {signature(gram_t)} is not hyperbolic (1, {n - 1})")

    def vectors(field, rows):
        out = []
        for row in rows:
            if len(row) != n:
                raise InputError(field, f"vector {list(row)} does not have length {n}")
            out.append(tuple(int(v) for v in row))
        return tuple(out)

    canonical = vectors("K", [K])[0]
    model = SurfaceModel(
        name=name, param=None, basis=tuple(f"e{i}" for i in range(1, n + 1)),
        gram=gram_t, canonical=canonical,
        effective_generators=vectors("effective_generators", effective_generators),
        contractibles=vectors("contractibles", contractibles),
    )
    for E in model.exceptional_classes():
        if not (E.square == E.dot(model.K) < 0):
            raise InputError("contractibles", f"{list(E.coeffs)} does not satisfy E^2 = E.K < 0")
    return model


def plane_class(S: SurfaceModel, d: int, *mults: int) -> DivisorClass:
    """The class dL - sum m_i E_i on plane_blowup(r); missing multiplicities are 0."""
    if S.name != "plane_blowup":
        raise ModelMismatch(f"(d; m) notation needs a plane blowup, not {S.tag}")
    if len(mults) > S.param:
        raise ModelMismatch(f"{len(mults)} multiplicities on {S.tag}")
    padded = tuple(mults) + (0,) * (S.param - len(mults))
    return S.cls((d,) + tuple(-m for m in padded))


def degree_mults(D: DivisorClass) -> Tuple[int, Tuple[int, ...]]:
    if D.surface.name != "plane_blowup":
        raise ModelMismatch(f"(d; m) notation needs a plane blowup, not {D.surface.tag}")
    return D.coeffs[0], tuple(-c for c in D.coeffs[1:])


# ---------------------------------------------------------------------------
# Cone membership
# ---------------------------------------------------------------------------

def is_nef(D: DivisorClass) -> bool:
    S = D.surface
    if not S.effective_generators:
        raise UnsupportedRank(f"{S.tag} carries no effective cone data")
    return all(D.dot(G) >= 0 for G in S.generators())


def _nonnegative_over_generators(D: DivisorClass) -> bool:
    gens = D.surface.effective_generators
    if len(gens) != D.surface.rank:
        return False
    A = Matrix(gens).T
    if A.det() == 0:
        return False
    solution = A.LUsolve(Matrix(D.coeffs))
    return all(c.is_integer and c >= 0 for c in solution)


def is_effective(D: DivisorClass) -> bool:
    """Peel fixed components, then decide by generators, nef witnesses or Riemann-Roch."""
    S = D.surface
    witnesses = [S.cls(w) for w in S.nef_witnesses]
    negatives = [G for G in S.generators() if G.square < 0]

    current = D
    for _ in range(S.rank * PEEL_STEPS_PER_RANK + 1):
        if current.is_zero():
            return True
        if any(current.dot(A) < 0 for A in witnesses):
            return False
        fixed = next((G for G in negatives if current.dot(G) < 0), None)
        if fixed is None:
            break
        current = current - fixed
    else:
        raise Undecided(f"peeling {D.describe()} on {S.tag} did not terminate")

    if _nonnegative_over_generators(current):
        return True
    # h^2(D) = h^0(K - D) = 0 once K - D pairs negatively with a nef class
    h2_vanishes = any((S.K - current).dot(A) < 0 for A in witnesses)
    if is_nef(current) and h2_vanishes and riemann_roch(current) > 0:
        return True
    raise Undecided(f"cannot decide effectivity of {D.describe()} on {S.tag}")


# ---------------------------------------------------------------------------
# Contractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Contraction:
    """A blowdown source -> target, with the integer pushforward and pullback matrices."""
    source: SurfaceModel
    target: SurfaceModel
    exceptional: Vector
    push: Tuple[Tuple[Fraction, ...], ...]
    pull: Tuple[Tuple[int, ...], ...]

    def pushforward(self, D: DivisorClass) -> DivisorClass:
        if D.surface != self.source:
            raise ModelMismatch(f"{D.surface.tag} is not the source {self.source.tag}")
        image = [sum((row[j] * c for j, c in enumerate(D.coeffs)), Fraction(0)) for row in self.push]
        if any(v.denominator != 1 for v in image):
            raise NotContractible(f"pushforward of {D.describe()} is not integral")
        return self.target.cls([int(v) for v in image])

    def pullback(self, D: DivisorClass) -> DivisorClass:
        if D.surface != self.target:
            raise ModelMismatch(f"{D.surface.tag} is not the target {self.target.tag}")
        return self.source.cls([sum(row[j] * c for j, c in enumerate(D.coeffs)) for row in self.pull])

    def describe(self) -> str:
        return f"{self.source.tag} -> {self.target.tag} (E = {self.source.cls(self.exceptional).describe()})"


def _as_rows(M, cast) -> tuple:
    return tuple(tuple(cast(v) for v in row) for row in M)


def _plane_contraction(S: SurfaceModel, E: Vector) -> Contraction:
    r = S.param
    if r == 2 and E == (1, -1, -1):
        # L - E1 - E2 down to the quadric: F1 = L - E1, F2 = L - E2
        F1, F2 = S.cls((1, -1, 0)), S.cls((1, 0, -1))
        push = [[int(v) for v in np.array(F2.coeffs) @ S.gram_array],
                [int(v) for v in np.array(F1.coeffs) @ S.gram_array]]
        pull = [[F1.coeffs[i], F2.coeffs[i]] for i in range(3)]
        return Contraction(S, quadric(), E, _as_rows(push, Fraction), _as_rows(pull, int))

    W, W_inv = move_to_last_exceptional(E)
    push = W[:-1, :]
    pull = W_inv[:, :-1]
    return Contraction(S, plane_blowup(r - 1), E, _as_rows(push.tolist(), Fraction), _as_rows(pull.tolist(), int))


def _kernel_basis(w: Sequence[int]) -> List[List[int]]:
    """Z-basis of {x : w.x = 0} by unimodular column operations (extended gcd)."""
    n = len(w)
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    vals = [int(v) for v in w]
    for i in range(1, n):
        a, b = vals[0], vals[i]
        if b == 0:
            continue
        x, y, g = (int(v) for v in ZZ.gcdex(ZZ(a), ZZ(b)))
        c0 = [x * u + y * v for u, v in zip(cols[0], cols[i])]
        ci = [(-b // g) * u + (a // g) * v for u, v in zip(cols[0], cols[i])]
        cols[0], cols[i] = c0, ci
        vals[0], vals[i] = g, 0
    if vals[0] == 0:
        return cols
    return cols[1:]


def _is_integral(M) -> bool:
    return all(v.is_integer for v in M)


def _orthogonal_contraction(S: SurfaceModel, E: Vector) -> Contraction:
    """Blowdown of E on a lattice model: the target lattice is the complement of E."""
    G = Matrix(S.gram)
    w = list(G * Matrix(E))
    B = Matrix.hstack(*[Matrix(c) for c in _kernel_basis(w)])
    gram_t = B.T * G * B
    M = gram_t.inv() * B.T * G
    K_t = M * Matrix(S.canonical)
    if not _is_integral(K_t):
        raise NotContractible(f"canonical class of {S.tag} does not descend past {list(E)}")

    if gram_t.shape == (1, 1) and gram_t[0, 0] == 1 and K_t[0] == 3:
        B, M, K_t = -B, -M, -K_t

    gram_rows = _as_rows(gram_t.tolist(), int)
    canonical = tuple(int(v) for v in K_t)
    if gram_rows == ((1,),) and canonical == (-3,):
        target = plane_blowup(0)
    elif gram_rows == ((0, 1), (1, 0)) and canonical == (-2, -2):
        target = quadric()
    else:
        generators = []
        for g in S.effective_generators:
            image = M * Matrix(g)
            if not _is_integral(image):
                raise NotContractible(f"generator {list(g)} of {S.tag} does not push forward integrally")
            vec = tuple(int(v) for v in image)
            if any(vec) and vec not in generators:
                generators.append(vec)
        provisional = SurfaceModel("custom", None, tuple(f"e{i}" for i in range(1, len(canonical) + 1)),
                                   gram_rows, canonical, tuple(generators), ())
        survivors = []
        for other in S.contractibles:
            if other == E or S.cls(other).dot(S.cls(E)) != 0:
                continue
            pushed = M * Matrix(other)
            if not _is_integral(pushed):
                continue
            image = provisional.cls([int(v) for v in pushed])
            if image.square == image.dot(provisional.K) < 0 and image.coeffs not in survivors:
                survivors.append(image.coeffs)
        target = SurfaceModel("custom", None, provisional.basis, gram_rows, canonical,
                              tuple(generators), tuple(survivors))

    return Contraction(S, target, E, _as_rows(M.tolist(), lambda v: Fraction(int(v.p), int(v.q))),
                       _as_rows(B.tolist(), int))


def blowdown(S: SurfaceModel, E: DivisorClass) -> Contraction:
    if E.surface != S:
        raise ModelMismatch(f"{E.surface.tag} is not {S.tag}")
    if E.coeffs not in S.contractibles:
        raise NotContractible(f"{E.describe()} is not a contractible class of {S.tag}")
    if S.name == "plane_blowup":
        contraction = _plane_contraction(S, E.coeffs)
    else:
        contraction = _orthogonal_contraction(S, E.coeffs)
    logger.debug(f"🔎 Blowdown {contraction.describe()}")
    return contraction


def contract(S: SurfaceModel, E: DivisorClass, D: DivisorClass) -> Tuple[SurfaceModel, DivisorClass]:
    contraction = blowdown(S, E)
    return contraction.target, contraction.pushforward(D)


def minimalize(S: SurfaceModel, D: DivisorClass, reverse: bool = False
               ) -> Tuple[SurfaceModel, DivisorClass, List[Contraction]]:
    """Blow down contractible classes orthogonal to D until none is left.

    Each round picks the lexicographically smallest eligible coefficient vector
    (largest with ``reverse``).
    """
    contractions = []
    while True:
        eligible = [E for E in S.contractibles if D.dot(S.cls(E)) == 0]
        if not eligible:
            break
        chosen = max(eligible) if reverse else min(eligible)
        contraction = blowdown(S, S.cls(chosen))
        D = contraction.pushforward(D)
        S = contraction.target
        contractions.append(contraction)
    return S, D, contractions


def compose_pullback(contractions: Sequence[Contraction], D: DivisorClass) -> DivisorClass:
    """Pull a class on the last target back through a list of contractions."""
    for contraction in reversed(contractions):
        D = contraction.pullback(D)
    return D


def model_from_tag(name: str, param: Optional[int] = None) -> SurfaceModel:
    factories: Dict[str, object] = {
        "plane_blowup": plane_blowup,
        "hirzebruch": hirzebruch,
        "quadric": quadric,
        "quadric_deg2_blowup": quadric_deg2_blowup,
        "plane_deg4_blowup": plane_deg4_blowup,
    }
    if name not in factories:
        raise InputError("model", f"unknown model {name!r}")
    if name in ("plane_blowup", "hirzebruch"):
        if param is None:
            raise InputError("r" if name == "plane_blowup" else "n", f"{name} needs a parameter")
        return factories[name](param)
    return factories[name]()
