import logging
import sys
from fractions import Fraction
from itertools import combinations_with_replacement

from utils.config_utils import DEFAULT_SEED, ORACLE_MAX_DENOMINATOR
from utils.adjoint_utils import adjoint_chain, check_chain_invariants, pdeg_bounds
from utils.endpoint_utils import EndpointCase
from utils.errors import KeelError
from utils.high_degree_utils import example_high_report
from utils.oracle_utils import effectivity_oracle, polygon_level_oracle
from utils.picard_utils import (
    hirzebruch, is_effective, is_nef, neg_one_classes, plane_blowup, plane_class, quadric,
)
from utils.polygon_utils import level_keel, normalize, polygon_adjoint_chain

logger = logging.getLogger("VerifyExamples")

NEG_ONE_COUNTS = {1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}


def triangle(n):
    return normalize([(0, 0), (n, 0), (0, n)])


def rectangle(m, n):
    return normalize([(0, 0), (n, 0), (n, m), (0, m)])


HEXAGON = [(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)]


def generated_classes():
    """Nef and big classes on plane_blowup(r <= 6) and hirzebruch(n <= 3) with small coefficients."""
    for r in range(0, 7):
        S = plane_blowup(r)
        for d in range(1, 7):
            for mults in combinations_with_replacement(range(2, -1, -1), r):
                D = plane_class(S, d, *mults)
                if D.square > 0 and is_nef(D):
                    yield S, D
    for n in range(0, 4):
        S = hirzebruch(n)
        for x in range(1, 5):
            for y in range(0, 13):
                D = S.cls((x, y))
                if D.square > 0 and is_nef(D):
                    yield S, D


def _row(name, expected, got):
    return {"name": name, "expected": str(expected), "got": str(got), "ok": expected == got}


def _polygon_rows():
    rows = []
    bad = []
    for n in range(1, 31):
        inv = level_keel(triangle(n))
        if (inv.level, inv.keel) != (Fraction(n, 3), 0):
            bad.append(n)
    rows.append(_row("triangles n=1..30: (n/3, 0)", [], bad))

    bad = []
    for m in range(1, 13):
        for n in range(m, 13):
            inv = level_keel(rectangle(m, n))
            if (inv.level, inv.keel) != (Fraction(m, 2), n - m):
                bad.append((m, n))
    rows.append(_row("rectangles m<=n<=12: (m/2, n-m)", [], bad))

    captions = [
        ("triangle 9", triangle(9), (Fraction(3), Fraction(0))),
        ("rectangle 4x6", rectangle(4, 6), (Fraction(2), Fraction(2))),
        ("rectangle 5x6", rectangle(5, 6), (Fraction(5, 2), Fraction(1))),
        ("triangle 7", triangle(7), (Fraction(7, 3), Fraction(0))),
        ("triangle 8", triangle(8), (Fraction(8, 3), Fraction(0))),
    ]
    for name, polygon, expected in captions:
        inv = level_keel(polygon)
        searched = polygon_level_oracle(polygon, ORACLE_MAX_DENOMINATOR)
        chain = polygon_adjoint_chain(polygon)
        got = (inv.level, inv.keel) if searched == inv.level and (chain.level, chain.keel) == expected else "mismatch"
        rows.append(_row(f"{name} (oracle + chain)", expected, got))
    return rows


def _chain_rows():
    rows = []
    P2 = plane_blowup(0)
    bad = []
    for n in range(1, 10):
        r = adjoint_chain(P2, P2.cls((n,)))
        if (r.level, r.keel) != (Fraction(n, 3), 0):
            bad.append(n)
    rows.append(_row("(plane, nL): (n/3, 0)", [], bad))

    Q = quadric()
    bad = []
    for m in range(1, 7):
        for n in range(m, 7):
            r = adjoint_chain(Q, Q.cls((m, n)))
            if (r.level, r.keel) != (Fraction(m, 2), n - m):
                bad.append((m, n))
    rows.append(_row("(quadric, mF1+nF2): (m/2, n-m)", [], bad))

    S6 = plane_blowup(6)
    r = adjoint_chain(S6, -S6.K)
    rows.append(_row("(plane_blowup(6), -K)", (Fraction(1), Fraction(0)), (r.level, r.keel)))
    r = adjoint_chain(Q, Q.cls((1, 1)))
    rows.append(_row("(quadric, F1+F2) endpoint", (EndpointCase.HALF.value, Fraction(1, 2)),
                     (r.endpoint_case.value, r.level)))
    r = adjoint_chain(Q, Q.cls((1, 2)))
    rows.append(_row("(quadric, F1+2F2) endpoint", (EndpointCase.HALF_FIBER.value, Fraction(1)),
                     (r.endpoint_case.value, r.keel)))
    return rows


def _high_degree_rows():
    rows = []
    for n in (5, 7, 9):
        report = example_high_report(n)
        expected = (n + Fraction(1, 2), Fraction(2 * n * n - 5 * n - 5, 4), Fraction(2 * n * n + 7 * n + 1, 4), True)
        got = (report.level, report.keel, report.lower, report.sandwich and all(report.checks.values()))
        rows.append(_row(f"degree {n * n + 1} example n={n}", expected, got))
    return rows


def _sandwich_rows():
    checked, violations, failures = 0, [], []
    for S, D in generated_classes():
        try:
            result = adjoint_chain(S, D)
            bounds = pdeg_bounds(S, D, chain=result)
        except KeelError as e:
            failures.append(f"{S.tag} {D.describe()}: {type(e).__name__}")
            continue
        if not all(check_chain_invariants(result).values()):
            failures.append(f"{S.tag} {D.describe()}: invariants")
        if bounds.constructive_upper is not None:
            checked += 1
            if not all(bounds.checks.values()):
                violations.append(f"{S.tag} {D.describe()}")
    return [
        _row("sandwich battery: violations", [], violations),
        _row("sandwich battery: chain failures", [], failures),
        _row("sandwich battery: at least 100 checked", True, checked >= 100),
    ]


def _lattice_rows(seed):
    rows = []
    for r, count in NEG_ONE_COUNTS.items():
        rows.append(_row(f"(-1)-classes r={r}", count, len(neg_one_classes(plane_blowup(r)))))

    hexagon = level_keel(normalize(HEXAGON))
    S3 = plane_blowup(3)
    dp6 = adjoint_chain(S3, -S3.K)
    rows.append(_row("hexagon vs plane_blowup(3) -K", (hexagon.level, hexagon.keel), (dp6.level, dp6.keel)))
    square = level_keel(normalize([(0, 0), (2, 0), (2, 2), (0, 2)]))
    Q = quadric()
    quad = adjoint_chain(Q, Q.cls((2, 2)))
    rows.append(_row("square vs (quadric, 2F1+2F2)", (square.level, square.keel), (quad.level, quad.keel)))

    # Quick effectivity spot-check; the full grid lives in the test suite
    bad = []
    for r in range(0, 4):
        S = plane_blowup(r)
        for d in range(0, 5):
            for mults in combinations_with_replacement(range(3, -1, -1), r):
                D = plane_class(S, d, *mults)
                if is_effective(D) != effectivity_oracle(D, seed=seed):
                    bad.append((r, d, mults))
    rows.append(_row("is_effective vs fat-point oracle (r<=3, d<=4)", [], bad))
    return rows


def run_checks(seed: int = DEFAULT_SEED):
    rows = []
    for section in (_polygon_rows, _chain_rows, _high_degree_rows, _sandwich_rows):
        rows.extend(section())
    rows.extend(_lattice_rows(seed))
    return rows


def verify_all(seed: int = DEFAULT_SEED) -> int:
    print("📋 Verifying level/keel examples...\n")
    rows = run_checks(seed)
    print(f"{'Check':<52} | {'Status':<6} | {'Got'}")
    print("-" * 100)
    for row in rows:
        status = "OK" if row["ok"] else "FAIL"
        print(f"{row['name'][:52]:<52} | {status:<6} | {row['got'][:38]}")
    failures = sum(1 for row in rows if not row["ok"])
    print("-" * 100)
    print(f"✅ All {len(rows)} checks passed." if not failures else f"❌ {failures} of {len(rows)} checks failed.")
    return failures


if __name__ == "__main__":
    sys.exit(1 if verify_all() else 0)
