import json
import os
from fractions import Fraction
from typing import Any, Dict, Tuple

from utils.adjoint_utils import AdjointChainResult, PdegBounds, check_chain_invariants
from utils.errors import DegenerateInput, InputError, KeelError
from utils.high_degree_utils import HighDegreeReport
from utils.picard_utils import (
    DivisorClass, SurfaceModel, custom_model, model_from_tag, plane_class,
)
from utils.polygon_utils import LatticePolygon, PolygonChain, PolygonInvariants, normalize


def fraction_str(value) -> str:
    """Lowest-terms string ("5/2", "3", "-1/3")."""
    return str(Fraction(value))


# ---------------------------------------------------------------------------
# Input
# ---------------------------------------------------------------------------

def load_json_argument(raw: str, flag: str) -> Any:
    """Inline JSON, or a path to a JSON file."""
    text = raw
    if not raw.lstrip().startswith(("{", "[")) and os.path.exists(raw):
        try:
            with open(raw, 'r', encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise InputError(flag, f"cannot read {raw}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(flag, f"invalid JSON ({e.msg} at position {e.pos})")


def _int_list(value, field: str):
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise InputError(field, "must be a list of integers")
    return value


def parse_polygon(data: Any) -> LatticePolygon:
    if not isinstance(data, dict) or "vertices" not in data:
        raise InputError("vertices", "polygon input needs a 'vertices' list")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not vertices:
        raise InputError("vertices", "must be a nonempty list of [x, y] pairs")
    points = []
    for i, v in enumerate(vertices):
        if not isinstance(v, list) or len(v) != 2:
            raise InputError(f"vertices[{i}]", "must be an [x, y] pair")
        _int_list(v, f"vertices[{i}]")
        points.append((v[0], v[1]))
    try:
        return normalize(points)
    except DegenerateInput as e:
        raise InputError("vertices", str(e))


def parse_surface(data: Any) -> Tuple[SurfaceModel, DivisorClass]:
    """Built-in model tags or raw lattice data; plane blowups read D in (d; m) notation."""
    if not isinstance(data, dict):
        raise InputError("surface", "surface input must be a JSON object")
    if "D" not in data:
        raise InputError("D", "missing divisor class")
    D = _int_list(data["D"], "D")

    if "gram" in data:
        S = custom_model(
            gram=data["gram"], K=_int_list(data.get("K"), "K"),
            effective_generators=data.get("effective_generators", []),
            contractibles=data.get("contractibles", []),
        )
    else:
        name = data.get("model")
        if not isinstance(name, str):
            raise InputError("model", "missing model name")
        key = "r" if name == "plane_blowup" else "n"
        param = data.get(key)
        if param is not None and (not isinstance(param, int) or isinstance(param, bool)):
            raise InputError(key, "must be an integer")
        try:
            S = model_from_tag(name, param)
        except KeelError as e:
            if isinstance(e, InputError):
                raise
            raise InputError(key, str(e))

    if len(D) != S.rank:
        raise InputError("D", f"expected {S.rank} coefficients for {S.tag}, got {len(D)}")
    if S.name == "plane_blowup":
        return S, plane_class(S, D[0], *D[1:])
    return S, S.cls(D)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _points(vertices):
    return [[fraction_str(x), fraction_str(y)] for x, y in vertices]


def _class_data(D: DivisorClass):
    if D.surface.name == "plane_blowup":
        return [D.coeffs[0]] + [-c for c in D.coeffs[1:]]
    return list(D.coeffs)


def polygon_level_report(inv: PolygonInvariants) -> Dict[str, Any]:
    return {"level": fraction_str(inv.level), "keel": fraction_str(inv.keel)}


def polygon_keel_report(inv: PolygonInvariants) -> Dict[str, Any]:
    return {
        "keel": fraction_str(inv.keel),
        "level": fraction_str(inv.level),
        "optimal_face": _points(inv.optimal_face.vertices),
        "denominator": inv.denominator,
    }


def polygon_chain_report(chain: PolygonChain) -> Dict[str, Any]:
    return {
        "a": chain.a,
        "members": [{"shape": m.shape.value, "vertices": _points(m.vertices)} for m in chain.members],
        "endpoint": chain.endpoint.value if chain.endpoint else None,
        "level": fraction_str(chain.level) if chain.level is not None else None,
        "keel": fraction_str(chain.keel) if chain.keel is not None else None,
    }


def surface_level_report(result: AdjointChainResult) -> Dict[str, Any]:
    return {"level": fraction_str(result.level), "keel": fraction_str(result.keel)}


def surface_chain_report(result: AdjointChainResult) -> Dict[str, Any]:
    steps = []
    for step in result.steps:
        steps.append({
            "model": step.surface.tag,
            "D": _class_data(step.divisor),
            "class": step.divisor.describe(),
            "contractions": [c.describe() for c in step.contractions],
        })
    report = {
        "a": result.a,
        "steps": steps,
        "endpoint": result.endpoint_case.value,
        "level": fraction_str(result.level),
        "keel": fraction_str(result.keel),
    }
    if result.fiber is not None:
        report["fiber"] = result.fiber.describe()
    if result.multiplicity is not None:
        report["k"] = result.multiplicity
    report["invariants"] = {name: "pass" if ok else "fail" for name, ok in check_chain_invariants(result).items()}
    return report


def bounds_report(bounds: PdegBounds) -> Dict[str, Any]:
    report = {
        "level": fraction_str(bounds.level),
        "keel": fraction_str(bounds.keel),
        "lower": fraction_str(bounds.lower),
        "lower_int": bounds.lower_int,
        "upper": fraction_str(bounds.upper),
        "constructive_upper": fraction_str(bounds.constructive_upper) if bounds.constructive_upper is not None else None,
        "endpoint_surface": bounds.endpoint_surface.value if bounds.endpoint_surface else None,
    }
    if bounds.parametrizing_class is not None:
        report["parametrizing_class"] = bounds.parametrizing_class.describe()
    if bounds.checks:
        report["checks"] = {name: "pass" if ok else "fail" for name, ok in bounds.checks.items()}
    return report


def high_degree_report(report: HighDegreeReport) -> Dict[str, Any]:
    return {
        "n": report.n,
        "level": fraction_str(report.level),
        "keel": fraction_str(report.keel),
        "lower": fraction_str(report.lower),
        "upper": fraction_str(report.upper),
        "param_degree": report.param_degree,
        "sandwich": "ok" if report.sandwich else "violated",
        "h_square": report.h_square,
        "adjoint_degree": fraction_str(report.adjoint_degree),
        "profile": [{"multiplicity": m, "points": c} for m, c in report.profile],
        "residual_multiplicities": [{"multiplicity": m, "residual": fraction_str(r)}
                                   for m, r in report.residual_multiplicities],
        "feasible": f"2p <= {2 * report.n + 1}q",
        "checks": {name: "pass" if ok else "fail" for name, ok in report.checks.items()},
    }


def to_json(report: Any) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def to_text(report: Any, prefix: str = "") -> str:
    """Flat `key: value` lines, nested keys joined with dots."""
    lines = []
    if isinstance(report, dict):
        for key, value in report.items():
            name = f"{prefix}.{key}" if prefix else str(key)
            if isinstance(value, (dict, list)):
                lines.append(to_text(value, name).rstrip("\n"))
            else:
                lines.append(f"{name}: {value}")
    elif isinstance(report, list):
        for i, value in enumerate(report):
            name = f"{prefix}[{i}]"
            if isinstance(value, (dict, list)):
                lines.append(to_text(value, name).rstrip("\n"))
            else:
                lines.append(f"{name}: {value}")
    else:
        lines.append(f"{prefix}: {report}" if prefix else str(report))
    return "\n".join(line for line in lines if line) + "\n"
