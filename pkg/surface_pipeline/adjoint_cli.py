import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from utils.config_utils import BATCH_JOBS, DEFAULT_SEED, ORACLE_MAX_DENOMINATOR
from utils.adjoint_utils import adjoint_chain, check_chain_invariants, level_by_search, pdeg_bounds
from utils.errors import BadN, ChainInvariantError, InputError, KeelError
from utils.high_degree_utils import example_high_report
from utils.oracle_utils import effectivity_oracle, polygon_level_oracle
from utils.picard_utils import degree_mults, is_effective
from utils.polygon_utils import level_keel, polygon_adjoint_chain
from utils.render_utils import render_chain_svg
from utils import config_utils, report_utils

logger = logging.getLogger("AdjointCLI")

COMMANDS = ("level", "keel", "chain", "bounds", "example-high", "check")
FORMATS = ("json", "text", "svg")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2

SEARCH_DENOMINATOR = 12


@dataclass(frozen=True)
class RunConfig:
    command: str
    polygon: Optional[str] = None
    surface: Optional[str] = None
    output_format: str = "json"
    oracle: bool = False
    seed: int = DEFAULT_SEED
    n: Optional[int] = None
    batch: Optional[str] = None
    jobs: int = BATCH_JOBS
    output: Optional[str] = None


def parse_args(argv=None) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="adjoint_cli",
        description="Level, keel and parametric degree bounds of lattice polygons and rational surfaces",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--polygon", help="Polygon JSON ({\"vertices\": [[x, y], ...]}) or path to it")
    parser.add_argument("--surface", help="Surface JSON ({\"model\": ..., \"D\": [...]}) or path to it")
    parser.add_argument("--format", dest="output_format", choices=FORMATS, default="json")
    parser.add_argument("--oracle", action="store_true", help="Cross-check against the brute-force oracles")
    parser.add_argument("--seed", type=int, default=config_utils.DEFAULT_SEED, help="Oracle seed (overrides ADJOINT_KEEL_SEED)")
    parser.add_argument("--n", type=int, help="Odd n >= 5 for example-high")
    parser.add_argument("--batch", help="JSON list of {\"polygon\": ...} / {\"surface\": ...} items")
    parser.add_argument("--jobs", type=int, default=BATCH_JOBS, help="Worker processes for --batch")
    parser.add_argument("--output", help="Write the report here instead of standard output")
    args = parser.parse_args(argv)
    return RunConfig(
        command=args.command, polygon=args.polygon, surface=args.surface,
        output_format=args.output_format, oracle=args.oracle, seed=args.seed, n=args.n,
        batch=args.batch, jobs=args.jobs, output=args.output,
    )


def validate_config(config: RunConfig) -> None:
    if config.command == "example-high":
        if config.n is None:
            raise InputError("--n", "example-high needs --n")
    elif config.command != "check":
        given = [flag for flag, value in (("--polygon", config.polygon), ("--surface", config.surface),
                                          ("--batch", config.batch)) if value is not None]
        if len(given) != 1:
            raise InputError("--polygon", "give exactly one of --polygon, --surface or --batch")
    if config.output_format == "svg" and (config.polygon is None or config.batch is not None):
        raise InputError("--format", "svg output needs a single --polygon input")
    if config.jobs < 1:
        raise InputError("--jobs", "must be at least 1")


# ---------------------------------------------------------------------------
# Evaluation (top-level so batch items can run in worker processes)
# ---------------------------------------------------------------------------

def _polygon_report(command: str, data: Any, oracle: bool) -> Tuple[int, Dict[str, Any]]:
    polygon = report_utils.parse_polygon(data)
    inv = level_keel(polygon)
    code = EXIT_OK
    if command == "level":
        report = report_utils.polygon_level_report(inv)
    elif command == "keel":
        report = report_utils.polygon_keel_report(inv)
    elif command == "chain":
        report = report_utils.polygon_chain_report(polygon_adjoint_chain(polygon))
    else:
        report = {
            "level": report_utils.fraction_str(inv.level),
            "keel": report_utils.fraction_str(inv.keel),
            "lower": report_utils.fraction_str(3 * inv.level + inv.keel),
            "upper": report_utils.fraction_str(6 * inv.level + 2 * inv.keel),
            "constructive_upper": None,
        }

    if oracle:
        chain = polygon_adjoint_chain(polygon)
        searched = polygon_level_oracle(polygon, ORACLE_MAX_DENOMINATOR)
        level_ok = inv.denominator > ORACLE_MAX_DENOMINATOR or searched == inv.level
        chain_ok = chain.level == inv.level and chain.keel == inv.keel
        report["oracle"] = {
            "denominator_cap": ORACLE_MAX_DENOMINATOR,
            "searched_level": report_utils.fraction_str(searched),
            "level": "pass" if level_ok else "fail",
            "chain": "agrees" if chain_ok else "differs",
        }
        if not level_ok:
            code = EXIT_INVARIANT
    return code, report


def _surface_report(command: str, data: Any, oracle: bool, seed: int) -> Tuple[int, Dict[str, Any]]:
    S, D = report_utils.parse_surface(data)
    result = adjoint_chain(S, D)
    code = EXIT_OK
    if command in ("level", "keel"):
        report = report_utils.surface_level_report(result)
    elif command == "chain":
        report = report_utils.surface_chain_report(result)
    else:
        report = report_utils.bounds_report(pdeg_bounds(S, D, chain=result))

    if oracle:
        checks = dict(check_chain_invariants(result))
        if command == "bounds":
            checks.update(pdeg_bounds(S, D, chain=result).checks)
        if result.level.denominator <= SEARCH_DENOMINATOR:
            checks["level_by_search"] = level_by_search(S, D, SEARCH_DENOMINATOR) == result.level
        if S.name == "plane_blowup" and S.param <= 5:
            d, _ = degree_mults(D)
            if d <= 10:
                checks["effectivity_oracle"] = effectivity_oracle(D, seed=seed) == is_effective(D)
        report["oracle"] = {"seed": seed, **{name: "pass" if ok else "fail" for name, ok in checks.items()}}
        if not all(checks.values()):
            code = EXIT_INVARIANT
    return code, report


def evaluate(command: str, kind: str, data: Any, oracle: bool, seed: int) -> Tuple[int, Dict[str, Any]]:
    """Exit code and report for one polygon or surface input."""
    field = "vertices" if kind == "polygon" else "D"
    try:
        if kind == "polygon":
            return _polygon_report(command, data, oracle)
        return _surface_report(command, data, oracle, seed)
    except InputError as e:
        return EXIT_INPUT, {"error": {"field": e.field, "message": e.message}}
    except ChainInvariantError as e:
        return EXIT_INVARIANT, {"error": {"field": field, "message": str(e)}}
    except KeelError as e:
        return EXIT_INPUT, {"error": {"field": field, "message": f"{type(e).__name__}: {e}"}}


def _evaluate_item(args) -> Tuple[int, Dict[str, Any]]:
    command, item, oracle, seed = args
    if not isinstance(item, dict) or len(set(item) & {"polygon", "surface"}) != 1:
        return EXIT_INPUT, {"error": {"field": "batch", "message": "each item needs exactly one of 'polygon' or 'surface'"}}
    kind = "polygon" if "polygon" in item else "surface"
    return evaluate(command, kind, item[kind], oracle, seed)


def _run_batch(config: RunConfig) -> Tuple[int, List[Dict[str, Any]]]:
    items = report_utils.load_json_argument(config.batch, "--batch")
    if not isinstance(items, list):
        raise InputError("--batch", "must be a JSON list")
    jobs = [(config.command, item, config.oracle, config.seed) for item in items]
    logger.info(f"🚀 Batch of {len(jobs)} items with {config.jobs} worker(s)")
    if config.jobs == 1:
        results = [_evaluate_item(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            results = list(executor.map(_evaluate_item, jobs))
    code = max((c for c, _ in results), default=EXIT_OK)
    return code, [report for _, report in results]


def _serialize(report: Any, output_format: str) -> str:
    if output_format == "text":
        return report_utils.to_text(report)
    return report_utils.to_json(report)


def _diagnose(field: str, message: str) -> None:
    logger.error(f"❌ {field}: {message}")
    print(f"error: {field}: {message}", file=sys.stderr)


def run(config: RunConfig) -> Tuple[int, str]:
    """Exit code and serialized report; failed inputs print a diagnostic naming the field."""
    try:
        validate_config(config)
        if config.command == "check":
            from verify_examples import run_checks
            rows = run_checks(seed=config.seed)
            failures = sum(1 for row in rows if not row["ok"])
            report = {"checks": [{"name": r["name"], "expected": r["expected"], "got": r["got"],
                                  "status": "pass" if r["ok"] else "fail"} for r in rows],
                      "failures": failures}
            return (EXIT_INVARIANT if failures else EXIT_OK), _serialize(report, config.output_format)

        if config.command == "example-high":
            try:
                report = report_utils.high_degree_report(example_high_report(config.n))
            except BadN as e:
                raise InputError("--n", str(e))
            code = EXIT_OK if report["sandwich"] == "ok" or not config.oracle else EXIT_INVARIANT
            return code, _serialize(report, config.output_format)

        if config.batch is not None:
            code, reports = _run_batch(config)
            return code, _serialize(reports, config.output_format)

        kind = "polygon" if config.polygon is not None else "surface"
        flag = f"--{kind}"
        data = report_utils.load_json_argument(config.polygon if kind == "polygon" else config.surface, flag)
        code, report = evaluate(config.command, kind, data, config.oracle, config.seed)
        if "error" in report:
            _diagnose(report["error"]["field"], report["error"]["message"])
            return code, ""
        if config.output_format == "svg":
            polygon = report_utils.parse_polygon(data)
            return code, render_chain_svg(polygon_adjoint_chain(polygon))
        return code, _serialize(report, config.output_format)
    except InputError as e:
        _diagnose(e.field, e.message)
        return EXIT_INPUT, ""


def main(argv=None) -> int:
    config = parse_args(argv)
    code, text = run(config)
    if text:
        if config.output:
            with open(config.output, 'w', encoding='utf-8') as f:
                f.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
