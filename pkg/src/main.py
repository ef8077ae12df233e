"""
Main Module for Multiple Laguerre Verification

Command-line front end. Every subcommand validates its parameters, runs one
verification route through ``VerificationRunner`` and prints a report (text
or JSON) on stdout. Diagnostics go to stderr.

Exit codes: 0 PASS, 1 mathematical FAIL, 2 usage error, 3 budget-truncated.
"""

import argparse
import json
import logging
import math
import re
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .config import RunConfig, Settings, load_settings
from .digraphs import EnumerationCapExceeded, LayerGraphSpec, combinatorial_laguerre
from .hankel import (
    DESK_TABLE,
    VERDICT_FAIL,
    VERDICT_INCOMPLETE,
    VERDICT_PASS,
    HankelSpec,
    SweepOptions,
    build_hankel,
    numeric_prescreen,
    verify_all_minors,
)
from .laguerre import (
    LaguerreCache,
    MultiIndex,
    check_permutation_symmetry,
    egf_laguerre_table,
    explicit_laguerre,
)
from .polyring import eval_exact
from .reporting import all_schemas, build_eval_report, build_report, render_text, report_schema, validate_report, write_report
from .stieltjes import (
    ParameterError,
    bessel_moment_r1,
    check_moment,
    check_orthogonality,
    moment_integral,
    moment_integral_boundary_r1,
    orthogonality_scale,
    relative_error,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3

VERDICT_EXIT_CODES = {
    VERDICT_PASS: EXIT_PASS,
    VERDICT_FAIL: EXIT_FAIL,
    VERDICT_INCOMPLETE: EXIT_INCOMPLETE,
}

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

DEFAULT_MOMENT_POINTS = "0,0.7,2"
DEFAULT_BOUNDARY_POINTS = "0.5,1,2"
DEFAULT_MOMENT_TOLERANCE = 1e-8
DEFAULT_ORTHO_TOLERANCE = 1e-9

# enumerations with |n| below this run in-process
PARALLEL_ENUMERATION_MIN = 6


def _overall_verdict(verdicts: Sequence[str]) -> str:
    if VERDICT_FAIL in verdicts:
        return VERDICT_FAIL
    if VERDICT_INCOMPLETE in verdicts:
        return VERDICT_INCOMPLETE
    return VERDICT_PASS


def _fractions(text: str) -> List[Fraction]:
    return [Fraction(piece) for piece in text.split(",")]


def _pass_fail(results: Sequence[Dict[str, Any]]) -> str:
    return VERDICT_PASS if all(r["passed"] for r in results) else VERDICT_FAIL


class VerificationRunner:
    """
    Coordinates the verification routes for one CLI invocation

    One LaguerreCache is shared by every route the runner dispatches.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the runner

        Args:
            settings (Settings): process-wide defaults (optional)
        """
        self.settings = settings or Settings()
        self.cache = LaguerreCache(self.settings.laguerre_cache_size)
        self.explicit: Callable = explicit_laguerre
        logger.info("VerificationRunner initialized")

    def run(self, config: RunConfig) -> Dict[str, Any]:
        handlers = {
            "eval": self.cmd_eval,
            "combi-verify": self.cmd_combi_verify,
            "egf-verify": self.cmd_egf_verify,
            "symmetry-verify": self.cmd_symmetry_verify,
            "hankel-verify": self.cmd_hankel_verify,
            "hankel-table": self.cmd_hankel_table,
            "moments-verify": self.cmd_moments_verify,
            "ortho-verify": self.cmd_ortho_verify,
            "boundary-verify": self.cmd_boundary_verify,
            "bessel-verify": self.cmd_bessel_verify,
        }
        try:
            handler = handlers[config.subcommand]
        except KeyError:
            raise ValueError(f"unknown subcommand {config.subcommand!r}")
        logger.info(f"Running {config.subcommand}")
        report = handler(config)

        validation = validate_report(report)
        if not validation["valid"]:
            logger.error(f"Report failed schema validation: {validation['errors']}")
            raise RuntimeError(f"{config.subcommand} produced an invalid report")
        for warning in validation["warnings"]:
            logger.warning(warning)
        return report

    def _parameters(self, config: RunConfig) -> Dict[str, Any]:
        return config.model_dump(exclude_none=True, exclude={"out", "format"})

    def cmd_eval(self, config: RunConfig) -> Dict[str, Any]:
        """Explicit polynomial for one multi-index."""
        n = config.multi_index("n")
        return build_eval_report(n.parts, self.explicit(n, self.cache))

    def cmd_combi_verify(self, config: RunConfig) -> Dict[str, Any]:
        """
        Digraph enumeration against the explicit sum for every |n| <= max_total

        Returns:
            dict: report; the summary names the first offending n and both
            polynomials on a mismatch
        """
        max_total = config.max_total if config.max_total is not None else 0
        results: List[Dict[str, Any]] = []
        summary: Dict[str, Any] = {}
        for r in config.arities():
            for n in MultiIndex.iter_total(r, max_total):
                combinatorial = combinatorial_laguerre(
                    LayerGraphSpec(n),
                    vertex_cap=self.settings.enumeration_vertex_cap,
                    digraph_cap=self.settings.enumeration_digraph_cap,
                    workers=config.workers if n.total() >= PARALLEL_ENUMERATION_MIN else 1,
                )
                explicit = self.explicit(n, self.cache)
                passed = combinatorial == explicit
                # the weight polynomial at all-ones counts the digraphs
                digraphs = int(eval_exact(combinatorial, [1] * n.num_vars))
                results.append({"n": n.parts, "digraphs": digraphs, "passed": passed})
                if not passed and "first_failure" not in summary:
                    logger.error(f"Combinatorial identity fails for n={n}")
                    summary["first_failure"] = {
                        "n": str(n),
                        "explicit": explicit.to_text(),
                        "combinatorial": combinatorial.to_text(),
                    }
        summary["checked"] = len(results)
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    def cmd_egf_verify(self, config: RunConfig) -> Dict[str, Any]:
        """Generating-function extraction against the explicit sum."""
        max_total = config.max_total if config.max_total is not None else 0
        results: List[Dict[str, Any]] = []
        summary: Dict[str, Any] = {}
        for r in config.arities():
            table = egf_laguerre_table(MultiIndex((max_total,) * r))
            for n in MultiIndex.iter_total(r, max_total):
                explicit = self.explicit(n, self.cache)
                passed = table[n] == explicit
                results.append({"n": n.parts, "passed": passed})
                if not passed and "first_failure" not in summary:
                    logger.error(f"Generating-function route disagrees for n={n}")
                    summary["first_failure"] = {
                        "n": str(n),
                        "explicit": explicit.to_text(),
                        "generating_function": table[n].to_text(),
                    }
        summary["checked"] = len(results)
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    def cmd_symmetry_verify(self, config: RunConfig) -> Dict[str, Any]:
        max_total = config.max_total if config.max_total is not None else 0
        results: List[Dict[str, Any]] = []
        summary: Dict[str, Any] = {}
        for r in config.arities():
            for n in MultiIndex.iter_total(r, max_total):
                broken = check_permutation_symmetry(n, self.cache)
                results.append({"n": n.parts, "permutations": math.factorial(r), "passed": broken is None})
                if broken is not None and "first_failure" not in summary:
                    summary["first_failure"] = {"n": str(n), "permutation": list(broken)}
        summary["checked"] = len(results)
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    def _sweep_options(self, config: RunConfig) -> SweepOptions:
        return SweepOptions(
            workers=config.workers,
            budget_seconds=config.budget_seconds,
            memory_limit_mb=config.memory_limit_mb,
            cache=self.cache,
        )

    def cmd_hankel_verify(self, config: RunConfig) -> Dict[str, Any]:
        if config.N is None:
            raise ValueError("--N is required for hankel-verify")
        spec = HankelSpec(config.multi_index("k"), config.N, config.max_minor_order)
        minor_report = verify_all_minors(spec, self._sweep_options(config))
        summary = {
            "minors_checked": sum(minor_report.minors_checked.values()),
            "failures": len(minor_report.failures),
        }
        if minor_report.stop_reason:
            summary["stop_reason"] = minor_report.stop_reason
        return build_report(config.subcommand, minor_report.verdict, self._parameters(config),
                            [minor_report.to_dict()], summary)

    def cmd_hankel_table(self, config: RunConfig) -> Dict[str, Any]:
        """Sweep every preset (k, N) of the desk-scale verification table."""
        options = self._sweep_options(config)
        reports = []
        for k, size in DESK_TABLE:
            if config.r is not None and len(k) != config.r:
                continue
            reports.append(verify_all_minors(HankelSpec(MultiIndex(k), size), options))
        summary = {
            "cases": len(reports),
            "minors_checked": sum(sum(rep.minors_checked.values()) for rep in reports),
        }
        verdict = _overall_verdict([rep.verdict for rep in reports])
        return build_report(config.subcommand, verdict, self._parameters(config),
                            [rep.to_dict() for rep in reports], summary)

    def cmd_moments_verify(self, config: RunConfig) -> Dict[str, Any]:
        """
        Quadrature moments against exact evaluation on a parameter grid

        Also evaluates the leading 2 x 2 Hankel minor along k = (1, ..., 1)
        at every sampled (x, alpha + 1); all values must be nonnegative.
        """
        alpha = self._require(config, "alpha")
        points = config.x if config.x is not None else _fractions(DEFAULT_MOMENT_POINTS)
        max_n = config.max_n if config.max_n is not None else 3
        tolerance = config.tolerance or DEFAULT_MOMENT_TOLERANCE
        r = len(alpha)

        results: List[Dict[str, Any]] = []
        for x in points:
            for n in MultiIndex((max_n,) * r).iter_below():
                check = check_moment(n, alpha, x, config.quad_order, config.rtol, self.cache)
                record = check.to_dict()
                record["passed"] = check.rel_error <= tolerance
                results.append(record)

        leading = build_hankel(HankelSpec(MultiIndex((1,) * r), 2), self.cache)
        sample = [[x] + [a + 1 for a in alpha] for x in points]
        violations = numeric_prescreen(leading, sample)
        summary = {
            "max_rel_error": max(rec["rel_error"] for rec in results),
            "hankel_prescreen": {"points": len(sample), "violations": len(violations)},
        }
        verdict = _pass_fail(results)
        if violations:
            logger.error(f"Leading Hankel minor negative at {violations[0].point}")
            verdict = VERDICT_FAIL
        return build_report(config.subcommand, verdict, self._parameters(config), results, summary)

    def cmd_ortho_verify(self, config: RunConfig) -> Dict[str, Any]:
        """Multiple orthogonality of the signed polynomial for every layer i and m < n_i."""
        alpha = self._require(config, "alpha")
        n = config.multi_index("n")
        tolerance = config.tolerance or DEFAULT_ORTHO_TOLERANCE
        results: List[Dict[str, Any]] = []
        for layer in range(1, n.r + 1):
            for m in range(n[layer - 1]):
                value = check_orthogonality(n, alpha, layer, m, config.quad_order, self.cache)
                scale = orthogonality_scale(n, alpha[layer - 1])
                normalized = abs(value) / scale
                results.append({
                    "n": n.parts, "alpha": alpha, "layer": layer, "m": m,
                    "value": value, "scale": scale, "normalized": normalized,
                    "passed": normalized <= tolerance,
                })
        summary = {"max_normalized": max((r["normalized"] for r in results), default=0.0)}
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    def cmd_boundary_verify(self, config: RunConfig) -> Dict[str, Any]:
        """alpha = -1, r = 1: the measure with its atom at the origin."""
        points = config.x if config.x is not None else _fractions(DEFAULT_BOUNDARY_POINTS)
        max_n = config.max_n if config.max_n is not None else 4
        tolerance = config.tolerance or DEFAULT_MOMENT_TOLERANCE
        results: List[Dict[str, Any]] = []
        for x in points:
            for n in range(max_n + 1):
                exact = float(eval_exact(self.explicit(MultiIndex((n,)), self.cache), [x, 0]))
                approx = moment_integral_boundary_r1(n, x, config.quad_order, rtol=config.rtol)
                error = relative_error(approx, exact)
                results.append({
                    "n": n, "x": x, "exact": exact, "quadrature": approx,
                    "rel_error": error, "passed": error <= tolerance,
                })
        summary = {"max_rel_error": max(r["rel_error"] for r in results)}
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    def cmd_bessel_verify(self, config: RunConfig) -> Dict[str, Any]:
        """r = 1: Bessel-function weight against the 0F1 weight."""
        alpha = self._require(config, "alpha")
        if len(alpha) != 1:
            raise ValueError("bessel-verify takes a single alpha")
        points = config.x if config.x is not None else _fractions(DEFAULT_BOUNDARY_POINTS)
        max_n = config.max_n if config.max_n is not None else 4
        tolerance = config.tolerance or DEFAULT_MOMENT_TOLERANCE
        results: List[Dict[str, Any]] = []
        for x in points:
            for n in range(max_n + 1):
                bessel = bessel_moment_r1(n, alpha[0], x, config.quad_order)
                hyper = moment_integral(MultiIndex((n,)), alpha, x, config.quad_order, config.rtol)
                error = relative_error(bessel, hyper)
                results.append({
                    "n": n, "alpha": alpha[0], "x": x, "bessel": bessel,
                    "hypergeometric": hyper, "rel_error": error, "passed": error <= tolerance,
                })
        summary = {"max_rel_error": max(r["rel_error"] for r in results)}
        return build_report(config.subcommand, _pass_fail(results), self._parameters(config), results, summary)

    @staticmethod
    def _require(config: RunConfig, name: str) -> List[Fraction]:
        values = getattr(config, name)
        if values is None:
            raise ValueError(f"--{name} is required for {config.subcommand}")
        return values


def exit_code(report: Dict[str, Any]) -> int:
    return VERDICT_EXIT_CODES.get(report.get("verdict", VERDICT_PASS), EXIT_FAIL)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("--workers", type=int, help="process count (default: MLL_WORKERS or all CPUs)")
    common.add_argument("--config", help="JSON file of setting overrides")
    common.add_argument("--log-level", help="logging level for stderr diagnostics")
    common.add_argument("--print-schema", action="store_true", help="print this subcommand's report schema")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mll",
        description="Exact and numerical verification of multiple Laguerre polynomial identities",
    )
    parser.add_argument("--print-schema", dest="print_all_schemas", action="store_true",
                        help="print every report schema and exit")
    sub = parser.add_subparsers(dest="subcommand")
    common = _common_parser()

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("eval", "print the explicit polynomial L_n")
    p.add_argument("--r", type=int)
    p.add_argument("--n")

    for name, help_text in (
        ("combi-verify", "digraph enumeration vs explicit sum"),
        ("egf-verify", "generating-function extraction vs explicit sum"),
        ("symmetry-verify", "joint permutation invariance"),
    ):
        p = add(name, help_text)
        p.add_argument("--r", type=int)
        p.add_argument("--r-max", type=int)
        p.add_argument("--max-total", type=int)

    p = add("hankel-verify", "coefficientwise nonnegativity of all Hankel minors")
    p.add_argument("--r", type=int)
    p.add_argument("--k")
    p.add_argument("--N", type=int)
    p.add_argument("--max-minor-order", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--memory-limit-mb", type=float)

    p = add("hankel-table", "all-minors sweep over the preset verification table")
    p.add_argument("--r", type=int, help="restrict to presets with this arity")
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--memory-limit-mb", type=float)

    p = add("moments-verify", "moment representation by quadrature")
    p.add_argument("--r", type=int)
    p.add_argument("--alpha")
    p.add_argument("--x")
    p.add_argument("--max-n", type=int)
    p.add_argument("--quad-order", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--tolerance", type=float)

    p = add("ortho-verify", "multiple orthogonality integrals")
    p.add_argument("--r", type=int)
    p.add_argument("--n")
    p.add_argument("--alpha")
    p.add_argument("--quad-order", type=int)
    p.add_argument("--tolerance", type=float)

    p = add("boundary-verify", "alpha = -1 moments for r = 1")
    p.add_argument("--x")
    p.add_argument("--max-n", type=int)
    p.add_argument("--quad-order", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--tolerance", type=float)

    p = add("bessel-verify", "Bessel-function weight vs 0F1 weight for r = 1")
    p.add_argument("--alpha")
    p.add_argument("--x")
    p.add_argument("--max-n", type=int)
    p.add_argument("--quad-order", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--tolerance", type=float)
    return parser


_LIST_FLAGS = ("--alpha", "--x", "--n", "--k")
_NEGATIVE_LIST = re.compile(r"^-\.?\d")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite ``--alpha -0.5,1.3`` as ``--alpha=-0.5,1.3`` so argparse keeps the value."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _LIST_FLAGS and i + 1 < len(argv) and _NEGATIVE_LIST.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def _run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    values = {key: value for key, value in vars(args).items() if value is not None}
    for key in ("print_all_schemas", "print_schema", "config", "log_level"):
        values.pop(key, None)
    values.setdefault("workers", settings.effective_workers)
    values.setdefault("quad_order", settings.quad_order)
    values.setdefault("rtol", settings.rtol)
    if args.subcommand in ("hankel-verify", "hankel-table"):
        values.setdefault("budget_seconds", settings.budget_seconds)
        values.setdefault("memory_limit_mb", settings.memory_limit_mb)
    if args.subcommand == "bessel-verify":
        values.setdefault("r", 1)
    return RunConfig(**{k: v for k, v in values.items() if v is not None})


def _configure_logging(level_name: str) -> None:
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {level_name!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def _emit(report: Dict[str, Any], config: RunConfig) -> None:
    if config.out:
        write_report(report, config.out)
    if config.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(render_text(report))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point

    Args:
        argv (list): arguments without the program name (default: sys.argv[1:])

    Returns:
        int: process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as e:
        return int(e.code or 0)

    if args.print_all_schemas:
        print(json.dumps(all_schemas(), indent=2))
        return EXIT_PASS
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.print_schema:
        print(json.dumps(report_schema(args.subcommand), indent=2))
        return EXIT_PASS

    try:
        settings = load_settings(args.config)
        _configure_logging(args.log_level or settings.log_level)
        config = _run_config(args, settings)
    except (ValidationError, ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    runner = VerificationRunner(settings)
    try:
        report = runner.run(config)
    except (ValidationError, ParameterError, ValueError, EnumerationCapExceeded) as e:
        logger.error(f"Invalid parameters for {config.subcommand}: {str(e)}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    _emit(report, config)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
