"""
Report Module for Multiple Laguerre Verification

Builds the JSON reports emitted by every subcommand, validates them against
the versioned schemas embedded here, and renders the text form.
"""

import json
import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional

import jsonschema
import pandas as pd

from .polyring import Polynomial

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.1"

VERDICTS = ["PASS", "FAIL", "INCOMPLETE"]

_INT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_NUMBER_LIST = {"type": "array", "items": {"type": "number"}}

_TERM = {
    "type": "object",
    "required": ["exponents", "coeff"],
    "properties": {
        "exponents": _INT_LIST,
        "coeff": {"type": "string", "pattern": "^-?[0-9]+$"},
    },
}

_MINOR_REPORT = {
    "type": "object",
    "required": ["spec", "verdict", "minors_checked", "failures", "wall_time_ms",
                 "orders_completed", "stop_reason", "reading", "symmetry_breaks"],
    "properties": {
        "spec": {
            "type": "object",
            "required": ["r", "k", "N", "max_minor_order"],
            "properties": {
                "r": {"type": "integer", "minimum": 1},
                "k": _INT_LIST,
                "N": {"type": "integer", "minimum": 1},
                "max_minor_order": {"type": "integer", "minimum": 1},
            },
        },
        "verdict": {"enum": VERDICTS},
        "minors_checked": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "failures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rows", "cols", "monomial", "coefficient"],
                "properties": {
                    "rows": _INT_LIST,
                    "cols": _INT_LIST,
                    "monomial": _INT_LIST,
                    "coefficient": {"type": "string"},
                },
            },
        },
        "wall_time_ms": {"type": "number", "minimum": 0},
        "orders_completed": {"type": "integer", "minimum": 0},
        "stop_reason": {"type": ["string", "null"]},
        "reading": {"type": "string"},
        "symmetry_breaks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rows", "cols"],
                "properties": {"rows": _INT_LIST, "cols": _INT_LIST},
            },
        },
    },
}


def _item(required: List[str], properties: Dict[str, Any]) -> Dict[str, Any]:
    return {"type": "object", "required": required, "properties": properties}


RESULT_ITEM_SCHEMAS: Dict[str, Dict[str, Any]] = {
    "combi-verify": _item(
        ["n", "digraphs", "passed"],
        {"n": _INT_LIST, "digraphs": {"type": "integer", "minimum": 1}, "passed": {"type": "boolean"}},
    ),
    "egf-verify": _item(["n", "passed"], {"n": _INT_LIST, "passed": {"type": "boolean"}}),
    "symmetry-verify": _item(
        ["n", "permutations", "passed"],
        {"n": _INT_LIST, "permutations": {"type": "integer", "minimum": 1},
         "passed": {"type": "boolean"}},
    ),
    "hankel-verify": _MINOR_REPORT,
    "hankel-table": _MINOR_REPORT,
    "moments-verify": _item(
        ["n", "alpha", "x", "exact", "quadrature", "rel_error", "order", "passed"],
        {"n": _INT_LIST, "alpha": _NUMBER_LIST, "x": {"type": "number"},
         "exact": {"type": "number"}, "quadrature": {"type": "number"},
         "rel_error": {"type": "number", "minimum": 0}, "order": {"type": "integer"},
         "passed": {"type": "boolean"}},
    ),
    "ortho-verify": _item(
        ["n", "alpha", "layer", "m", "value", "scale", "normalized", "passed"],
        {"n": _INT_LIST, "alpha": _NUMBER_LIST, "layer": {"type": "integer", "minimum": 1},
         "m": {"type": "integer", "minimum": 0}, "value": {"type": "number"},
         "scale": {"type": "number"}, "normalized": {"type": "number", "minimum": 0},
         "passed": {"type": "boolean"}},
    ),
    "boundary-verify": _item(
        ["n", "x", "exact", "quadrature", "rel_error", "passed"],
        {"n": {"type": "integer", "minimum": 0}, "x": {"type": "number"},
         "exact": {"type": "number"}, "quadrature": {"type": "number"},
         "rel_error": {"type": "number", "minimum": 0}, "passed": {"type": "boolean"}},
    ),
    "bessel-verify": _item(
        ["n", "alpha", "x", "bessel", "hypergeometric", "rel_error", "passed"],
        {"n": {"type": "integer", "minimum": 0}, "alpha": {"type": "number"},
         "x": {"type": "number"}, "bessel": {"type": "number"},
         "hypergeometric": {"type": "number"},
         "rel_error": {"type": "number", "minimum": 0}, "passed": {"type": "boolean"}},
    ),
}

EVAL_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "eval report",
    "type": "object",
    "required": ["schema_version", "subcommand", "r", "n", "polynomial", "terms"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "subcommand": {"const": "eval"},
        "r": {"type": "integer", "minimum": 1},
        "n": _INT_LIST,
        "polynomial": {"type": "string"},
        "terms": {"type": "array", "items": _TERM},
    },
}


def report_schema(subcommand: str) -> Dict[str, Any]:
    """
    JSON schema of the report a subcommand emits.

    Raises:
        KeyError: for an unknown subcommand
    """
    if subcommand == "eval":
        return EVAL_SCHEMA
    item = RESULT_ITEM_SCHEMAS[subcommand]
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "title": f"{subcommand} report",
        "type": "object",
        "required": ["schema_version", "subcommand", "verdict", "parameters", "results", "summary"],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "subcommand": {"const": subcommand},
            "verdict": {"enum": VERDICTS},
            "parameters": {"type": "object"},
            "results": {"type": "array", "items": item},
            "summary": {"type": "object"},
        },
    }


def all_schemas() -> Dict[str, Dict[str, Any]]:
    """Every embedded schema, keyed by subcommand (the --print-schema payload)."""
    names = ["eval"] + list(RESULT_ITEM_SCHEMAS)
    return {"schema_version": SCHEMA_VERSION, "schemas": {name: report_schema(name) for name in names}}


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if hasattr(value, "parts"):
        return list(value.parts)
    # Fractions and numpy scalars
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


def build_eval_report(n: Iterable[int], polynomial: Polynomial) -> Dict[str, Any]:
    parts = list(n)
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "eval",
        "r": len(parts),
        "n": parts,
        "polynomial": polynomial.to_text(),
        "terms": polynomial.to_json(),
    }


def build_report(subcommand: str, verdict: str, parameters: Mapping[str, Any],
                 results: Iterable[Mapping[str, Any]],
                 summary: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """
    Assemble a verification report.

    Args:
        subcommand (str): name of the producing subcommand
        verdict (str): PASS, FAIL or INCOMPLETE
        parameters (dict): the validated run parameters
        results (list): one record per checked case
        summary (dict): aggregate figures and witnesses

    Returns:
        dict: report ready for validation and output
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "verdict": verdict,
        "parameters": _jsonable(dict(parameters)),
        "results": [_jsonable(dict(r)) for r in results],
        "summary": _jsonable(dict(summary or {})),
    }


def validate_report(report: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Validate a report against its subcommand's schema

    Returns:
        dict: {'valid': bool, 'errors': [...], 'warnings': [...]}
    """
    validation_results: Dict[str, Any] = {"valid": True, "errors": [], "warnings": []}

    subcommand = report.get("subcommand")
    try:
        schema = report_schema(subcommand)
    except KeyError:
        validation_results["valid"] = False
        validation_results["errors"].append(f"Unknown subcommand: {subcommand}")
        return validation_results

    validator = jsonschema.Draft7Validator(schema)
    for error in sorted(validator.iter_errors(report), key=lambda e: list(e.absolute_path)):
        location = "/".join(str(p) for p in error.absolute_path) or "<root>"
        validation_results["errors"].append(f"{location}: {error.message}")
        validation_results["valid"] = False

    if subcommand != "eval":
        if not report.get("results"):
            validation_results["warnings"].append("Report has no results")
        if report.get("verdict") == "INCOMPLETE":
            validation_results["warnings"].append("Verification was truncated by a budget")

    return validation_results


def _cell(value: Any) -> Any:
    if isinstance(value, list):
        if value and isinstance(value[0], dict):
            return len(value)
        return "(" + ",".join(str(v) for v in value) + ")"
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return "-"
    return value


def _flatten(record: Mapping[str, Any]) -> Dict[str, Any]:
    row: Dict[str, Any] = {}
    for key, value in record.items():
        if key == "spec" and isinstance(value, dict):
            for inner, inner_value in value.items():
                row[inner] = _cell(inner_value)
        elif key == "minors_checked" and isinstance(value, dict):
            row["minors"] = sum(value.values())
        elif key == "reading":
            continue
        elif key in ("failures", "symmetry_breaks") and isinstance(value, list):
            row[key] = len(value)
        else:
            row[key] = _cell(value)
    return row


def results_frame(report: Mapping[str, Any]) -> pd.DataFrame:
    """One row per result record, list and dict cells flattened for display."""
    return pd.DataFrame([_flatten(r) for r in report.get("results", [])])


def render_text(report: Mapping[str, Any]) -> str:
    """
    Human-readable form of a report.

    eval prints only the canonical polynomial text; verification reports
    print a verdict line, a results table and the summary.
    """
    if report.get("subcommand") == "eval":
        return report["polynomial"]

    lines = [f"{report['subcommand']}: {report['verdict']}"]
    frame = results_frame(report)
    if not frame.empty:
        lines.append(frame.to_string(index=False, float_format=lambda v: f"{v:.6g}"))
    for key, value in report.get("summary", {}).items():
        if isinstance(value, dict):
            lines.append(f"{key}:")
            lines.extend(f"  {inner}: {_cell(inner_value)}" for inner, inner_value in value.items())
        else:
            lines.append(f"{key}: {_cell(value)}")
    return "\n".join(lines)


def write_report(report: Mapping[str, Any], path: str) -> None:
    try:
        with open(path, "w") as f:
            json.dump(report, f, indent=2, sort_keys=False)
        logger.info(f"Report written to {path}")
    except OSError as e:
        logger.error(f"Error writing report to {path}: {str(e)}")
        raise
