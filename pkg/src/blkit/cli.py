"""Batch front door: JSON in, JSON report out, deterministic by default.

Verbs map one-to-one onto library entry points.  Exit codes: 0 success or
PASS, 1 a FAIL verdict, 2 bad input, 3 numerical failure.  Every report
embeds the fully resolved configuration under a versioned schema tag so
runs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import duality, expsum, lieb, nonlinear
from .config import Config, load_config
from .datum import BLDatum, validate
from .errors import InputError, NumericalError

SCHEMA = "blkit/1"

DEFAULT_HOLDER_RADII = (1e-2, 1e-3, 1e-4)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _sanitize(obj):
    """Replace non-finite floats so reports stay strict JSON."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(
        _sanitize(report), sort_keys=True, indent=2, default=_json_default
    ) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(rows: list[dict], fields: list[str], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def _load_input(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input file: {exc}") from exc


# -- verb handlers (each returns (result dict, exit code, csv rows)) ---------


def _run_compute(data: dict, config: Config, args) -> tuple[dict, int, list]:
    datum = validate(BLDatum.from_dict(data), config)
    report = lieb.bl_constant(datum, config)
    if args.certify is not None:
        lieb.near_extremiser(datum, args.certify, config, report=report)
    return report.to_dict(), 0, []


def _run_classify(data: dict, config: Config, args) -> tuple[dict, int, list]:
    datum = validate(BLDatum.from_dict(data), config)
    verdict = lieb.classify_datum(datum, config, numeric=not args.no_numeric)
    return {"finiteness": verdict.to_dict()}, 0, []


def _run_expsum_min(data: dict, config: Config, args) -> tuple[dict, int, list]:
    inst = expsum.ExpSumInstance.from_dict(data, config)
    value, attained = expsum.infimum(inst, config)
    result = {"infimum": value, "attained": attained, "certificate": None}
    if args.delta is not None:
        cert = expsum.near_minimise(inst, args.delta, config)
        result["certificate"] = cert.to_dict()
    return result, 0, []


def _run_dualize(data: dict, config: Config, args) -> tuple[dict, int, list]:
    sd = duality.SubspaceDatum.create(data["factors"], data["H_basis"], [
        math.inf if v is None else v for v in data["q"]
    ])
    lhs, rhs, b_q = duality.duality_check(sd, config)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "beckner_product": b_q,
        "relative_gap": abs(lhs - rhs) / rhs,
    }, 0, []


def _run_young(data: dict, config: Config, args) -> tuple[dict, int, list]:
    q = [math.inf if v is None else v for v in data["q"]]
    value = duality.young_constant(q, data["dim"])
    return {"constant": value}, 0, []


def _run_convolution(data: dict, config: Config, args) -> tuple[dict, int, list]:
    tangent, normal, verdict = duality.convolution_datum(
        data["differentials"], data["p"], config
    )
    return {
        "tangent": tangent.to_dict(),
        "normal": normal.to_dict(),
        "finiteness": verdict.to_dict(),
    }, 0, []


def _run_verify_nonlinear(data: dict, config: Config, args) -> tuple[dict, int, list]:
    problem = nonlinear.NonlinearProblem.from_dict(data)
    if args.epsilon is not None:
        problem = nonlinear.NonlinearProblem.create(
            problem.maps, problem.exponents, problem.x0, args.epsilon,
            problem.delta_schedule, problem.quadrature,
        )
    result = nonlinear.verify_theorem1(problem, config)
    code = 0 if result["verdict"] == "PASS" else 1
    rows = [
        {"delta": r["delta"], "max_ratio": r["max_ratio"], "bound": r["bound"],
         "ok": r["ok"]}
        for r in result["rows"]
    ]
    return result, code, rows


def _run_holder(data: dict, config: Config, args) -> tuple[dict, int, list]:
    datum = validate(BLDatum.from_dict(data), config)
    radii = data.get("radii", list(DEFAULT_HOLDER_RADII))
    result = lieb.holder_experiment(datum, radii, config)
    return result, 0, list(result["rows"])


_VERBS = {
    "compute": _run_compute,
    "classify": _run_classify,
    "expsum-min": _run_expsum_min,
    "dualize": _run_dualize,
    "young": _run_young,
    "convolution": _run_convolution,
    "verify-nonlinear": _run_verify_nonlinear,
    "holder": _run_holder,
}

_CSV_FIELDS = {
    "verify-nonlinear": ["delta", "max_ratio", "bound", "ok"],
    "holder": ["radius", "max_diff", "ratio", "trials"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blkit",
        description="Brascamp-Lieb constants, certificates, and verification",
    )
    parser.add_argument("verb", choices=sorted(_VERBS))
    parser.add_argument("--input", required=True, help="input JSON path")
    parser.add_argument("--output", help="report JSON path (default stdout)")
    parser.add_argument("--csv", help="secondary CSV table for tabular verbs")
    parser.add_argument("--config", help="config defaults JSON (else $BLKIT_CONFIG)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--delta", type=float, help="near-minimiser accuracy")
    parser.add_argument("--epsilon", type=float, help="verification slack")
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--budget", type=int, help="expansion budget override")
    parser.add_argument(
        "--certify", type=float, metavar="DELTA",
        help="attach a near-extremiser certificate at this accuracy",
    )
    parser.add_argument(
        "--no-numeric", action="store_true",
        help="classify: skip the numeric upgrade stage",
    )
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = {"schema": SCHEMA, "verb": args.verb}
    try:
        config = load_config(
            args.config,
            {
                "seed": args.seed,
                "threads": args.threads,
                "restarts": args.restarts,
                "expansion_budget": args.budget,
            },
        )
        report["config"] = config.to_dict()
        data = _load_input(args.input)
        if data.get("schema", SCHEMA) != SCHEMA:
            raise InputError(f"unsupported input schema {data.get('schema')!r}")
        result, code, rows = _VERBS[args.verb](data, config, args)
        report["result"] = result
        if args.csv and rows:
            _emit_csv(rows, _CSV_FIELDS.get(args.verb, list(rows[0])), args.csv)
    except InputError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.output)
        return 2
    except NumericalError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.output)
        return 3
    except (KeyError, ValueError, TypeError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args.output)
        return 2
    _emit(report, args.output)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
