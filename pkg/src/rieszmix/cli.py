"""Batch front-end.

Subcommands: validate, analyze, tensor, suite, kvn, generate. Exit codes:
0 success, 2 invalid input, 3 extraction precondition failure, 4 internal
defect (a theorem violation in suite mode, or route disagreement).
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

from .mixing import CesaroNotVanishing, analyze
from .operators import GENERATOR_PROFILES, NotMeasurePreserving, generate_ceps, validate_ceps
from .serialize import (
    SchemaError,
    dumps_canonical,
    element_to_list,
    extraction_to_dict,
    prefix_from_dict,
    report_to_dict,
    system_digest,
    system_to_dict,
)
from .suite import SuiteConfig, run_suite, suite_failed
from .tensor import tensor_ceps
from . import mixing

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PRECONDITION = 3
EXIT_DEFECT = 4

DEFAULT_TENSOR_CAP = 4096
TENSOR_CAP_ENV = "RSE_MAX_TENSOR_DIM"


def _emit(payload: dict) -> None:
    _sys.stdout.write(dumps_canonical(payload))


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})")


def _load_system(path: str):
    from .serialize import parse_system

    data = _load_json(path)
    space, T, S = parse_system(data)
    return validate_ceps(space, T, S)


def cmd_validate(args) -> int:
    try:
        sys = _load_system(args.file)
    except SchemaError as exc:
        _emit({"valid": False, "error": "schema", "detail": str(exc)})
        return EXIT_INVALID
    except NotMeasurePreserving as exc:
        _emit(
            {
                "valid": False,
                "error": "not-measure-preserving",
                "witness": exc.witness,
                "witnesses": list(exc.witnesses),
            }
        )
        return EXIT_INVALID
    _emit({"valid": True, "id": system_digest(sys), "dimension": sys.space.dim})
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        sys = _load_system(args.file)
    except SchemaError as exc:
        _emit({"error": "schema", "detail": str(exc)})
        return EXIT_INVALID
    except NotMeasurePreserving as exc:
        _emit(
            {
                "error": "not-measure-preserving",
                "witness": exc.witness,
                "witnesses": list(exc.witnesses),
            }
        )
        return EXIT_INVALID
    report = analyze(sys, system_id=system_digest(sys), route_b_limit=args.route_b_limit)
    if args.format == "json":
        _emit(report_to_dict(report))
    else:
        lines = [
            f"system: {report.system_id} (dimension {sys.space.dim})",
            f"ergodic: {str(report.ergodic).lower()}",
            f"weak mixing: {str(report.weak_mixing).lower()}",
            f"routes: operator-equality={str(report.operator_equality).lower()} "
            f"component-limits={_fmt_opt(report.component_limits)} "
            f"agreement={_fmt_opt(report.route_agreement)}",
        ]
        if report.ergodicity_witness is not None:
            w = report.ergodicity_witness
            lines.append(
                f"witness (ergodicity): p={w.p} q={w.q} "
                f"limit={element_to_list(w.limit)} expected={element_to_list(w.expected)}"
            )
        if report.weak_mixing_witness is not None:
            w = report.weak_mixing_witness
            lines.append(
                f"witness (weak mixing): p={w.p} q={w.q} k={w.k} "
                f"deviation={element_to_list(w.deviation)} "
                f"residual={element_to_list(w.limit_residual)}"
            )
        _sys.stdout.write("\n".join(lines) + "\n")
    if report.route_agreement is False:
        return EXIT_DEFECT
    return EXIT_OK


def _fmt_opt(value) -> str:
    return "skipped" if value is None else str(value).lower()


def cmd_tensor(args) -> int:
    try:
        sys_a = _load_system(args.left)
        sys_b = _load_system(args.right)
    except (SchemaError, NotMeasurePreserving) as exc:
        _emit({"error": "invalid-input", "detail": str(exc)})
        return EXIT_INVALID
    cap = int(os.environ.get(TENSOR_CAP_ENV, DEFAULT_TENSOR_CAP))
    product_dim = sys_a.space.dim * sys_b.space.dim
    if product_dim > cap:
        _emit(
            {
                "error": "tensor-dimension-cap",
                "detail": f"product dimension {product_dim} exceeds cap {cap} "
                f"(override with {TENSOR_CAP_ENV})",
            }
        )
        return EXIT_INVALID
    product = tensor_ceps(sys_a, sys_b)
    payload = system_to_dict(product, tensor_of=(sys_a, sys_b))
    Path(args.out).write_text(dumps_canonical(payload), encoding="utf-8")
    _emit({"written": args.out, "dimension": product_dim, "id": system_digest(product)})
    return EXIT_OK


def cmd_suite(args) -> int:
    config = SuiteConfig(
        seed=args.seed,
        count=args.count,
        max_dim=args.max_dim,
        horizon=args.horizon,
        tensor_pairs=args.tensor_pairs,
        pairs_per_wm=args.pairs_per_wm,
        jobs=args.jobs,
    )
    report = run_suite(config)
    text = dumps_canonical(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    _sys.stdout.write(text)
    return EXIT_DEFECT if suite_failed(report) else EXIT_OK


def cmd_kvn(args) -> int:
    try:
        data = _load_json(args.file)
        values = prefix_from_dict(data, args.horizon)
    except SchemaError as exc:
        _emit({"error": "schema", "detail": str(exc)})
        return EXIT_INVALID
    try:
        extraction = mixing.kvn_extract(values)
    except CesaroNotVanishing as exc:
        _emit(
            {
                "error": "cesaro-not-vanishing",
                "checkpoint": exc.checkpoint,
                "running_average": str(exc.value),
            }
        )
        return EXIT_PRECONDITION
    except ValueError as exc:
        _emit({"error": "invalid-input", "detail": str(exc)})
        return EXIT_INVALID
    _emit(extraction_to_dict(extraction))
    return EXIT_OK


def cmd_generate(args) -> int:
    system = generate_ceps(args.seed, max_dim=args.dim, profile=args.profile, dim=args.dim)
    payload = system_to_dict(system)
    Path(args.out).write_text(dumps_canonical(payload), encoding="utf-8")
    _emit({"written": args.out, "dimension": system.space.dim, "id": system_digest(system)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszmix",
        description="Exact ergodicity and conditional weak mixing analysis "
        "of finite expectation-preserving systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file against the preservation law")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("analyze", help="decide ergodicity and weak mixing for a system file")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--route-b-limit", type=int, default=mixing.DEFAULT_ROUTE_B_LIMIT,
                   help="dimension cap for the component-limit route")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("tensor", help="write the tensor product of two system files")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_tensor)

    p = sub.add_parser("suite", help="run the randomized theorem suite")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--max-dim", type=int, default=8)
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--tensor-pairs", type=int, default=120)
    p.add_argument("--pairs-per-wm", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="also write the report to this file")
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("kvn", help="run the extraction lemma on a sequence file")
    p.add_argument("file")
    p.add_argument("--horizon", type=int, required=True)
    p.set_defaults(fn=cmd_kvn)

    p = sub.add_parser("generate", help="write a seeded random valid system file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--profile", choices=GENERATOR_PROFILES, default="block-permutation")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_generate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
