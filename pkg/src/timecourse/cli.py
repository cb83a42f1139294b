"""Command-line entry point.

Thin dispatcher: every subcommand loads the model, calls one library
function, and prints its result. All output is deterministic given the
flags and seed. Exit codes: 0 success, 1 validation or infeasibility,
2 usage errors (from argparse).
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from typing import Optional

from . import bench
from .cost import CostError, CostSpec
from .graph import GraphError, enumerate_paths, from_scm
from .recourse import (
    RecourseProblem,
    lambda_frontier,
    solution_payload,
    solve,
    support_switches,
)
from .scm import (
    ValidationError,
    load_scm_file,
    predict,
    sample,
    sample_unfavorable,
    validate,
)

NORM_FLAGS = {"proper": "proper_sigma", "marginal": "marginal_sigma", "none": "none"}
VARIANT_FLAGS = {
    "lp": "longest_path",
    "avg": "weighted_average_raw",
    "avg-abs": "weighted_average_abs",
}

DEFAULT_LAMBDA_GRID = "0,0.25,0.5,1,2,5,10"


def _load_model(args) -> tuple:
    if args.scm:
        return load_scm_file(args.scm)
    return bench.german_scm(), bench.german_times()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _load_instance(args, scm) -> dict:
    if getattr(args, "random_individual", False):
        return sample_unfavorable(scm, args.seed)
    with open(args.instance, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValidationError("instance file must be a JSON object of name: value")
    return {str(k): float(v) for k, v in raw.items()}


def _cost_spec(args) -> CostSpec:
    return CostSpec(
        p=args.p,
        normalization=NORM_FLAGS[args.norm],
        lam=args.lam,
        time_variant=VARIANT_FLAGS[args.variant],
        time_budget=args.time_budget,
    )


def _problem(args, scm, times) -> RecourseProblem:
    return RecourseProblem(
        scm=scm,
        dag=from_scm(scm, times),
        instance=_load_instance(args, scm),
        cost_spec=_cost_spec(args),
        k=args.k,
    )


def _cmd_validate(args) -> int:
    scm, _ = _load_model(args)
    report = validate(scm)
    if report.ok:
        _emit(args, f"ok: {len(scm.variables)} variables, "
                    f"{len(scm.target.coefficients)} score terms\n")
        return 0
    for line in report.errors:
        print(f"invalid: {line}", file=sys.stderr)
    return 1


def _cmd_sample(args) -> int:
    scm, _ = _load_model(args)
    ds = sample(scm, args.n, args.seed)
    buf = io.StringIO()
    buf.write(f"# seed={args.seed} n={args.n}\n")
    ds.write_csv(buf)
    _emit(args, buf.getvalue())
    return 0


def _cmd_ced(args) -> int:
    scm, _ = _load_model(args)
    report = bench.ced_table(scm, alpha=args.alpha, n=args.n, seed=args.seed,
                             mode=args.mode, paired=not args.independent)
    sys.stdout.write(bench.ced_report_text(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(bench.ced_report_csv(report))
    return 0


def _cmd_paths(args) -> int:
    scm, times = _load_model(args)
    dag = from_scm(scm, times)
    dst = args.to if args.to else dag.target
    records = enumerate_paths(dag, args.src, dst)
    lines = ["path,weight,time"]
    for rec in records:
        lines.append(f"{rec.label()},{rec.weight:.17g},{rec.time:.17g}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_predict(args) -> int:
    scm, _ = _load_model(args)
    instance = _load_instance(args, scm)
    pred = predict(scm, instance)
    _emit(args, _json_text({
        "score": pred.score,
        "probability": pred.probability,
        "label": pred.label,
    }))
    return 0


def _cmd_recourse(args) -> int:
    scm, times = _load_model(args)
    problem = _problem(args, scm, times)
    solution = solve(problem)
    _emit(args, _json_text(solution_payload(solution)))
    return 0 if solution.feasible else 1


def _cmd_frontier(args) -> int:
    scm, times = _load_model(args)
    problem = _problem(args, scm, times)
    lambdas = [float(tok) for tok in args.lambdas.split(",") if tok.strip()]
    points = lambda_frontier(problem, lambdas)
    payload = {
        "points": [
            {"lambda": pt.lam, "solution": solution_payload(pt.solution)}
            for pt in points
        ],
        "switches": support_switches(points),
    }
    _emit(args, _json_text(payload))
    return 0 if any(pt.solution.feasible for pt in points) else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    scm, times = _load_model(args)
    uvicorn.run(create_app(scm, times), host=args.host, port=args.port)
    return 0


def _add_instance_flags(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--instance", metavar="FILE",
                       help="JSON file of variable: value")
    group.add_argument("--random-individual", action="store_true",
                       help="sample a seeded unfavorable individual instead")


def _add_cost_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lambda", dest="lam", type=float, default=0.0,
                     help="weight on the time cost")
    sub.add_argument("--time-budget", type=float, default=None)
    sub.add_argument("--p", type=float, default=2.0, help="feature-cost norm order")
    sub.add_argument("--norm", choices=sorted(NORM_FLAGS), default="proper")
    sub.add_argument("--variant", choices=["lp", "avg", "avg-abs"],
                     default="avg-abs", help="time-cost aggregation")
    sub.add_argument("-k", type=int, default=2, help="max intervened variables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timecourse",
        description="Time-aware causal recourse toolkit",
    )
    # accepted both before and after the subcommand
    shared = argparse.ArgumentParser(add_help=False)
    for owner, suppress in ((parser, False), (shared, True)):
        owner.add_argument("--scm", metavar="FILE",
                           default=argparse.SUPPRESS if suppress else None,
                           help="SCM JSON file (default: built-in credit model)")
        owner.add_argument("--seed", type=int,
                           default=argparse.SUPPRESS if suppress else 42)
        owner.add_argument("--out", metavar="FILE",
                           default=argparse.SUPPRESS if suppress else None,
                           help="write output here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[shared], help="check the SCM")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("sample", parents=[shared], help="draw a dataset as CSV")
    p.add_argument("--n", type=int, default=100)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("ced", parents=[shared],
                       help="causal effect derivative table")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--mode", choices=list(bench.CED_MODES), default="probability")
    p.add_argument("--independent", action="store_true",
                   help="independent draws instead of common random numbers")
    p.set_defaults(func=_cmd_ced)

    p = sub.add_parser("paths", parents=[shared],
                       help="enumerate causal paths as CSV")
    p.add_argument("--from", dest="src", required=True, metavar="VAR")
    p.add_argument("--to", default=None, metavar="VAR")
    p.set_defaults(func=_cmd_paths)

    p = sub.add_parser("predict", parents=[shared],
                       help="score one instance")
    _add_instance_flags(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("recourse", parents=[shared],
                       help="minimal-cost action for one instance")
    _add_instance_flags(p)
    _add_cost_flags(p)
    p.set_defaults(func=_cmd_recourse)

    p = sub.add_parser("frontier", parents=[shared],
                       help="solutions along a lambda grid")
    _add_instance_flags(p)
    _add_cost_flags(p)
    p.add_argument("--lambdas", default=DEFAULT_LAMBDA_GRID,
                   help="comma-separated lambda values")
    p.set_defaults(func=_cmd_frontier)

    p = sub.add_parser("serve", parents=[shared], help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, GraphError, CostError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
