"""Command-line front end for strategy synthesis and the benchmark harness.

Every subcommand reads JSON documents, writes JSON to stdout or CSV/SVG
files under --out-dir, and exits 0 on success, 2 on invalid input, and 3 on
numerical failure inside a solver.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .core import ValidationError, consistency, zeta_roots
from .dynsched import acceleration_ratio, run_scenario, scenario_from_json
from .experiments import HeuristicKind, heuristic_strategy, run_experiment
from .linesearch import (
    search_consistency,
    search_strategy_to_json,
    signed_prediction_from_json,
    synthesize_search,
)
from .lpcore import NumericalFailure
from .pareto import (
    QuantizationSpec,
    prediction_from_json,
    quantize,
    result_to_json,
    step_cdf,
    synthesize,
)
from .randbid import det_pareto_cons, lower_bound_curve, optimize_rstar


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}")


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}")


def _cmd_synth(args) -> int:
    mu = prediction_from_json(_read_text(args.prediction))
    res = synthesize(mu, args.r)
    print(result_to_json(res))
    return 0


def _cmd_heuristic(args) -> int:
    mu = prediction_from_json(_read_text(args.prediction))
    X = heuristic_strategy(HeuristicKind(args.base), mu, args.r)
    doc = {
        "base": args.base,
        "bids": list(X.bids),
        "consistency": consistency(X, mu),
    }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_quantize(args) -> int:
    mu = prediction_from_json(_read_text(args.prediction))
    spec = QuantizationSpec(m=args.m, M=args.M, c=args.c)
    out = quantize(step_cdf(mu), spec)
    doc = {"points": [{"value": v, "prob": p} for v, p in out.points]}
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_rand(args) -> int:
    res = optimize_rstar(args.r)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "delta_star", "a_star", "cons_star"])
    writer.writerow(
        [f"{args.r:.10g}"]
        + [f"{v:.10g}" for v in (res.delta_star, res.a_star, res.cons_star)]
    )
    print(buf.getvalue(), end="")
    return 0


def _cmd_curves(args) -> int:
    if args.r_max <= args.r_min:
        raise ValidationError(
            f"empty range: [{args.r_min}, {args.r_max}]"
        )
    rows = []
    for i in range(args.points):
        r = args.r_min + (args.r_max - args.r_min) * i / max(1, args.points - 1)
        lb = lower_bound_curve(r)
        rstar = optimize_rstar(r).cons_star
        det = det_pareto_cons(r) if r >= 4.0 else None
        rows.append((r, lb, rstar, det))
        if lb > rstar + args.tol or (det is not None and rstar > det + args.tol):
            print(f"warning: curve ordering violated at r={r:.6g}", file=sys.stderr)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "lower_bound", "rstar_consistency", "deterministic"])
    for r, lb, rstar, det in rows:
        writer.writerow(
            [f"{r:.10g}", f"{lb:.10g}", f"{rstar:.10g}"]
            + ([f"{det:.10g}"] if det is not None else [""])
        )
    path = Path(args.out_dir) / "curves.csv"
    _write_text(path, buf.getvalue())
    print(path)
    return 0


def _cmd_dynamic(args) -> int:
    r, u_hats = scenario_from_json(_read_text(args.scenario))
    results, state = run_scenario(r, u_hats)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["epoch", "T", "u_hat", "contracts", "consistency", "acceleration"]
    )
    contracts_so_far = []
    total = 0.0
    for i, (u_hat, res) in enumerate(zip(u_hats, results)):
        contracts_so_far.extend(res.contracts)
        accel = (
            f"{acceleration_ratio(tuple(contracts_so_far)):.10g}"
            if len(contracts_so_far) >= 2
            else ""
        )
        writer.writerow(
            [
                i + 1,
                f"{total:.10g}",
                f"{u_hat:.10g}",
                "|".join(f"{c:.10g}" for c in res.contracts),
                f"{res.consistency:.10g}",
                accel,
            ]
        )
        total += sum(res.contracts)
    if len(contracts_so_far) >= 2:
        final = acceleration_ratio(tuple(contracts_so_far))
        if final > state.r + args.tol:
            print(
                f"warning: acceleration ratio {final:.6g} exceeds budget {state.r:.6g}",
                file=sys.stderr,
            )
    path = Path(args.out_dir) / "dynamic-trace.csv"
    _write_text(path, buf.getvalue())
    print(path)
    return 0


def _cmd_search(args) -> int:
    mu = signed_prediction_from_json(_read_text(args.prediction))
    out = synthesize_search(mu, args.r)
    print(search_strategy_to_json(out, consistency=search_consistency(out, mu)))
    return 0


def _cmd_experiment(args) -> int:
    config = json.loads(_read_text(args.config))
    if not isinstance(config, dict):
        raise ValidationError("experiment config must be a JSON object")
    config.setdefault("seed", args.seed)
    out = run_experiment(config, args.out_dir, threads=args.threads)
    print(out["csv"])
    for p in out["svg"]:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bidsynth",
        description="Strategy synthesis for online bidding, contract "
        "scheduling, and linear search with distributional predictions.",
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument(
        "--tol",
        type=float,
        default=1e-6,
        help="numeric slack for reported sanity checks",
    )
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize an optimal bidding strategy")
    p.add_argument("prediction", help="prediction JSON file ('-' for stdin)")
    p.add_argument("--r", type=float, required=True, help="robustness budget")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("heuristic", help="geometric heuristic strategy")
    p.add_argument("prediction")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--base", choices=["zeta1", "half-r", "zeta2"], required=True)
    p.set_defaults(func=_cmd_heuristic)

    p = sub.add_parser("quantize", help="quantize a prediction onto log levels")
    p.add_argument("prediction")
    p.add_argument("--m", type=float, required=True, help="lowest level")
    p.add_argument("--M", type=float, required=True, help="highest level")
    p.add_argument("--c", type=float, required=True, help="levels per e-fold")
    p.set_defaults(func=_cmd_quantize)

    p = sub.add_parser("rand", help="optimal randomized bidding parameters")
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=_cmd_rand)

    p = sub.add_parser("curves", help="consistency curves over a budget range")
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("dynamic", help="contract scheduling scenario trace")
    p.add_argument("scenario", help="scenario JSON file")
    p.set_defaults(func=_cmd_dynamic)

    p = sub.add_parser("search", help="synthesize a linear-search strategy")
    p.add_argument("prediction", help="signed prediction JSON file")
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("experiment", help="batch benchmark run")
    p.add_argument("config", help="experiment config JSON file")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
