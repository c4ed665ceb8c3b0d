"""Command line entry point: ``sumprod <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .generate import ConfigError, ExperimentConfig
from .runner import COMMANDS, run


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sumprod", description="Exact sum-product experiments over Q and F_p.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON experiment config; flags below override it")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int)
    ap.add_argument("--budget", type=int, help="node budget for clique search")
    ap.add_argument("--out", help="write the JSON-lines report here instead of stdout")
    sets = ap.add_argument_group("inputs")
    for name in ("A", "B", "C"):
        sets.add_argument(f"--{name}", dest=name, type=_json_arg, metavar="JSON", help=f"set {name}: JSON list or generator object")
    sets.add_argument("--p", type=int, help="work over F_p (applies to list inputs)")
    params = ap.add_argument_group("parameters")
    params.add_argument("--n", type=int, nargs="+", help="extremal n (one or more); n in nB-mB for sets")
    params.add_argument("--m", type=int)
    params.add_argument("--d", type=int, help="subgroup order")
    params.add_argument("--xi", help="coset representative, or sweep policy coset-reps|all")
    params.add_argument("--k", type=int, nargs="+")
    params.add_argument("--samples", type=int)
    params.add_argument("--phi", choices=("add", "mul"))
    params.add_argument("--p-min", type=int)
    params.add_argument("--p-max", type=int)
    params.add_argument("--orders", type=int, nargs="+")
    params.add_argument("--csv", help="sweep CSV path")
    params.add_argument("--explore", action="store_true", help="ratio: add the exploration row")
    params.add_argument("--convex", action="store_true", help="szt: assert the convex-set sample bound")
    params.add_argument("--time-budget", type=float, help="verify-all wall-clock budget in seconds")
    params.add_argument("--golden", help="verify-all: golden ratio CSV to compare against")
    params.add_argument("--only", type=int, nargs="+", help="verify-all: run only these criteria")
    return ap


def config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig(args.command)
    cfg.command = args.command
    for name in ("A", "B", "C"):
        spec = getattr(args, name)
        if spec is None:
            continue
        if isinstance(spec, list):
            spec = {"kind": "literal", "elements": spec}
        if args.p is not None:
            spec.setdefault("p", args.p)
        cfg.sets[name] = spec
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    simple = {
        "threads": args.threads,
        "budget": args.budget,
        "m": args.m,
        "d": args.d,
        "k": args.k,
        "samples": args.samples,
        "phi": args.phi,
        "p_min": args.p_min,
        "p_max": args.p_max,
        "orders": args.orders,
        "csv": args.csv,
        "time_budget": args.time_budget,
        "golden": args.golden,
        "only": args.only,
    }
    for k, v in simple.items():
        if v is not None:
            cfg.params[k] = v
    if args.n is not None:
        cfg.params["n"] = args.n if args.command == "extremal" else args.n[0]
    if args.p is not None and args.command in ("subgroup", "clique"):
        cfg.params["p"] = args.p
    if args.xi is not None:
        cfg.params["xi"] = args.xi if args.command == "sweep" else int(args.xi)
    if args.explore:
        cfg.params["explore"] = True
    if args.convex:
        cfg.params["convex"] = True
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    text = report.to_jsonl()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
