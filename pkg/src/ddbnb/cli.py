"""Command line front end: solve an instance, benchmark a directory of
instances, or generate pigment-sequencing instances."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .diagram import FRONTIER, LAST_EXACT_LAYER
from .problems import (InstanceFormatError, InstanceValidationError,
                       PROBLEM_NAMES, FORMATTERS, build_model, generate_psp,
                       load_instance)
from .problems.generate import derive_seed, grid_configs
from .solver import SolverConfig, solve

RECORD_COLUMNS = [
    "instance", "problem", "width_factor", "width_policy", "cutset", "cache",
    "status", "objective", "gap_pct", "dd_nodes_expanded", "wall_ms",
    "cache_entries_peak", "fringe_peak",
]


def default_width_policy(problem: str) -> str:
    return "dynamic" if problem == "tsptw" else "fixed"


def make_config(problem: str, width_factor: int, width_policy: str | None,
                cutset: str | None, cache: bool,
                time_limit: float | None = None,
                capture_first_dd: bool = False) -> SolverConfig:
    return SolverConfig(
        width_factor=width_factor,
        width_policy=width_policy or default_width_policy(problem),
        cutset=cutset or (FRONTIER if cache else LAST_EXACT_LAYER),
        use_cache=cache,
        time_limit=time_limit,
        capture_first_dd=capture_first_dd,
    )


def run_solve(problem: str, path, width_factor: int = 1,
              width_policy: str | None = None, cutset: str | None = None,
              cache: bool = True, time_limit: float | None = None,
              capture_first_dd: bool = False):
    """Solve one instance file; returns (record dict, SolveResult)."""
    instance = load_instance(problem, path)
    model, relaxation = build_model(problem, instance)
    config = make_config(problem, width_factor, width_policy, cutset, cache,
                         time_limit, capture_first_dd)
    result = solve(model, relaxation, config)
    record = {
        "instance": Path(path).name,
        "problem": problem,
        "width_factor": width_factor,
        "width_policy": config.width_policy,
        "cutset": config.cutset,
        "cache": "on" if cache else "off",
        "status": result.status,
        "objective": result.objective,
        "gap_pct": result.gap_pct,
        "dd_nodes_expanded": result.stats.dd_nodes_expanded,
        "wall_ms": result.stats.wall_ms,
        "cache_entries_peak": result.stats.cache_entries_peak,
        "fringe_peak": result.stats.fringe_peak,
    }
    return record, result


def cmd_solve(args) -> int:
    try:
        record, result = run_solve(
            args.problem, args.input, width_factor=args.width_factor,
            width_policy=args.width_policy, cutset=args.cutset,
            cache=args.cache == "on", time_limit=args.time_limit,
            capture_first_dd=bool(args.dump_dd))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InstanceFormatError, InstanceValidationError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 2
    record["assignment"] = result.assignment
    record["seed"] = args.seed
    print(json.dumps(record, sort_keys=True))
    if args.dump_dd:
        dd = result.first_relaxed or result.first_restricted
        if dd is not None:
            Path(args.dump_dd).write_text(dd.to_dot() + "\n")
        else:
            print("warning: no diagram was compiled, nothing dumped",
                  file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    input_dir = Path(args.input_dir)
    if not input_dir.is_dir():
        print(f"error: {input_dir} is not a directory", file=sys.stderr)
        return 2
    alphas = [int(a) for a in args.alphas.split(",") if a]
    out = Path(args.out)

    done: set[tuple] = set()
    if out.exists():
        with out.open(newline="") as fh:
            for row in csv.DictReader(fh):
                done.add((row["instance"], row["problem"], row["width_factor"],
                          row["cache"]))
    write_header = not out.exists() or out.stat().st_size == 0
    out.parent.mkdir(parents=True, exist_ok=True)

    files = sorted(p for p in input_dir.iterdir() if p.is_file()
                   and p.name != "manifest.json")
    with out.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_COLUMNS)
        if write_header:
            writer.writeheader()
        for path in files:
            for alpha in alphas:
                for cache in (True, False):
                    key = (path.name, args.problem, str(alpha),
                           "on" if cache else "off")
                    if key in done:
                        continue
                    try:
                        record, _ = run_solve(
                            args.problem, path, width_factor=alpha,
                            width_policy=args.width_policy,
                            cutset=args.cutset, cache=cache,
                            time_limit=args.time_limit)
                    except (OSError, InstanceFormatError,
                            InstanceValidationError) as exc:
                        print(f"skipping {path.name}: {exc}", file=sys.stderr)
                        break
                    writer.writerow(record)
                    fh.flush()
    return 0


def cmd_generate_psp(args) -> int:
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        print(f"error: {out} already exists and is not empty "
              "(use --force to write anyway)", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)

    if args.paper_grid:
        configs = list(grid_configs())
    else:
        configs = [(0, rep, args.items, args.periods, args.density, args.rho)
                   for rep in range(args.count)]

    manifest = []
    for combo, rep, items, periods, density, rho in configs:
        seed = derive_seed(args.seed, combo, rep)
        inst = generate_psp(items, periods, density, rho, seed)
        name = f"psp_n{items}_h{periods}_d{density:g}_r{rho:g}_{rep:02d}.txt"
        (out / name).write_text(FORMATTERS["psp"](inst))
        manifest.append({
            "file": name, "items": items, "periods": periods,
            "density": density, "rho": rho, "seed": seed,
        })
    (out / "manifest.json").write_text(
        json.dumps({"base_seed": args.seed, "instances": manifest}, indent=2,
                   sort_keys=True) + "\n")
    print(f"wrote {len(manifest)} instances to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddbnb",
        description="Branch-and-bound over decision diagrams")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one instance, print a JSON record")
    ps.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    ps.add_argument("--input", required=True)
    ps.add_argument("--width-factor", type=int, default=1)
    ps.add_argument("--width-policy", choices=("fixed", "dynamic"),
                    default=None, help="default: dynamic for tsptw, else fixed")
    ps.add_argument("--cutset", choices=(LAST_EXACT_LAYER, FRONTIER),
                    default=None,
                    help="default: frontier with cache on, lel with cache off")
    ps.add_argument("--cache", choices=("on", "off"), default="on")
    ps.add_argument("--time-limit", type=float, default=None)
    ps.add_argument("--seed", type=int, default=0,
                    help="echoed into the record; the solver is deterministic")
    ps.add_argument("--dump-dd", default=None, metavar="PATH",
                    help="write the first relaxed diagram as GraphViz dot")
    ps.set_defaults(func=cmd_solve)

    pb = sub.add_parser("bench", help="solve a directory, append rows to a CSV")
    pb.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    pb.add_argument("--input-dir", required=True)
    pb.add_argument("--out", required=True)
    pb.add_argument("--alphas", default="1",
                    help="comma-separated width factors (default: 1)")
    pb.add_argument("--width-policy", choices=("fixed", "dynamic"), default=None)
    pb.add_argument("--cutset", choices=(LAST_EXACT_LAYER, FRONTIER), default=None)
    pb.add_argument("--time-limit", type=float, default=None)
    pb.set_defaults(func=cmd_bench)

    pg = sub.add_parser("generate-psp", help="generate pigment-sequencing instances")
    pg.add_argument("--out", required=True)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--force", action="store_true")
    pg.add_argument("--paper-grid", action="store_true",
                    help="full benchmark grid: items x periods x density x rho, "
                         "5 replicates each")
    pg.add_argument("--items", type=int, default=5)
    pg.add_argument("--periods", type=int, default=50)
    pg.add_argument("--density", type=float, default=1.0)
    pg.add_argument("--rho", type=float, default=0.01)
    pg.add_argument("--count", type=int, default=1)
    pg.set_defaults(func=cmd_generate_psp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
