"""Micro-benchmark of the bound kernels: numba @njit loops vs pure numpy.

Times every kernel on identical random input batches under each importable
backend and prints per-call latencies with the resulting speedup.  With
``--end-to-end N`` it additionally runs one full solve of a synthetic SRFLP
instance per backend (in subprocesses, selected via the DDBNB_NUMBA flag)
so the kernel choice can be judged on real search workloads.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 8,16,32 --repeats 40
    python benchmarks/bench_kernels.py --end-to-end 9
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from ddbnb.problems import kernels
from ddbnb.problems.io import FORMATTERS, SrflpInstance

BATCH = 64


def gen_tsptw_completion_bound(rng, n):
    cheapest = rng.integers(0, 30, n).astype(np.int64)
    latest = rng.integers(10, 120, n).astype(np.int64)
    roles = rng.integers(0, 3, n)
    must = roles == 1
    maybe = roles == 2
    must[0] = maybe[0] = False
    need = int(rng.integers(0, int(maybe.sum()) + 1))
    now = int(rng.integers(0, 40))
    return (must, maybe, need, now, cheapest, latest, int(cheapest[0]), 400)


def gen_psp_stock_bound(rng, n):
    items = max(1, n // 3)
    horizon = 4 * n
    per_item = [np.sort(rng.choice(horizon, size=int(rng.integers(1, n + 1)),
                                   replace=False)).astype(np.int64)
                for _ in range(items)]
    due_flat = np.concatenate(per_item)
    due_start = np.asarray([0] + [d.size for d in per_item[:-1]],
                           np.int64).cumsum()
    remaining = np.asarray([int(rng.integers(0, d.size + 1))
                            for d in per_item], np.int64)
    p_max = horizon + int(remaining.sum())
    stock = rng.integers(1, 50, items).astype(np.int64)
    return (remaining, p_max, due_flat, due_start, stock)


def gen_prim_mst(rng, n):
    w = rng.integers(0, 60, (n, n)).astype(np.int64)
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0)
    active = rng.integers(0, 2, n).astype(bool)
    return (w, active)


def gen_srflp_place_cost(rng, n):
    cuts = rng.integers(0, 100, n).astype(np.int64)
    roles = rng.integers(0, 3, n)
    in_m = roles == 1
    in_p = roles == 2
    dept = int(rng.integers(0, n))
    pool = int((in_p & ~in_m & (np.arange(n) != dept)).sum())
    return (cuts, in_m, in_p, dept, int(rng.integers(0, pool + 1)))


def gen_srflp_completion_bound(rng, n):
    cuts = rng.integers(0, 80, n).astype(np.int64)
    lengths = rng.integers(1, 12, n).astype(np.int64)
    traffic = rng.integers(0, 30, (n, n)).astype(np.int64)
    traffic = np.minimum(traffic, traffic.T)
    np.fill_diagonal(traffic, 0)
    roles = rng.integers(0, 3, n)
    in_m = roles == 1
    in_p = roles == 2
    p_need = int(rng.integers(0, int((in_p & ~in_m).sum()) + 1))
    return (cuts, in_m, in_p, lengths, traffic, p_need)


GENERATORS = {
    "tsptw_completion_bound": gen_tsptw_completion_bound,
    "psp_stock_bound": gen_psp_stock_bound,
    "prim_mst": gen_prim_mst,
    "srflp_place_cost": gen_srflp_place_cost,
    "srflp_completion_bound": gen_srflp_completion_bound,
}


def time_backend(fn, batch, repeats):
    for args in batch:  # warm-up pass also triggers any jit compilation
        fn(*args)
    checksum = 0
    start = time.perf_counter()
    for _ in range(repeats):
        for args in batch:
            checksum += int(fn(*args))
    elapsed = time.perf_counter() - start
    return elapsed / (repeats * len(batch)) * 1e6, checksum


def run_micro(sizes, repeats, seed):
    back = kernels.backends()
    names = list(back)
    print(f"backends: {', '.join(names)} (active: {kernels.ACTIVE_BACKEND})")
    header = f"{'kernel':<24} {'n':>4}" + "".join(
        f" {name + ' us/call':>16}" for name in names)
    if len(names) > 1:
        header += f" {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for kernel, gen in GENERATORS.items():
        for n in sizes:
            rng = np.random.default_rng(seed + n)
            batch = [gen(rng, n) for _ in range(BATCH)]
            row = f"{kernel:<24} {n:>4}"
            per_call = {}
            sums = set()
            for name in names:
                us, checksum = time_backend(back[name][kernel], batch, repeats)
                per_call[name] = us
                sums.add(checksum)
                row += f" {us:>16.2f}"
            if len(sums) != 1:
                raise SystemExit(f"backends disagree on {kernel} (n={n})")
            if len(names) > 1:
                row += f" {per_call['numpy'] / per_call['numba']:>8.1f}x"
            print(row)


def run_end_to_end(n, seed):
    rng = np.random.default_rng(seed)
    lengths = tuple(int(x) for x in rng.integers(1, 11, n))
    traffic = rng.integers(0, 11, (n, n))
    traffic = np.triu(traffic, 1)
    traffic = traffic + traffic.T
    inst = SrflpInstance(lengths=lengths,
                         traffic=tuple(tuple(int(x) for x in row)
                                       for row in traffic))
    print(f"\nend to end: srflp n={n}, width factor 10, both kernel backends")
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "bench_srflp.txt")
        with open(path, "w") as fh:
            fh.write(FORMATTERS["srflp"](inst))
        for flag, label in (("1", "numba"), ("0", "numpy")):
            env = dict(os.environ, DDBNB_NUMBA=flag)
            out = subprocess.run(
                [sys.executable, "-m", "ddbnb.cli", "solve", "--problem",
                 "srflp", "--input", path, "--width-factor", "10"],
                env=env, capture_output=True, text=True, check=True)
            record = json.loads(out.stdout)
            print(f"  {label:<6} objective={record['objective']} "
                  f"expanded={record['dd_nodes_expanded']} "
                  f"wall_ms={record['wall_ms']}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,16,32",
                        help="comma-separated input sizes (default 8,16,32)")
    parser.add_argument("--repeats", type=int, default=30,
                        help="timed passes over each batch (default 30)")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--end-to-end", type=int, metavar="N", default=None,
                        help="also solve a synthetic n-department layout "
                             "instance under each backend")
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    run_micro(sizes, args.repeats, args.seed)
    if args.end_to_end:
        run_end_to_end(args.end_to_end, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
