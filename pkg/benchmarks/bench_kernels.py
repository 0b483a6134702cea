"""Compare the numpy and numba status-table kernels.

Run ``python benchmarks/bench_kernels.py``.  The first part times each kernel
on random tables; the second runs the same workload end to end in two
subprocesses with ``WSREFINE_BACKEND`` set to each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from wsrefine.kernels import implementation

WORKLOAD = (
    "import time; t = time.perf_counter();"
    "from wsrefine.cli import main;"
    "main(['verify-laws', '--vars', '3', '--vals', '2', '--depth', '2', '--law', 'pandtosand',"
    " '--law', 'leftsandoverpor', '--law', 'caseanalysis', '--format', 'machine'], out=open('/dev/null', 'w'));"
    "main(['refine', 'nqueens.wsl', 'nqueens.wsd', '--format', 'machine'], out=open('/dev/null', 'w'));"
    "print(time.perf_counter() - t)"
)


def kernel_cases(size: int, rng: np.random.Generator):
    a = rng.integers(0, 3, size, dtype=np.int8)
    b = rng.integers(0, 3, size, dtype=np.int8)
    side = int(round(size ** 0.5))
    grid = a[: side * side].reshape(side, side)
    idx = [rng.integers(-1, side, size // 4), rng.integers(-1, side, size // 4)]
    dag = np.triu(rng.random((400, 400)) < 0.02, k=1)
    return {
        "k_and": lambda m: m.k_and(a, b),
        "k_or": lambda m: m.k_or(a, b),
        "k_seq": lambda m: m.k_seq(a, b),
        "k_meet": lambda m: m.k_meet(a, b),
        "k_refines": lambda m: m.k_refines(a, a),
        "k_reduce_exists": lambda m: m.k_reduce_exists(grid, 1),
        "k_reduce_forall": lambda m: m.k_reduce_forall(grid, 0),
        "k_gather": lambda m: m.k_gather(grid, idx),
        "k_acyclic": lambda m: m.k_acyclic(dag),
    }


def bench_kernels(size: int, repeat: int, seed: int) -> None:
    backends = {"numpy": implementation("numpy"), "numba": implementation("numba")}
    cases = kernel_cases(size, np.random.default_rng(seed))
    for fn in cases.values():  # compile outside the timed region
        fn(backends["numba"])
    print(f"kernels on {size:,} cells, best of {repeat} (ms)")
    print(f"{'kernel':<18}{'numpy':>10}{'numba':>10}{'speedup':>10}")
    for name, fn in cases.items():
        t = {k: min(timeit.repeat(lambda: fn(m), number=1, repeat=repeat)) * 1e3 for k, m in backends.items()}
        print(f"{name:<18}{t['numpy']:>10.3f}{t['numba']:>10.3f}{t['numpy'] / t['numba']:>9.2f}x")


def bench_end_to_end() -> None:
    print("\nend to end: three laws at 3/2/2 plus the N-queens replay (s, includes import and JIT)")
    for backend in ("numpy", "numba"):
        env = dict(os.environ, WSREFINE_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
        print(f"{backend:<8}{float(proc.stdout.strip()):>8.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.size, args.repeat, args.seed)
    if not args.skip_end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
