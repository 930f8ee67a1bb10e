"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--n 10 12] [--repeat 3]

Times full k-subset cascade sweeps and DPLL runs on generated instances,
checks that both implementations agree, and prints one line per workload.
"""
import argparse
import sys
import time
from itertools import combinations

from critnode import kernels
from critnode.cnf import build_m
from critnode.generate import GenConfig, generate_instance
from critnode.kernels import PackedSystem


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def sweep(packed, k, impl):
    return [packed.outcome(a, impl) for a in combinations(range(1, packed.n + 1), k)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[10, 12])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--stage", type=int, default=4, help="stage check to solve")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    impls = kernels.available()
    if "cython" not in impls:
        print("compiled kernels not built; run: python3 setup.py build_ext --inplace", file=sys.stderr)
        return 1
    py, cy = impls["python"], impls["cython"]
    print(f"{'workload':<28}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for n in args.n:
        system = generate_instance(GenConfig(n=n, seed=args.seed))
        packed = PackedSystem(system)
        a, tp = _best(lambda: sweep(packed, args.k, py), args.repeat)
        b, tc = _best(lambda: sweep(packed, args.k, cy), args.repeat)
        assert a == b, "cascade kernels disagree"
        print(f"{f'cascade sweep n={n} k={args.k}':<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}")

        f = build_m(system, args.k, args.stage)
        a, tp = _best(lambda: kernels.dpll_solve(f.num_vars, f.clauses, impl=py), args.repeat)
        b, tc = _best(lambda: kernels.dpll_solve(f.num_vars, f.clauses, impl=cy), args.repeat)
        assert a == b, "DPLL kernels disagree"
        label = f"dpll M_{args.stage} n={n} ({f.num_vars} vars)"
        print(f"{label:<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
