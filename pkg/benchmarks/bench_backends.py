"""Compare the compiled split-search kernels against the NumPy fallback.

Times the individual kernels and whole tree builds on synthetic data and
prints one table row per case. Run as:

    python benchmarks/bench_backends.py [--n 20000] [--m 8] [--depth 9]
"""

import argparse
import time

import numpy as np

import prgbm.backend as backend_module
from prgbm import Deterministic, PartiallyRandomized, SeededRng, build_tree
from prgbm import _pykernels

try:
    from prgbm import _splitkern
except ImportError:
    _splitkern = None

KERNEL_NAMES = ("best_split_deterministic", "score_random_splits",
                "uniform_split_scores", "node_stats", "feature_ranges",
                "partition", "predict_nodes")


def activate(module):
    for name in KERNEL_NAMES:
        setattr(backend_module, name, getattr(module, name))


def timed(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cases(n, m, depth, repeats):
    rng = SeededRng(0)
    X = np.ascontiguousarray(rng.normal(size=(n, m)))
    y = np.ascontiguousarray(rng.normal(size=n))
    idx = np.arange(n, dtype=np.int64)
    y_sum = float(np.cumsum(y)[-1])
    u = rng.random(m)
    tree = build_tree(X, y, Deterministic(), 6)

    def det_kernel():
        backend_module.best_split_deterministic(X, y, idx, y_sum)

    def pr_kernel():
        backend_module.uniform_split_scores(X, y, idx, u, y_sum)

    def predict_kernel():
        backend_module.predict_nodes(tree.feature, tree.threshold, tree.left,
                                     tree.right, tree.value, X)

    def det_tree():
        build_tree(X, y, Deterministic(), depth)

    def pr_tree():
        build_tree(X, y, PartiallyRandomized(), depth, rng=SeededRng(1))

    return [
        ("deterministic split kernel (one node)", det_kernel),
        ("uniform split kernel (one node)", pr_kernel),
        ("tree prediction kernel", predict_kernel),
        (f"deterministic tree build (depth {depth})", det_tree),
        (f"partially randomized tree build (depth {depth})", pr_tree),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20_000)
    parser.add_argument("--m", type=int, default=8)
    parser.add_argument("--depth", type=int, default=9)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _splitkern is None:
        print("compiled backend not built; showing NumPy fallback only")
        backends = [("numpy", _pykernels)]
    else:
        backends = [("numpy", _pykernels), ("compiled", _splitkern)]

    results = {}
    for label, module in backends:
        activate(module)
        for case, fn in bench_cases(args.n, args.m, args.depth, args.repeats):
            results.setdefault(case, {})[label] = timed(fn, args.repeats)

    width = max(len(c) for c in results)
    header = f"{'case'.ljust(width)}  {'numpy':>10}  {'compiled':>10}  {'speedup':>8}"
    print(f"n={args.n} m={args.m} depth={args.depth} (best of {args.repeats})")
    print(header)
    print("-" * len(header))
    for case, times in results.items():
        numpy_s = times.get("numpy", float("nan"))
        compiled_s = times.get("compiled", float("nan"))
        ratio = numpy_s / compiled_s if compiled_s == compiled_s else float("nan")
        print(f"{case.ljust(width)}  {numpy_s:>9.4f}s  {compiled_s:>9.4f}s  "
              f"{ratio:>7.1f}x")


if __name__ == "__main__":
    main()
