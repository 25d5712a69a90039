"""Compare the compiled gossip kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--iters N] [--repeat R]
"""

import argparse
import time

import numpy as np

from hbgossip import _kernels_py
from hbgossip.topology import make_grid2d

try:
    from hbgossip import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--iters", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = make_grid2d(10, 10)
    rng = np.random.default_rng(0)
    c = rng.standard_normal(g.n)
    x_star = np.full(g.n, c.mean())
    ei, ej = g.edge_endpoints()
    seq = rng.integers(0, g.m, args.iters)
    blocks = np.stack(
        [rng.choice(g.m, size=5, replace=False) for _ in range(args.iters // 10)]
    ).astype(np.int64)
    bdiag = np.full(g.n, 0.3)

    backends = [_kernels_py] + ([] if _kernels is None else [_kernels])
    print(f"grid 10x10, {args.iters} pairwise steps, {len(blocks)} block steps")
    ref = {}
    for be in backends:
        tp = timeit(
            lambda be=be: be.pairwise_trace(c, x_star, ei[seq], ej[seq], 1.0, bdiag), args.repeat
        )
        tb = timeit(
            lambda be=be: be.block_trace(c, x_star, blocks, ei, ej, 1.0, 0.3), args.repeat
        )
        ref[be.BACKEND] = (tp, tb)
        print(f"{be.BACKEND:>8}: pairwise {tp:8.3f}s   block {tb:8.3f}s")
    if len(ref) == 2:
        sp = ref["python"][0] / ref["cython"][0]
        sb = ref["python"][1] / ref["cython"][1]
        print(f"speedup : pairwise {sp:7.1f}x   block {sb:7.1f}x")


if __name__ == "__main__":
    main()
