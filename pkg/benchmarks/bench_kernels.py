"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 20000] [--avg-degree 10] [--json out.json]
"""
import argparse
import json
import timeit

import numpy as np

from corecut import kernels
from corecut.generators import erdos_renyi
from corecut.graph import largest_connected_component


def cases(g, rng):
    scale = rng.random(g.n)
    x = rng.normal(size=g.n)
    order = rng.permutation(g.n).astype(np.int64)
    small = largest_connected_component(erdos_renyi(16, 0.4, seed=1))[0]
    return {
        "scaled_matvec": lambda b: b.scaled_matvec(g.indptr, g.indices, g.weights, scale, x),
        "sweep_cuts": lambda b: b.sweep_cuts(g.indptr, g.indices, g.weights, order),
        "bridge_forest": lambda b: b.bridge_forest(g.indptr, g.indices),
        "subset_cut_volume(n=16)": lambda b: b.subset_cut_volume(
            small.indptr, small.indices, small.weights, small.degrees),
    }


def best_of(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--avg-degree", type=float, default=10.0)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json")
    args = parser.parse_args()
    if kernels.compiled_backend is None:
        parser.error("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    g = erdos_renyi(args.n, args.avg_degree / args.n, seed=0)
    rng = np.random.default_rng(0)
    rows = []
    print(f"graph: n={g.n} edges={g.n_edges}")
    print(f"{'kernel':<26}{'compiled (ms)':>15}{'python (ms)':>15}{'speedup':>10}")
    for name, fn in cases(g, rng).items():
        c = best_of(lambda: fn(kernels.compiled_backend), args.repeat) * 1e3
        p = best_of(lambda: fn(kernels.python_backend), args.repeat) * 1e3
        rows.append({"kernel": name, "compiled_ms": c, "python_ms": p, "speedup": p / c})
        print(f"{name:<26}{c:>15.3f}{p:>15.3f}{p / c:>10.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"n": g.n, "edges": g.n_edges, "results": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
