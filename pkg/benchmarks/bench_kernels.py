"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --nodes 20000 --replicas 200
"""
import argparse
import time

import numpy as np

from treehit import kernels
from treehit.randomize import random_spec, random_tree
from treehit.regular import RegularSpec, deepest_node, generate
from treehit.sim import TransitionTable


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(tree, spec, table, leaf, replicas):
    mu = np.where(np.arange(tree.node_count) == 0, 1.0, spec.mu)

    def tree_passes(be):
        be.tree_index(tree.parent)
        logw, rho, g, _ = be.chain_pass(tree.parent, spec.lam, spec.mu)
        be.complement_pass(tree.parent, tree.child_ptr, tree.child_idx, spec.lam, mu,
                           rho, g, logw)
        be.path_cumsum(tree.parent, rho)

    def walks(be):
        out = np.zeros(replicas, dtype=np.int64)
        be.walk(table.offsets, table.cum, table.dest, leaf, 0, 1, 0, replicas,
                10 ** 9, 0, out)
        return out

    return {"tree passes": tree_passes, "walk leaf->root": walks}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20_000, help="random tree size")
    ap.add_argument("--depth", type=int, default=10, help="regular tree depth for the walks")
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if kernels.compiled_backend is None:
        raise SystemExit("compiled kernels are not built; run pip install -e .")
    rng = np.random.default_rng(args.seed)
    tree = random_tree(rng, args.nodes)
    spec = random_spec(rng, tree)
    rs = RegularSpec(2, 4.0, args.depth)
    rtree, rspec = generate(rs)
    table = TransitionTable(rtree, rspec)
    leaf = deepest_node(rs)

    fns = cases(tree, spec, table, leaf, args.replicas)
    print("kernel\tpython_s\tcompiled_s\tspeedup")
    for name, fn in fns.items():
        tp = best_of(lambda: fn(kernels.python_backend), args.repeat)
        tc = best_of(lambda: fn(kernels.compiled_backend), args.repeat)
        print(f"{name}\t{tp:.4f}\t{tc:.5f}\t{tp / tc:.0f}x")
    # the two backends must agree bit for bit
    same = np.array_equal(fns["walk leaf->root"](kernels.python_backend),
                          fns["walk leaf->root"](kernels.compiled_backend))
    print(f"walks identical\t{same}")


if __name__ == "__main__":
    main()
