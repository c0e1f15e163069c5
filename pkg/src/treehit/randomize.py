"""Seeded random trees with random valid transition probabilities."""
import numpy as np

from .chain import make_spec
from .tree import from_parent_array


def random_tree(rng, n):
    """Random recursive tree on ``n`` nodes: each node attaches to an earlier one."""
    parent = np.full(n, -1, dtype=np.int64)
    for x in range(1, n):
        parent[x] = rng.integers(0, x)
    return from_parent_array(parent)


def random_spec(rng, tree, loop_prob=0.5, floor=0.05):
    """Normalize random positive weights site by site.

    Every site gets weights for its own ``mu`` (non-root), its children's
    ``lam`` and, with probability ``loop_prob``, a self-loop.
    """
    n = tree.node_count
    lam = np.zeros(n)
    mu = np.zeros(n)
    kappa = np.zeros(n)
    for x in range(n):
        kids = tree.children(x)
        w_mu = rng.uniform(floor, 1.0) if x else 0.0
        w_kids = rng.uniform(floor, 1.0, size=len(kids))
        w_loop = rng.uniform(floor, 1.0) if (rng.random() < loop_prob or not kids and not x) else 0.0
        total = w_mu + w_kids.sum() + w_loop
        mu[x] = w_mu / total
        lam[kids] = w_kids / total
        kappa[x] = w_loop / total
    return make_spec(tree, lam, mu, kappa)


def random_chain(rng, max_nodes=50, min_nodes=2):
    n = int(rng.integers(min_nodes, max_nodes + 1))
    tree = random_tree(rng, n)
    return tree, random_spec(rng, tree)
