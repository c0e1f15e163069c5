"""Rooted trees with dense integer ids, root 0, parents listed before children."""
from dataclasses import dataclass

import numpy as np

from . import kernels


class TreeError(ValueError):
    """Raised for malformed parent lists."""


@dataclass(frozen=True, eq=False)
class Tree:
    """Immutable array-backed rooted tree.

    ``parent[0] == -1``.  Nodes of the branch ``B_x`` (``x`` and all of its
    descendants) occupy the contiguous preorder slice
    ``order[enter[x]:enter[x] + size[x]]``.
    """

    parent: np.ndarray
    depth: np.ndarray
    size: np.ndarray
    enter: np.ndarray
    order: np.ndarray
    child_ptr: np.ndarray
    child_idx: np.ndarray

    @property
    def node_count(self):
        return int(self.parent.shape[0])

    @property
    def max_depth(self):
        return int(self.depth.max()) if self.node_count else 0

    def children(self, x):
        return self.child_idx[self.child_ptr[x]:self.child_ptr[x + 1]].tolist()

    def is_ancestor(self, x, y):
        """True iff ``x`` precedes ``y`` in the tree order (``y`` lies in ``B_x``)."""
        e = self.enter[x]
        return bool(e <= self.enter[y] < e + self.size[x])

    def branch(self, x):
        e = int(self.enter[x])
        return self.order[e:e + int(self.size[x])]

    def leaves(self):
        return np.flatnonzero(self.size == 1)

    def nodes_at_depth(self, k):
        return np.flatnonzero(self.depth == k)

    def edges(self):
        return [(i, int(self.parent[i])) for i in range(1, self.node_count)]


def build_tree(parent_list):
    """Build a :class:`Tree` from ``(node, parent)`` pairs.

    The root 0 is implicit and every other id in ``0..N-1`` must appear
    exactly once with a parent of smaller id.
    """
    pairs = list(parent_list)
    n = len(pairs) + 1
    parent = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    for node, par in pairs:
        node, par = int(node), int(par)
        if node == 0:
            raise TreeError("the root 0 cannot have a parent")
        if node < 0 or node >= n:
            raise TreeError(f"node {node} outside 0..{n - 1}: ids must be dense "
                            f"(disconnected or missing node)")
        if seen[node]:
            raise TreeError(f"duplicate node {node}")
        if par < 0 or par >= n:
            raise TreeError(f"unknown parent {par} of node {node}")
        if par >= node:
            raise TreeError(f"parent {par} of node {node} does not precede it "
                            f"(cycle or forward reference)")
        seen[node] = True
        parent[node] = par
    return _from_parent_array(parent)


def from_parent_array(parent):
    """Build a tree from a parent array with ``parent[0] == -1``."""
    parent = np.array(parent, dtype=np.int64)
    if parent.ndim != 1 or parent.shape[0] == 0 or parent[0] != -1:
        raise TreeError("parent array must be 1-d with parent[0] == -1")
    ids = np.arange(parent.shape[0])
    bad = np.flatnonzero((parent[1:] < 0) | (parent[1:] >= ids[1:]))
    if bad.size:
        x = int(bad[0]) + 1
        raise TreeError(f"parent {int(parent[x])} of node {x} does not precede it")
    return _from_parent_array(parent)


def _from_parent_array(parent):
    depth, size, enter, order = kernels.tree_index(parent)
    n = parent.shape[0]
    counts = np.bincount(parent[1:], minlength=n) if n > 1 else np.zeros(n, dtype=np.int64)
    child_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=child_ptr[1:])
    # stable sort keeps children in increasing id order
    child_idx = (np.argsort(parent[1:], kind="stable") + 1).astype(np.int64)
    for arr in (parent, depth, size, enter, order, child_ptr, child_idx):
        arr.setflags(write=False)
    return Tree(parent, depth, size, enter, order, child_ptr, child_idx)


def root_path(tree, x):
    """``[x, p(x), ..., alpha_x]``: the iterated parents of ``x``, root excluded.

    ``root_path(tree, 0)`` is the empty list.
    """
    path = []
    par = tree.parent
    while x > 0:
        path.append(int(x))
        x = par[x]
    return path


def alpha(tree, x):
    """Last node before the root on the path from ``x``."""
    path = root_path(tree, x)
    if not path:
        raise TreeError("the root has no alpha node")
    return path[-1]


def kth_parent(tree, a, k):
    """``a_k``, the k-th parent of ``a`` (``a_0 = a``, ``a_{d(a)} = 0``)."""
    d = int(tree.depth[a])
    if not 0 <= k <= d:
        raise TreeError(f"k={k} outside 0..{d}")
    x = a
    for _ in range(k):
        x = int(tree.parent[x])
    return x


def branch_decomposition(tree, a, k):
    """Split the nodes around ``a_k``.

    Returns ``(branch, complement, side_branches)``: the branch ``B_{a_k}``,
    its complement, and the complement minus the path ``a_{k+1}..a_{d(a)}``.
    """
    a_k = kth_parent(tree, a, k)
    branch = frozenset(tree.branch(a_k).tolist())
    complement = frozenset(range(tree.node_count)) - branch
    upper_path = {a_k} | set(root_path(tree, a_k)) | {0}
    upper_path.discard(a_k)
    side = complement - upper_path
    return branch, complement, side
