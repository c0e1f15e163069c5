"""Independent ground truth for hitting-time moments.

Solves the first-step equations

    h(x) = 1 + sum_y P(x, y) h(y),              h(target) = 0
    s(x) = 1 + sum_y P(x, y) (s(y) + 2 h(y)),   s(target) = 0

directly on the transition probabilities, without using the invariant
measure.  The tree structure makes both systems solvable by elimination:
rooting the tree at ``target``, each subtree condenses into an affine
relation ``h(x) = alpha_x + beta_x h(q(x))`` with ``q(x)`` the neighbour
of ``x`` towards the target.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np

DEFAULT_CAP = 100_000
RESIDUAL_TOL = 1e-10


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LinearHittingSolution:
    target: int
    mean: np.ndarray
    second: np.ndarray
    residual: float


def _neighbours(tree, spec):
    """Per node: list of (neighbour, P(x, neighbour)) excluding self-loops."""
    n = tree.node_count
    par = tree.parent.tolist()
    lam = spec.lam.tolist()
    mu = spec.mu.tolist()
    nbrs = [[] for _ in range(n)]
    for x in range(1, n):
        p = par[x]
        nbrs[x].append((p, mu[x]))
        nbrs[p].append((x, lam[x]))
    return nbrs


def _residual(nbrs, kappa, target, values, const):
    worst = 0.0
    for x, row in enumerate(nbrs):
        if x == target:
            continue
        rhs = const[x] + kappa[x] * values[x] + sum(p * values[y] for y, p in row)
        worst = max(worst, abs(values[x] - rhs) / (1.0 + abs(values[x])))
    return worst


def solve_hitting(tree, spec, target, cap=DEFAULT_CAP, tol=RESIDUAL_TOL):
    """E[T_{x -> target}] and E[T^2_{x -> target}] for every node ``x``."""
    n = tree.node_count
    if n > cap:
        raise OracleError(f"tree has {n} nodes, above the oracle cap {cap}")
    if not 0 <= target < n:
        raise OracleError(f"unknown target {target}")
    nbrs = _neighbours(tree, spec)
    kappa = spec.kappa.tolist()

    # breadth-first order from the target; toward[x] is q(x)
    toward = [-1] * n
    order = [target]
    seen = [False] * n
    seen[target] = True
    queue = deque([target])
    while queue:
        x = queue.popleft()
        for y, _ in nbrs[x]:
            if not seen[y]:
                seen[y] = True
                toward[y] = x
                order.append(y)
                queue.append(y)

    p_toward = [0.0] * n
    denom = [1.0] * n
    beta = [0.0] * n
    alpha = [0.0] * n
    for x in reversed(order[1:]):
        d = 1.0 - kappa[x]
        a = 1.0
        for y, p in nbrs[x]:
            if y == toward[x]:
                p_toward[x] = p
            else:
                d -= p * beta[y]
                a += p * alpha[y]
        if d <= 0.0:
            raise OracleError(f"singular elimination at node {x}")
        denom[x] = d
        beta[x] = p_toward[x] / d
        alpha[x] = a / d

    h = [0.0] * n
    for x in order[1:]:
        h[x] = alpha[x] + beta[x] * h[toward[x]]

    const = [0.0] * n
    for x in range(n):
        if x != target:
            const[x] = 1.0 + 2.0 * (kappa[x] * h[x] + sum(p * h[y] for y, p in nbrs[x]))
    alpha2 = [0.0] * n
    for x in reversed(order[1:]):
        a = const[x]
        for y, p in nbrs[x]:
            if y != toward[x]:
                a += p * alpha2[y]
        alpha2[x] = a / denom[x]
    s = [0.0] * n
    for x in order[1:]:
        s[x] = alpha2[x] + beta[x] * s[toward[x]]

    ones = [0.0 if x == target else 1.0 for x in range(n)]
    shifted = [c - 1.0 for c in const]  # 2 sum_y P(x,y) h(y)
    r1 = _residual(nbrs, kappa, target, h, ones)
    r2 = _residual(nbrs, kappa, target, s, [o + c for o, c in zip(ones, shifted)])
    residual = max(r1, r2)
    if not residual <= tol:
        raise OracleError(f"first-step residual {residual:.3e} above {tol:.1e}")
    return LinearHittingSolution(target, np.array(h), np.array(s), residual)
