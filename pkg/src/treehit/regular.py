"""Biased random walk on the finite r-ary (Cayley) tree.

Each non-root site steps to its parent with probability lambda/(lambda+r)
and to each child with 1/(lambda+r); the root and the leaves hold the
leftover mass as a self-loop.  The closed forms below are written out
independently of :mod:`treehit.hitting` so the two can check each other.
"""
import math
from dataclasses import dataclass

import numpy as np

from .chain import make_spec
from .tree import from_parent_array

DEFAULT_NODE_CAP = 2_200_000


@dataclass(frozen=True)
class RegularSpec:
    r: int
    bias: float
    depth: int

    def __post_init__(self):
        if self.r < 1 or self.depth < 1 or not self.bias > 0:
            raise ValueError("need r >= 1, depth >= 1 and bias > 0")

    @property
    def node_count(self):
        if self.r == 1:
            return self.depth + 1
        return (self.r ** (self.depth + 1) - 1) // (self.r - 1)

    @property
    def regime(self):
        if self.bias > self.r:
            return "localized"
        if self.bias < self.r:
            return "delocalized"
        return "critical"


def generate(spec, cap=DEFAULT_NODE_CAP):
    """Tree and chain in level order; node ``i``'s children are ``r i + 1 .. r i + r``.

    The last node is a leaf at the deepest level.
    """
    n = spec.node_count
    if n > cap:
        raise ValueError(f"{n} nodes exceed the cap {cap}")
    r, lam_b = spec.r, float(spec.bias)
    ids = np.arange(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    parent[1:] = (ids[1:] - 1) // r
    tree = from_parent_array(parent)
    down = 1.0 / (lam_b + r)
    up = lam_b / (lam_b + r)
    lam = np.full(n, down)
    mu = np.full(n, up)
    kappa = np.zeros(n)
    kappa[0] = up
    kappa[tree.depth == spec.depth] = r / (lam_b + r)
    return tree, make_spec(tree, lam, mu, kappa)


def deepest_node(spec):
    return spec.node_count - 1


def level_chain(spec):
    """The walk's level process: a path 0..depth with the same up/down rates.

    By symmetry the depth of the walk is itself a birth-and-death chain on a
    path, so hitting the root from any leaf has the same law as hitting 0
    from ``depth`` here.  Useful to simulate depths whose tree is too large.
    """
    d, r, lam_b = spec.depth, spec.r, float(spec.bias)
    parent = np.arange(-1, d, dtype=np.int64)
    tree = from_parent_array(parent)
    lam = np.full(d + 1, r / (lam_b + r))
    mu = np.full(d + 1, lam_b / (lam_b + r))
    kappa = np.zeros(d + 1)
    kappa[0] = lam_b / (lam_b + r)
    kappa[d] = r / (lam_b + r)
    return tree, make_spec(tree, lam, mu, kappa)


@dataclass(frozen=True)
class ClosedForms:
    K_a: float
    E_T_a_to_0: float
    pi0: float
    E_return_0: float  # exact Kac value 1/pi(0)
    E_return_a: float  # exact Kac value 1/pi(a)
    E_return_0_asymp: float
    E_return_a_asymp: float
    regime: str

    def pi_at(self, level, bias):
        return self.pi0 / bias ** level


def _geometric(q, terms):
    """sum_{k=0}^{terms-1} q^k."""
    if q == 1.0:
        return float(terms)
    return (1.0 - q ** terms) / (1.0 - q)


def closed_forms(spec):
    """Exact K_a, E[T_{a->0}], pi(0) and Kac return times for a deepest node ``a``."""
    r, lam_b, d = spec.r, float(spec.bias), spec.depth
    q = r / lam_b
    if spec.regime == "critical":
        k_a = float(d)
        e_t = (lam_b + r) / (2.0 * lam_b) * d * (d + 1)
    else:
        k_a = lam_b / (lam_b - r) * (1.0 - q ** d)
        e_t = (lam_b + r) / (lam_b - r) * (d + r / (lam_b - r) * (q ** d - 1.0))
    pi0 = 1.0 / _geometric(q, d + 1)
    if spec.regime == "localized":
        ret0_asymp = lam_b / (lam_b - r)
        reta_asymp = lam_b ** (d + 1) / (lam_b - r)
    else:
        ret0_asymp = reta_asymp = math.inf
    return ClosedForms(
        K_a=k_a,
        E_T_a_to_0=e_t,
        pi0=pi0,
        E_return_0=1.0 / pi0,
        E_return_a=lam_b ** d / pi0,
        E_return_0_asymp=ret0_asymp,
        E_return_a_asymp=reta_asymp,
        regime=spec.regime,
    )
