"""Closed-form first and second moments of hitting times along root paths.

All quantities are built from normalization-free ratios (branch ratios
``rho``, subtree sums) or in log space, so escape times that grow
exponentially with the depth remain representable.  Values whose magnitude
passes :data:`LOG_SWITCH` are only available through their ``log_`` fields.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .chain import stationary
from .tree import TreeError, root_path

LOG_SWITCH = math.log(1e300)
NEG_INF = float("-inf")


def _from_log(v):
    return math.exp(v) if v < LOG_SWITCH else math.inf


def _log(v):
    return math.log(v) if v > 0.0 else NEG_INF


def _log_sub(la, lb):
    """log(exp(la) - exp(lb)) for la >= lb; -inf when the difference vanishes."""
    if lb == NEG_INF:
        return la
    d = lb - la
    if d >= 0.0:
        return NEG_INF
    return la + math.log1p(-math.exp(d))


def _suffix_sums(values):
    """out[k] = sum(values[k+1:]), compensated."""
    out = [0.0] * len(values)
    s = 0.0
    c = 0.0
    for k in range(len(values) - 1, 0, -1):
        v = values[k]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[k - 1] = s + c
    return out


@dataclass(frozen=True)
class MomentReport:
    """First two moments of ``T_{source -> target}``.

    ``mean``, ``second`` and ``variance`` are ``inf`` once they pass 1e300;
    ``log_scale`` flags that case and the ``log_`` fields stay exact.
    """

    source: int
    target: int
    log_mean: float
    log_second: float
    log_variance: float

    @property
    def mean(self):
        return _from_log(self.log_mean)

    @property
    def second(self):
        return _from_log(self.log_second)

    @property
    def variance(self):
        return _from_log(self.log_variance)

    @property
    def log_scale(self):
        return self.log_second >= LOG_SWITCH

    @classmethod
    def zero(cls, node):
        return cls(node, node, NEG_INF, NEG_INF, NEG_INF)

    @classmethod
    def from_values(cls, source, target, mean, second):
        var = second - mean * mean
        return cls(source, target, _log(mean), _log(second), _log(max(var, 0.0)))


class HittingTimes:
    """Per-chain tables answering hitting-time queries between a node and its
    ancestors in O(depth).

    Parameters
    ----------
    tree, spec : Tree, ChainSpec
    measure : StationaryMeasure, optional
        Computed from ``tree`` and ``spec`` when omitted.
    """

    def __init__(self, tree, spec, measure=None):
        if measure is None:
            measure = stationary(tree, spec)
        self.tree = tree
        self.spec = spec
        self.measure = measure
        n = tree.node_count
        mu = np.where(np.arange(n) == 0, 1.0, spec.mu)
        rho = measure.branch_ratio
        log_mu = np.log(mu)

        up_mean = rho / mu
        up_mean[0] = 0.0
        up_second = 2.0 * measure.second_sum / mu - up_mean
        up_second[0] = 0.0

        lcm, lnum = kernels.complement_pass(
            tree.parent, tree.child_ptr, tree.child_idx, spec.lam, mu, rho,
            measure.second_sum, measure.log_pi)
        log_down_mean = lcm - measure.log_pi - log_mu
        log_down_mean[0] = NEG_INF
        # log of 2 (sum_{C_x} + sum_{l(x)}) / (mu_x pi(x)), the positive part
        # of the parent -> child second moment
        log_down_pos = math.log(2.0) + lnum - measure.log_pi - log_mu
        log_down_pos[0] = NEG_INF

        self.log_complement_mass = lcm
        self.up_mean = up_mean
        self.up_second = up_second
        self.log_down_mean = log_down_mean
        self.log_down_pos = log_down_pos
        self.log_inv_mu_pi = -measure.log_pi - log_mu
        for arr in (up_mean, up_second, log_down_mean, log_down_pos, lcm):
            arr.setflags(write=False)
        self._to_root = None
        self._log_from_root = None

    # -- single edges -------------------------------------------------------

    def _check_edge(self, x):
        if x == 0 or not 0 <= x < self.tree.node_count:
            raise TreeError(f"edge queries need a non-root node, got {x}")

    def mean_up_edge(self, x):
        """E[T_{x -> p(x)}] = rho(x) / mu_x."""
        self._check_edge(x)
        return float(self.up_mean[x])

    def second_up_edge(self, x):
        self._check_edge(x)
        return float(self.up_second[x])

    def log_mean_down_edge(self, x):
        self._check_edge(x)
        return float(self.log_down_mean[x])

    def mean_down_edge(self, x):
        """E[T_{p(x) -> x}] = (1 - pi(B_x)) / (mu_x pi(x))."""
        return _from_log(self.log_mean_down_edge(x))

    def log_second_down_edge(self, x):
        self._check_edge(x)
        return _log_sub(float(self.log_down_pos[x]), float(self.log_down_mean[x]))

    def second_down_edge(self, x):
        return _from_log(self.log_second_down_edge(x))

    # -- root-path pairs ----------------------------------------------------

    def path(self, a):
        """``[a_0, ..., a_{d(a)}]`` with ``a_0 = a`` and ``a_{d(a)} = 0``."""
        return root_path(self.tree, a) + [0]

    def _nodes(self, j, n, a):
        nodes = self.path(a)
        d = len(nodes) - 1
        if not (0 <= j <= d and 0 <= n <= d):
            raise TreeError(f"indices ({j}, {n}) outside 0..{d} for node {a}")
        return nodes

    def mean_hitting(self, j, n, a):
        """E[T_{a_j -> a_n}] as a report whose second moment is not filled in.

        Use :meth:`hitting` for both moments.
        """
        nodes = self._nodes(j, n, a)
        if j == n:
            return MomentReport.zero(nodes[j])
        if j < n:
            m = math.fsum(self.up_mean[nodes[j:n]])
            return MomentReport(nodes[j], nodes[n], _log(m), NEG_INF, NEG_INF)
        lm = float(logsumexp(self.log_down_mean[nodes[n:j]]))
        return MomentReport(nodes[j], nodes[n], lm, NEG_INF, NEG_INF)

    def hitting(self, j, n, a):
        """Both moments of ``T_{a_j -> a_n}``; the direction follows from ``j`` vs ``n``."""
        nodes = self._nodes(j, n, a)
        if j == n:
            return MomentReport.zero(nodes[j])
        if j < n:
            return self._up(nodes, j, n)
        return self._down(nodes, j, n)

    second_hitting = hitting

    def _up(self, nodes, j, n):
        seg = nodes[j:n]
        m = self.up_mean[seg].tolist()
        mean = math.fsum(m)
        rest = _suffix_sums(m)  # E[T_{a_{k+1} -> a_n}]
        g = self.measure.second_sum[seg]
        mu = self.spec.mu[seg]
        terms = (2.0 * g / mu).tolist() + [2.0 * mk * rk for mk, rk in zip(m, rest)]
        second = math.fsum(terms) - mean
        return MomentReport.from_values(nodes[j], nodes[n], mean, second)

    def _down(self, nodes, j, n):
        # source a_j above target a_n; edges a_k for k = n..j-1
        seg = nodes[n:j]
        ldm = self.log_down_mean[seg]
        log_mean = float(logsumexp(ldm))
        # E[T_{a_k -> a_n}] = sum_{i=n}^{k-1} down means
        prefix = np.concatenate(([NEG_INF], np.logaddexp.accumulate(ldm)[:-1]))
        terms = np.concatenate((self.log_down_pos[seg], math.log(2.0) + ldm + prefix))
        log_pos = float(logsumexp(terms))
        log_second = _log_sub(log_pos, log_mean)
        log_var = _log_sub(log_second, 2.0 * log_mean)
        return MomentReport(nodes[j], nodes[n], log_mean, log_second, log_var)

    def sum_identity_rhs(self, j, n, a):
        """log of sum_k 1/(mu_{a_k} pi(a_k)) over the edges between ``a_j`` and ``a_n``."""
        nodes = self._nodes(j, n, a)
        lo, hi = min(j, n), max(j, n)
        if lo == hi:
            return NEG_INF
        return float(logsumexp(self.log_inv_mu_pi[nodes[lo:hi]]))

    def variance_by_edges(self, j, n, a):
        """Var(T_{a_j -> a_n}) for j < n as the sum of independent edge variances."""
        nodes = self._nodes(j, n, a)
        seg = nodes[j:n]
        return math.fsum(self.up_second[seg] - self.up_mean[seg] ** 2)

    # -- whole-tree sweeps --------------------------------------------------

    def mean_to_root_all(self):
        """E[T_{x -> 0}] for every node."""
        if self._to_root is None:
            self._to_root = kernels.path_cumsum(self.tree.parent, self.up_mean)
            self._to_root.setflags(write=False)
        return self._to_root

    def log_mean_from_root_all(self):
        """log E[T_{0 -> x}] for every node (-inf at the root)."""
        if self._log_from_root is None:
            self._log_from_root = kernels.path_logcumsum(self.tree.parent, self.log_down_mean)
            self._log_from_root.setflags(write=False)
        return self._log_from_root

    def log_second_moment_bound(self, j, n, a, drift):
        """log of the upper bound on E[T^2_{a_n -> a_j}] for ``j < n``:
        E[T] (2 (K'_a^2 / K'_mu + E[T_{0 -> a_j}]) - 1)."""
        if not j < n:
            raise TreeError("the second-moment bound needs j < n")
        nodes = self._nodes(j, n, a)
        log_mean = self.mean_hitting(n, j, a).log_mean
        log_c = _log(drift.Kp_a ** 2 / drift.Kp_mu)
        log_e0 = float(self.log_mean_from_root_all()[nodes[j]])
        t = float(np.logaddexp(log_c, log_e0))
        return log_mean + t + math.log(2.0) + math.log1p(-0.5 * math.exp(-t))

    def second_moment_bound(self, j, n, a, drift):
        return _from_log(self.log_second_moment_bound(j, n, a, drift))
