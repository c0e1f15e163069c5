"""Cross-checks of the closed-form layer against the linear solver and the
drift inequalities, shared by ``treehit verify`` and the test-suite."""
import math
from dataclasses import dataclass

import numpy as np

from .drift import drift_report
from .hitting import HittingTimes
from .oracle import solve_hitting
from .randomize import random_chain

ORACLE_RTOL = 1e-9
IDENTITY_RTOL = 1e-10
K_ROUTE_RTOL = 1e-12
# slack for inequalities that can hold with equality
INEQ_RTOL = 1e-12

CHECKS = ("oracle", "sum_identity", "rqk", "variance_bound", "gamma_bound",
          "second_moment_bound", "k_routes")


def _rel(x, y):
    if x == y:
        return 0.0
    return abs(x - y) / max(abs(x), abs(y))


def _excess(lhs, rhs):
    """Relative amount by which ``lhs <= rhs`` is violated (<= 0 when it holds)."""
    return (lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300)


@dataclass
class CheckResult:
    name: str
    worst: float  # worst relative error or inequality excess
    tol: float
    count: int = 1

    @property
    def ok(self):
        return self.worst <= self.tol


def check_instance(tree, spec, a):
    """Run every check for target node ``a``; returns ``{name: CheckResult}``."""
    ht = HittingTimes(tree, spec)
    nodes = ht.path(a)
    d = len(nodes) - 1
    oracles = {}
    worst_oracle = worst_ident = 0.0
    worst_bound = -math.inf
    drift = drift_report(tree, spec, a=a, hitting=ht)
    for n in range(d + 1):
        sol = oracles.setdefault(n, solve_hitting(tree, spec, nodes[n]))
        for j in range(d + 1):
            if j == n:
                continue
            rep = ht.hitting(j, n, a)
            worst_oracle = max(worst_oracle, float(_rel(rep.mean, sol.mean[nodes[j]])),
                               float(_rel(rep.second, sol.second[nodes[j]])))
            if j < n:
                back = ht.mean_hitting(n, j, a)
                total = math.exp(np.logaddexp(rep.log_mean, back.log_mean))
                worst_ident = max(worst_ident, _rel(total, math.exp(ht.sum_identity_rhs(j, n, a))))
                # second moment of T_{a_n -> a_j} against its bound
                down = ht.hitting(n, j, a)
                bound = ht.log_second_moment_bound(j, n, a, drift)
                worst_bound = max(worst_bound, down.log_second - bound)
    e = drift.mean_to_root
    k_bound = drift.K_a ** 2 / drift.K_mu
    out = {
        "oracle": CheckResult("oracle", worst_oracle, ORACLE_RTOL),
        "sum_identity": CheckResult("sum_identity", worst_ident, IDENTITY_RTOL),
        "rqk": CheckResult("rqk", max(_excess(drift.R_a, drift.Q_a), _excess(drift.Q_a, k_bound)),
                           INEQ_RTOL),
        "variance_bound": CheckResult("variance_bound",
                                      _excess(drift.variance_to_root, 2.0 * drift.Q_a * e), INEQ_RTOL),
        "gamma_bound": CheckResult("gamma_bound", _excess(drift.Gamma_a, drift.R_a / e), INEQ_RTOL),
        "second_moment_bound": CheckResult("second_moment_bound", worst_bound, INEQ_RTOL),
        "k_routes": CheckResult("k_routes", _rel(drift.K_a, drift.K_a_pi), K_ROUTE_RTOL),
    }
    return out


def merge(results):
    """Fold per-instance results into one worst-case result per check."""
    agg = {}
    for res in results:
        for name, r in res.items():
            if name in agg:
                prev = agg[name]
                agg[name] = CheckResult(name, max(prev.worst, r.worst), r.tol, prev.count + 1)
            else:
                agg[name] = CheckResult(name, r.worst, r.tol, 1)
    return agg


def random_corpus(count, seed, max_nodes=50):
    """``count`` seeded ``(tree, spec, a)`` instances with a random non-root ``a``."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        tree, spec = random_chain(rng, max_nodes=max_nodes)
        a = int(rng.integers(1, tree.node_count))
        yield tree, spec, a
