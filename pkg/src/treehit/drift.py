"""Strong-drift constants and cut-off / escape diagnostics for families of chains."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .hitting import HittingTimes
from .tree import TreeError, root_path

DEFAULT_THRESHOLD = 0.1
DEFAULT_SLACK = 0.05
# ties in E[T_{b->0}] >= C E[T_{a->0}] are decided up to this relative error
L_SET_RTOL = 1e-12


@dataclass(frozen=True)
class DriftReport:
    """Drift constants for the chain and target node ``a``.

    ``K_a``/``K_mu`` range over the branch of the root child on the path of
    ``a``; the primed versions range over every non-root node.
    """

    a: int
    depth: int
    K_mu: float
    Kp_mu: float
    K_a: float
    K_a_pi: float  # same supremum evaluated as pi(B_b)/pi(b) from plain branch sums
    Kp_a: float
    Q_a: float
    R_a: float
    Gamma_a: float
    mean_to_root: float  # E[T_{a->0}]
    log_mean_from_root: float  # log E[T_{0->a}]
    sup_mean_to_root: float  # sup_x E[T_{x->0}]
    variance_to_root: float  # Var(T_{a->0})

    @property
    def cutoff_ratio(self):
        return self.K_a ** 2 / self.mean_to_root

    @property
    def sup_ratio(self):
        return self.sup_mean_to_root / self.mean_to_root

    @property
    def kp_ratio(self):
        return self.Kp_a ** 2 / self.mean_to_root

    @property
    def escape_ratios(self):
        return self.sup_ratio, self.kp_ratio

    @property
    def var_ratio_bound(self):
        return 2.0 * self.Q_a / self.mean_to_root

    @property
    def var_ratio(self):
        """Exact Var(T_{a->0} / E[T_{a->0}])."""
        return self.variance_to_root / self.mean_to_root ** 2

    @property
    def r_ratio(self):
        return self.R_a / self.mean_to_root

    @property
    def mean_from_root(self):
        return math.exp(self.log_mean_from_root) if self.log_mean_from_root < math.log(1e300) else math.inf


def drift_report(tree, spec, measure=None, a=None, hitting=None):
    if a is None or a == 0:
        raise TreeError("drift_report needs a non-root target node")
    if hitting is None:
        hitting = HittingTimes(tree, spec, measure)
    measure = hitting.measure
    path = root_path(tree, a)
    branch = tree.branch(path[-1])
    mu = spec.mu
    rho = measure.branch_ratio

    with np.errstate(divide="ignore", invalid="ignore"):
        plain = measure.branch_mass[branch] / measure.pi[branch]
    plain = plain[np.isfinite(plain)]

    to_root = hitting.mean_to_root_all()
    e_up = float(to_root[a])
    log_e_down = float(hitting.log_mean_from_root_all()[a])
    path_arr = np.asarray(path)
    q = measure.second_sum[path_arr] / rho[path_arr]
    log_r = float(logsumexp(measure.log_pi[path_arr] + 2.0 * np.log(rho[path_arr])
                            - np.log(mu[path_arr])))
    gamma = 1.0 / (1.0 + math.exp(log_e_down - math.log(e_up)))
    up = hitting.hitting(0, len(path), a)
    return DriftReport(
        a=int(a),
        depth=len(path),
        K_mu=float(mu[branch].min()),
        Kp_mu=float(mu[1:].min()),
        K_a=float((mu[branch] * hitting.up_mean[branch]).max()),
        K_a_pi=float(plain.max()) if plain.size else math.nan,
        Kp_a=float(rho[1:].max()),
        Q_a=float(q.max()),
        R_a=math.exp(log_r),
        Gamma_a=gamma,
        mean_to_root=e_up,
        log_mean_from_root=log_e_down,
        sup_mean_to_root=float(to_root.max()),
        variance_to_root=up.variance,
    )


def l_set(tree, spec, measure=None, a=None, C=1.0, hitting=None):
    """Nodes ``b`` of the branch containing ``a`` with E[T_{b->0}] >= C E[T_{a->0}]."""
    if not C > 0:
        raise ValueError("C must be positive")
    if hitting is None:
        hitting = HittingTimes(tree, spec, measure)
    branch = tree.branch(root_path(tree, a)[-1])
    to_root = hitting.mean_to_root_all()
    cut = C * to_root[a] * (1.0 - L_SET_RTOL)
    return np.sort(branch[to_root[branch] >= cut])


# --- families ---------------------------------------------------------------

def _decreasing_tail(seq, n=3):
    tail = seq[-n:]
    return all(b < a for a, b in zip(tail, tail[1:]))


def _bounded_above(seq, slack):
    tail = seq[-3:]
    if all(b <= a * (1.0 + 1e-12) for a, b in zip(tail, tail[1:])):
        return True
    return seq[-1] <= seq[0] * (1.0 + slack)


def _bounded_below(seq, slack):
    tail = seq[-3:]
    if all(b >= a * (1.0 - 1e-12) for a, b in zip(tail, tail[1:])):
        return seq[-1] > 0
    return seq[-1] >= seq[0] / (1.0 + slack) and seq[-1] > 0


@dataclass
class FamilyVerdict:
    depths: list
    reports: list
    verdict: str
    drift_holds: bool
    bounds_hold: bool
    timescale_holds: bool
    bounds: dict
    l_sets: list = field(repr=False)

    def sequence(self, name):
        return [getattr(r, name) for r in self.reports]


def family_verdict(family, threshold=DEFAULT_THRESHOLD, K=None, Kp=None,
                   Kp_mu=None, C=1.0, slack=DEFAULT_SLACK):
    """Classify a family of ``(tree, spec, a)`` triples ordered by depth of ``a``.

    Limits cannot be decided from finitely many depths, so the verdict is a
    trend heuristic:

    * drift: ``cutoff_ratio`` strictly decreasing over the last three depths
      and below ``threshold`` at the last one;
    * growth bounds: each of ``sup_ratio`` <= K, ``kp_ratio`` <= K' and
      ``Kp_mu`` >= K'_mu at every depth when the bound is given, otherwise a
      tail that does not drift away (within ``slack``);
    * time scales: ``R_a / E[T_{a->0}]`` decreasing over the last three depths
      and below ``threshold``.

    ``both`` needs drift and the growth bounds, ``cutoff-supported`` drift
    alone, ``escape-supported`` the growth bounds plus the time-scale
    separation without drift; anything else is ``inconclusive``.
    """
    family = list(family)
    if len(family) < 3:
        raise ValueError("a family verdict needs at least 3 depths")
    reports, l_sets = [], []
    for tree, spec, a in family:
        hitting = HittingTimes(tree, spec)
        reports.append(drift_report(tree, spec, a=a, hitting=hitting))
        l_sets.append(l_set(tree, spec, a=a, C=C, hitting=hitting))
    depths = [r.depth for r in reports]
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise ValueError(f"depths must be strictly increasing, got {depths}")

    cut = [r.cutoff_ratio for r in reports]
    sup = [r.sup_ratio for r in reports]
    kp = [r.kp_ratio for r in reports]
    kmu = [r.Kp_mu for r in reports]
    rr = [r.r_ratio for r in reports]

    drift = _decreasing_tail(cut) and cut[-1] < threshold
    checks = [
        all(v <= K for v in sup) if K is not None else _bounded_above(sup, slack),
        all(v <= Kp for v in kp) if Kp is not None else _bounded_above(kp, slack),
        all(v >= Kp_mu for v in kmu) if Kp_mu is not None else _bounded_below(kmu, slack),
    ]
    bounded = all(checks)
    timescale = _decreasing_tail(rr) and rr[-1] < threshold
    if drift and bounded:
        verdict = "both"
    elif drift:
        verdict = "cutoff-supported"
    elif bounded and timescale:
        verdict = "escape-supported"
    else:
        verdict = "inconclusive"
    bounds = {
        "K": K if K is not None else max(sup),
        "Kp": Kp if Kp is not None else max(kp),
        "Kp_mu": Kp_mu if Kp_mu is not None else min(kmu),
        "sup_ratio_ok": checks[0],
        "kp_ratio_ok": checks[1],
        "Kp_mu_ok": checks[2],
    }
    return FamilyVerdict(depths, reports, verdict, drift, bounded, timescale, bounds, l_sets)
