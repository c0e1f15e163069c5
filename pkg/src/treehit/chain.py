"""Birth-and-death transition specs on trees and their reversible invariant measure."""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import kernels

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Per-node transition probabilities.

    ``lam[x]`` is P(p(x), x), ``mu[x]`` is P(x, p(x)) and ``kappa[x]`` is
    P(x, x).  ``lam[0]`` and ``mu[0]`` are unused and stored as 0.
    """

    lam: np.ndarray
    mu: np.ndarray
    kappa: np.ndarray

    @property
    def node_count(self):
        return int(self.lam.shape[0])


def make_spec(tree, lam, mu, kappa=None):
    """Build a :class:`ChainSpec` from arrays or ``{node: value}`` mappings.

    Missing self-loop probabilities default to 0.
    """
    n = tree.node_count

    def _arr(values, name):
        out = np.zeros(n)
        if values is None:
            return out
        if isinstance(values, dict):
            for k, v in values.items():
                out[int(k)] = float(v)
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != (n,):
                raise ValueError(f"{name} must have length {n}")
            out[:] = values
        return out

    lam_a, mu_a, kappa_a = _arr(lam, "lam"), _arr(mu, "mu"), _arr(kappa, "kappa")
    lam_a[0] = mu_a[0] = 0.0
    for arr in (lam_a, mu_a, kappa_a):
        arr.setflags(write=False)
    return ChainSpec(lam_a, mu_a, kappa_a)


@dataclass
class Violation:
    site: int
    kind: str  # "sum", "positivity" or "negative-kappa"
    value: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def site_sums(tree, spec):
    """Total outgoing probability at every site."""
    n = tree.node_count
    child_lam = np.bincount(tree.parent[1:], weights=spec.lam[1:], minlength=n)
    return spec.mu + spec.kappa + child_lam


def validate(tree, spec, tol=DEFAULT_TOL):
    """Check positivity and the per-site normalization within ``tol``.

    For a sum violation the reported value is the deficit ``sum - 1``.
    """
    report = ValidationReport()
    if spec.node_count != tree.node_count:
        report.violations.append(Violation(-1, "size", float(spec.node_count)))
        return report
    for arr in (spec.lam, spec.mu):
        for x in np.flatnonzero(~(arr[1:] > 0.0)) + 1:
            report.violations.append(Violation(int(x), "positivity", float(arr[x])))
    for x in np.flatnonzero(spec.kappa < 0.0):
        report.violations.append(Violation(int(x), "negative-kappa", float(spec.kappa[x])))
    deficit = site_sums(tree, spec) - 1.0
    for x in np.flatnonzero(~(np.abs(deficit) <= tol)):
        report.violations.append(Violation(int(x), "sum", float(deficit[x])))
    return report


@dataclass(frozen=True, eq=False)
class StationaryMeasure:
    """Reversible invariant measure with branch aggregates.

    ``branch_ratio`` (pi(B_x)/pi(x)) comes from a normalization-free
    recursion and stays valid when ``pi`` underflows; ``branch_mass`` is a
    plain leaf-to-root sum of ``pi`` and may lose precision in that case,
    which ``underflow`` reports.
    """

    log_weight: np.ndarray
    log_pi: np.ndarray
    pi: np.ndarray
    pi0: float
    branch_mass: np.ndarray
    branch_ratio: np.ndarray
    underflow: bool
    # sum_{b in B_x} (pi(b)/pi(x)) rho(b)^2 / mu_b, reused by the hitting-time
    # formulas and the drift constants
    second_sum: np.ndarray = field(repr=False)

    @property
    def log_branch_mass(self):
        return self.log_pi + np.log(self.branch_ratio)


def stationary(tree, spec):
    logw, rho, g, _ = kernels.chain_pass(tree.parent, spec.lam, spec.mu)
    log_pi = logw - logsumexp(logw)
    pi = np.exp(log_pi)
    branch_mass = kernels.subtree_sum(tree.parent, pi)
    underflow = bool(np.any(branch_mass < np.finfo(float).tiny))
    for arr in (logw, log_pi, pi, branch_mass, rho, g):
        arr.setflags(write=False)
    return StationaryMeasure(
        log_weight=logw,
        log_pi=log_pi,
        pi=pi,
        pi0=float(pi[0]),
        branch_mass=branch_mass,
        branch_ratio=rho,
        underflow=underflow,
        second_sum=g,
    )
