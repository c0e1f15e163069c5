"""Monte Carlo hitting, return and final-excursion times.

Replica ``i`` draws from its own xoshiro256** stream seeded from
``(seed, i)``, and results are stored by replica index, so every summary
is identical for any number of worker threads.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chain import stationary
from .hitting import HittingTimes
from .oracle import DEFAULT_CAP, solve_hitting

CUTOFF_LEVELS = (0.5, 0.8, 0.9, 1.1, 1.2, 2.0)
# asymptotic Kolmogorov-Smirnov critical constants c(alpha)
KS_CRITICAL = {0.10: 1.22, 0.05: 1.36, 0.01: 1.63}
DEFAULT_MAX_STEPS = 100_000_000
MEAN_STEP_FACTOR = 1000
SAMPLE_CAP = 10_000
CHUNK = 256


@dataclass(frozen=True)
class SimConfig:
    seed: int
    replicas: int
    max_steps: int = None  # None: MEAN_STEP_FACTOR x exact mean, else DEFAULT_MAX_STEPS
    source: int = None
    target: int = None

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class EmpiricalSummary:
    n: int
    truncated: int
    mean: float
    variance: float
    exact_mean: float
    normalized_samples: np.ndarray = field(repr=False)
    cutoff_profile: dict = field(default_factory=dict)
    ks_exp1: float = math.nan
    samples: np.ndarray = field(default=None, repr=False)

    @property
    def unusable(self):
        return self.truncated == self.n

    @property
    def standard_error(self):
        kept = self.n - self.truncated
        return math.sqrt(self.variance / kept) if kept > 1 else math.inf


class TransitionTable:
    """Flattened cumulative step distributions, one segment per node.

    Segment ``x`` lists ``[p(x), x, children...]`` with cumulative
    probabilities ``[mu_x, mu_x + kappa_x, ...]``; zero-probability moves
    are dropped and the last entry of a segment catches rounding.
    """

    def __init__(self, tree, spec):
        offsets = [0]
        cum, dest = [], []
        for x in range(tree.node_count):
            moves = []
            if x:
                moves.append((spec.mu[x], int(tree.parent[x])))
            moves.append((spec.kappa[x], x))
            moves.extend((spec.lam[c], int(c)) for c in tree.children(x))
            moves = [m for m in moves if m[0] > 0.0]
            acc = np.cumsum([p for p, _ in moves])
            cum.extend(acc.tolist())
            dest.extend(d for _, d in moves)
            offsets.append(len(dest))
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.cum = np.asarray(cum, dtype=np.float64)
        self.dest = np.asarray(dest, dtype=np.int64)


def thread_count():
    env = os.environ.get("TREEHIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_walks(table, source, target, seed, replicas, max_steps, mode=0,
              first_index=0, threads=None):
    """Step counts for replicas ``first_index .. first_index + replicas - 1``.

    Truncated replicas are returned as -1.
    """
    threads = thread_count() if threads is None else threads
    stop = first_index + replicas
    out = np.zeros(stop, dtype=np.int64)
    args = (table.offsets, table.cum, table.dest, int(source), int(target),
            int(seed), )
    chunks = [(lo, min(lo + CHUNK, stop)) for lo in range(first_index, stop, CHUNK)]

    def job(bounds):
        kernels.walk(*args, bounds[0], bounds[1], int(max_steps), int(mode), out)

    if threads == 1 or len(chunks) == 1:
        for c in chunks:
            job(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(job, chunks))
    return out[first_index:]


# --- statistics -------------------------------------------------------------

def ks_exp1(x):
    """One-sample KS distance between ``x`` and the Exp(1) CDF."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    if n == 0:
        return math.nan
    cdf = -np.expm1(-x)
    i = np.arange(1, n + 1)
    return float(max((i / n - cdf).max(), (cdf - (i - 1) / n).max()))


def ks_two_sample(x, y):
    """Two-sample KS distance sup |F_x - F_y| (ties handled exactly)."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    grid = np.concatenate((x, y))
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    return float(np.abs(fx - fy).max())


def ks_critical(n, m=None, alpha=0.01):
    c = KS_CRITICAL[alpha]
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def summarize(samples, exact_mean=None, seed=0, cap=SAMPLE_CAP):
    """Aggregate step counts (-1 marks truncation).

    Normalization uses ``exact_mean`` when given, otherwise the empirical
    mean.  Beyond ``cap`` samples a seeded uniform subsample is kept.
    """
    samples = np.asarray(samples, dtype=np.int64)
    kept = samples[samples >= 0].astype(float)
    n, trunc = samples.size, int(samples.size - kept.size)
    if kept.size == 0:
        return EmpiricalSummary(n, trunc, math.nan, math.nan,
                                math.nan if exact_mean is None else exact_mean,
                                np.empty(0), {c: math.nan for c in CUTOFF_LEVELS},
                                math.nan, samples)
    mean = math.fsum(kept) / kept.size
    var = math.fsum((kept - mean) ** 2) / (kept.size - 1) if kept.size > 1 else 0.0
    scale = exact_mean if exact_mean is not None else mean
    norm = kept / scale
    # truncated replicas exceed every level
    profile = {c: float((np.count_nonzero(norm > c) + trunc) / n) for c in CUTOFF_LEVELS}
    retained = norm
    if norm.size > cap:
        pick = np.random.default_rng(seed).choice(norm.size, cap, replace=False)
        retained = norm[np.sort(pick)]
    return EmpiricalSummary(n, trunc, mean, var,
                            scale if exact_mean is not None else math.nan,
                            retained, profile, ks_exp1(norm), samples)


# --- exact references -------------------------------------------------------

def exact_mean(tree, spec, source, target, hitting=None):
    """E[T_{source -> target}] from the closed forms when the two nodes are
    on one root path, else from the linear solver (None above its cap)."""
    if source == target:
        return 0.0
    if tree.is_ancestor(target, source) or tree.is_ancestor(source, target):
        hitting = hitting or HittingTimes(tree, spec)
        low, high = (source, target) if tree.is_ancestor(target, source) else (target, source)
        path = hitting.path(low)
        j = path.index(source)
        n = path.index(target)
        return hitting.mean_hitting(j, n, low).mean
    if tree.node_count > DEFAULT_CAP:
        return None
    return float(solve_hitting(tree, spec, target).mean[source])


def _max_steps(config, mean):
    if config.max_steps is not None:
        return config.max_steps
    if mean is not None and math.isfinite(mean):
        return int(min(max(MEAN_STEP_FACTOR * mean, 1000), 2 ** 62))
    return DEFAULT_MAX_STEPS


def simulate_hitting(tree, spec, config, table=None, threads=None):
    source, target = config.source, config.target
    if source is None or target is None or source == target:
        raise ValueError("simulate_hitting needs distinct source and target")
    mean = exact_mean(tree, spec, source, target)
    table = table or TransitionTable(tree, spec)
    out = run_walks(table, source, target, config.seed, config.replicas,
                    _max_steps(config, mean), 0, threads=threads)
    return summarize(out, mean, config.seed)


def simulate_return(tree, spec, x, config, table=None, threads=None):
    """First return time to ``x``; the exact mean is 1/pi(x)."""
    mean = float(math.exp(-stationary(tree, spec).log_pi[x]))
    table = table or TransitionTable(tree, spec)
    out = run_walks(table, x, x, config.seed, config.replicas,
                    _max_steps(config, mean), 0, threads=threads)
    return summarize(out, mean, config.seed)


@dataclass
class FinalExcursion:
    samples_up: np.ndarray
    samples_down: np.ndarray
    two_sample_ks: float
    truncated_up: int
    truncated_down: int

    def __iter__(self):
        return iter((self.samples_up, self.samples_down, self.two_sample_ks))

    @property
    def critical_value(self):
        return ks_critical(self.samples_up.size, self.samples_down.size)


def simulate_final_excursion(tree, spec, a, config, table=None, threads=None):
    """Last-exit durations 0 -> a and a -> 0.

    The 0 -> a walk uses replica streams ``0..R-1`` and the a -> 0 walk
    ``R..2R-1``.
    """
    table = table or TransitionTable(tree, spec)
    hitting = HittingTimes(tree, spec)
    r = config.replicas
    up_mean = exact_mean(tree, spec, 0, a, hitting)
    down_mean = exact_mean(tree, spec, a, 0, hitting)
    up = run_walks(table, 0, a, config.seed, r, _max_steps(config, up_mean), 1,
                   threads=threads)
    down = run_walks(table, a, 0, config.seed, r, _max_steps(config, down_mean), 1,
                     first_index=r, threads=threads)
    ok_up, ok_down = up[up >= 0], down[down >= 0]
    ks = ks_two_sample(ok_up, ok_down) if ok_up.size and ok_down.size else math.nan
    return FinalExcursion(ok_up, ok_down, ks, int(r - ok_up.size), int(r - ok_down.size))
