"""Acceptance criteria, one test each.

Every check records a one-line PASS/FAIL summary, printed at the end of the
pytest run (and by ``python tests/test_acceptance.py``).
"""
import math
import os
import subprocess
import sys
import time

import numpy as np

from treehit.chain import make_spec, stationary
from treehit.drift import drift_report
from treehit.hitting import HittingTimes
from treehit.oracle import solve_hitting
from treehit.regular import RegularSpec, closed_forms, deepest_node, generate
from treehit.sim import (SimConfig, TransitionTable, ks_critical, simulate_final_excursion,
                         simulate_hitting, simulate_return)
from treehit.tree import build_tree
from treehit.verify import random_corpus

SUMMARY = []
CORPUS_SEED = 2024


def record(number, title, ok, detail):
    SUMMARY.append(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    return ok


def rel(x, y):
    return abs(x - y) / max(abs(x), abs(y)) if x != y else 0.0


def corpus():
    return list(random_corpus(200, CORPUS_SEED, max_nodes=50))


# 1 -------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    pairs = 0
    for tree, spec, a in corpus():
        ht = HittingTimes(tree, spec)
        nodes = ht.path(a)
        for n, target in enumerate(nodes):
            sol = solve_hitting(tree, spec, target)
            for j, src in enumerate(nodes):
                if j == n:
                    continue
                rep = ht.hitting(j, n, a)
                worst = max(worst, rel(rep.mean, float(sol.mean[src])),
                            rel(rep.second, float(sol.second[src])))
                pairs += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10
    return record(1, "oracle equivalence", ok,
                  f"{pairs} pairs, worst rel err {worst:.2e} (tol 1e-9), {elapsed:.2f}s (< 10s)")


# 2 -------------------------------------------------------------------------

def criterion_2():
    worst = 0.0
    for tree, spec, a in corpus():
        ht = HittingTimes(tree, spec)
        d = len(ht.path(a)) - 1
        for j in range(d + 1):
            for n in range(j + 1, d + 1):
                lhs = ht.mean_hitting(j, n, a).mean + ht.mean_hitting(n, j, a).mean
                worst = max(worst, rel(lhs, math.exp(ht.sum_identity_rhs(j, n, a))))
    return record(2, "sum identity", worst <= 1e-10, f"worst rel err {worst:.2e} (tol 1e-10)")


# 3 -------------------------------------------------------------------------

def _pipeline(r, bias, d):
    rs = RegularSpec(r, bias, d)
    tree, spec = generate(rs)
    return drift_report(tree, spec, a=deepest_node(rs))


def criterion_3():
    a = _pipeline(2, 4.0, 3)
    b = _pipeline(2, 2.0, 4)
    ks = [_pipeline(2, 4.0, d).K_a for d in range(4, 17)]
    limit = 4.0 / (4.0 - 2.0)
    monotone = all(y > x for x, y in zip(ks, ks[1:])) and all(k < limit for k in ks)
    gaps = [limit - k for k in ks]
    shrinking = all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    ok = (rel(a.K_a, 1.75) <= 1e-10 and rel(a.mean_to_root, 6.375) <= 1e-10
          and rel(b.K_a, 4.0) <= 1e-10 and rel(b.mean_to_root, 20.0) <= 1e-10
          and monotone and shrinking)
    return record(3, "regular-tree closed forms", ok,
                  f"K_a={a.K_a!r} E={a.mean_to_root!r}; critical K_a={b.K_a!r} "
                  f"E={b.mean_to_root!r}; K_a(4..16) increasing to 2, gap {gaps[-1]:.1e}")


# 4 -------------------------------------------------------------------------

def criterion_4():
    eps = 1e-12
    violations = {"R<=Q": 0, "Q<=K^2/Kmu": 0, "Var<=2QE": 0, "Gamma<=R/E": 0, "E[T^2] bound": 0}
    checked = 0
    for tree, spec, a in corpus():
        ht = HittingTimes(tree, spec)
        dr = drift_report(tree, spec, a=a, hitting=ht)
        e = dr.mean_to_root
        violations["R<=Q"] += dr.R_a > dr.Q_a * (1 + eps)
        violations["Q<=K^2/Kmu"] += dr.Q_a > dr.K_a ** 2 / dr.K_mu * (1 + eps)
        violations["Var<=2QE"] += dr.variance_to_root > 2 * dr.Q_a * e * (1 + eps)
        violations["Gamma<=R/E"] += dr.Gamma_a > dr.R_a / e * (1 + eps)
        d = len(ht.path(a)) - 1
        for j in range(d):
            for n in range(j + 1, d + 1):
                exact = ht.hitting(n, j, a).log_second
                violations["E[T^2] bound"] += exact > ht.log_second_moment_bound(j, n, a, dr) + eps
                checked += 1
    total = sum(violations.values())
    return record(4, "inequality suite", total == 0,
                  f"{total} violations over 200 instances and {checked} bound pairs "
                  + ", ".join(f"{k}:{v}" for k, v in violations.items()))


# 5 -------------------------------------------------------------------------

def criterion_5():
    t0 = time.perf_counter()
    tree = build_tree([(1, 0)])
    spec = make_spec(tree, [0, 0.5], [0, 0.5], [0.5, 0.5])
    s2 = simulate_hitting(tree, spec, SimConfig(12345, 100_000, source=1, target=0))
    z2 = (s2.mean - 2.0) / math.sqrt(2.0 / s2.n)
    tree = build_tree([(1, 0), (2, 1)])
    spec = make_spec(tree, [0, 0.5, 0.5], [0, 0.5, 0.5], [0.5, 0.0, 0.5])
    s3 = simulate_hitting(tree, spec, SimConfig(12345, 100_000, source=2, target=0))
    z3 = (s3.mean - 6.0) / math.sqrt(22.0 / s3.n)
    elapsed = time.perf_counter() - t0
    ok = abs(z2) < 4 and abs(z3) < 4 and s2.truncated == s3.truncated == 0 and elapsed < 5
    return record(5, "Monte Carlo agreement", ok,
                  f"two-node mean {s2.mean:.4f} (z={z2:+.2f}), path mean {s3.mean:.4f} "
                  f"(z={z3:+.2f}), {elapsed:.2f}s (< 5s)")


# 6 -------------------------------------------------------------------------

def criterion_6():
    t0 = time.perf_counter()
    rs = RegularSpec(2, 4.0, 8)
    tree, spec = generate(rs)
    s = simulate_return(tree, spec, 0, SimConfig(777, 200_000))
    exact = 1.0 / stationary(tree, spec).pi0
    asym = closed_forms(rs).E_return_0_asymp
    elapsed = time.perf_counter() - t0
    ok = (rel(s.mean, exact) < 0.05 and abs(s.mean - asym) / asym < 0.10
          and s.truncated == 0 and elapsed < 60)
    return record(6, "Kac return time", ok,
                  f"mean {s.mean:.4f} vs 1/pi(0)={exact:.4f} ({100 * rel(s.mean, exact):.2f}%) "
                  f"and lambda/(lambda-r)={asym} ({100 * abs(s.mean - asym) / asym:.2f}%), "
                  f"{elapsed:.2f}s")


# 7 -------------------------------------------------------------------------

def criterion_7():
    spreads = []
    for d in (6, 10, 14):
        rs = RegularSpec(2, 4.0, d)
        tree, spec = generate(rs)
        s = simulate_hitting(tree, spec, SimConfig(4242, 2000, source=deepest_node(rs), target=0))
        spreads.append(s.cutoff_profile[0.8] - s.cutoff_profile[1.2])
    ok = all(b > a for a, b in zip(spreads, spreads[1:]))
    return record(7, "cut-off shape trend", ok,
                  "P(T>0.8E)-P(T>1.2E) at d=6,10,14: " + ", ".join(f"{v:.4f}" for v in spreads))


# 8 -------------------------------------------------------------------------

def criterion_8():
    t0 = time.perf_counter()
    rs = RegularSpec(2, 4.0, 8)
    tree, spec = generate(rs)
    s = simulate_hitting(tree, spec, SimConfig(8888, 2000, source=0, target=deepest_node(rs)))
    crit = ks_critical(s.n)
    elapsed = time.perf_counter() - t0
    ok = s.truncated == 0 and s.ks_exp1 < crit and elapsed < 300
    return record(8, "escape shape", ok,
                  f"KS {s.ks_exp1:.4f} < {crit:.4f} with E[T]={s.exact_mean:.1f}, "
                  f"{elapsed:.1f}s (< 300s)")


# 9 -------------------------------------------------------------------------

def criterion_9():
    rs = RegularSpec(2, 4.0, 6)
    tree, spec = generate(rs)
    fe = simulate_final_excursion(tree, spec, deepest_node(rs), SimConfig(99, 2000))
    ok = fe.truncated_up == fe.truncated_down == 0 and fe.two_sample_ks < fe.critical_value
    return record(9, "time reversal", ok,
                  f"two-sample KS {fe.two_sample_ks:.4f} < {fe.critical_value:.4f} "
                  f"(means {fe.samples_up.mean():.2f} / {fe.samples_down.mean():.2f})")


# 10 ------------------------------------------------------------------------

def _cli(args, threads):
    env = dict(os.environ, TREEHIT_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "treehit.cli", *args],
                          capture_output=True, env=env, check=True).stdout


def criterion_10(tmp_dir):
    from treehit.chainfile import save
    rs = RegularSpec(2, 4.0, 5)
    path = os.path.join(tmp_dir, "regular.chain")
    save(path, *generate(rs))
    leaf = str(deepest_node(rs))
    commands = [
        ["simulate", path, leaf, "0", "--seed", "31", "--replicas", "5000"],
        ["simulate", path, "0", leaf, "--seed", "31", "--replicas", "2000", "--mode", "final"],
        ["simulate", path, "0", "0", "--seed", "31", "--replicas", "5000", "--mode", "return"],
    ]
    ok = True
    for cmd in commands:
        outs = {_cli(cmd, k) for k in (1, 2, 4)} | {_cli(cmd, 1)}
        ok &= len(outs) == 1
    # the in-process engine with explicit thread counts as well
    tree, spec = generate(rs)
    table = TransitionTable(tree, spec)
    cfg = SimConfig(5, 3000, source=int(leaf), target=0)
    runs = [simulate_hitting(tree, spec, cfg, table, threads=k).samples for k in (1, 3, 8)]
    ok &= all(np.array_equal(runs[0], r) for r in runs[1:])
    return record(10, "determinism", ok,
                  f"{len(commands)} CLI reports byte-identical across 1/2/4 threads and reruns; "
                  "engine samples identical across 1/3/8 threads")


def test_criterion_1_oracle_equivalence():
    assert criterion_1(), SUMMARY[-1]


def test_criterion_2_sum_identity():
    assert criterion_2(), SUMMARY[-1]


def test_criterion_3_regular_closed_forms():
    assert criterion_3(), SUMMARY[-1]


def test_criterion_4_inequalities():
    assert criterion_4(), SUMMARY[-1]


def test_criterion_5_monte_carlo_means():
    assert criterion_5(), SUMMARY[-1]


def test_criterion_6_kac_return_time():
    assert criterion_6(), SUMMARY[-1]


def test_criterion_7_cutoff_shape():
    assert criterion_7(), SUMMARY[-1]


def test_criterion_8_escape_shape():
    assert criterion_8(), SUMMARY[-1]


def test_criterion_9_time_reversal():
    assert criterion_9(), SUMMARY[-1]


def test_criterion_10_determinism(tmp_path):
    assert criterion_10(str(tmp_path)), SUMMARY[-1]


if __name__ == "__main__":
    import tempfile
    checks = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
              criterion_7, criterion_8, criterion_9]
    results = [c() for c in checks]
    with tempfile.TemporaryDirectory() as tmp:
        results.append(criterion_10(tmp))
    print("\n".join(SUMMARY))
    sys.exit(0 if all(results) else 1)
