import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treehit.chain import make_spec, site_sums, stationary, validate
from treehit.randomize import random_chain
from treehit.regular import RegularSpec, generate, level_chain
from treehit.tree import build_tree

from conftest import path3, two_node


def test_two_node_valid_and_uniform():
    tree, spec = two_node()
    assert validate(tree, spec).ok
    m = stationary(tree, spec)
    assert np.allclose(m.pi, [0.5, 0.5])
    assert m.branch_ratio[1] == 1.0
    assert not m.underflow


def test_sum_violation_reported():
    # lam_1 belongs to the root's row, so each site is short by 0.4
    tree = build_tree([(1, 0)])
    spec = make_spec(tree, [0, 0.6], [0, 0.6], [0.0, 0.0])
    report = validate(tree, spec)
    assert not report.ok
    assert [(v.site, v.kind) for v in report.violations] == [(0, "sum"), (1, "sum")]
    assert [v.value for v in report.violations] == pytest.approx([-0.4, -0.4])


def test_positivity_and_negative_loop():
    tree = build_tree([(1, 0), (2, 0)])
    spec = make_spec(tree, [0, 0.5, 0.5], [0, 0.0, 1.2], [0.0, 1.0, -0.2])
    kinds = {(v.site, v.kind) for v in validate(tree, spec).violations}
    assert (1, "positivity") in kinds
    assert (2, "negative-kappa") in kinds


def test_tolerance_is_adjustable():
    tree = build_tree([(1, 0)])
    spec = make_spec(tree, [0, 0.5], [0, 0.5], [0.5, 0.5 + 1e-8])
    assert not validate(tree, spec).ok
    assert validate(tree, spec, tol=1e-7).ok


def test_dict_input_and_default_kappa():
    tree = build_tree([(1, 0)])
    spec = make_spec(tree, {1: 1.0}, {1: 1.0})
    assert spec.kappa.tolist() == [0.0, 0.0]
    assert validate(tree, spec).ok


def test_path_measure():
    tree, spec = path3()
    m = stationary(tree, spec)
    assert np.allclose(m.pi, 1 / 3, rtol=1e-14)
    assert m.branch_ratio.tolist() == [3.0, 2.0, 1.0]


@pytest.mark.parametrize("r,bias,depth", [(1, 2.0, 5), (2, 4.0, 3), (2, 2.0, 4), (3, 1.5, 3)])
def test_regular_measure(r, bias, depth):
    tree, spec = generate(RegularSpec(r, bias, depth))
    assert validate(tree, spec).ok
    m = stationary(tree, spec)
    assert np.allclose(m.pi, m.pi0 / bias ** tree.depth, rtol=1e-12, atol=0)
    q = r / bias
    expect = [sum(q ** k for k in range(depth - int(d) + 1)) for d in tree.depth]
    assert np.allclose(m.branch_ratio, expect, rtol=1e-12)


def test_underflow_keeps_ratios():
    # pi at depth 600 is ~ 8^-600, far below double range
    tree, spec = level_chain(RegularSpec(1, 8.0, 600))
    m = stationary(tree, spec)
    assert m.underflow
    assert np.all(np.isfinite(m.log_pi))
    assert m.log_pi[-1] < -1000
    q = 1 / 8
    assert m.branch_ratio[1] == pytest.approx((1 - q ** 600) / (1 - q), rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=80, deadline=None)
def test_measure_properties(seed):
    rng = np.random.default_rng(seed)
    tree, spec = random_chain(rng, max_nodes=40)
    assert validate(tree, spec).ok
    assert np.allclose(site_sums(tree, spec), 1.0, atol=1e-12)
    m = stationary(tree, spec)
    assert abs(m.pi.sum() - 1) < 1e-10
    assert m.branch_mass[0] == pytest.approx(1.0, abs=1e-10)
    x = np.arange(1, tree.node_count)
    lhs = m.pi[tree.parent[x]] * spec.lam[x]
    rhs = m.pi[x] * spec.mu[x]
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)
    assert np.allclose(m.branch_ratio, m.branch_mass / m.pi, rtol=1e-10)
    for y in range(tree.node_count):
        kids = tree.children(y)
        want = 1 + sum(spec.lam[c] / spec.mu[c] * m.branch_ratio[c] for c in kids)
        assert m.branch_ratio[y] == pytest.approx(want, rel=1e-12)
