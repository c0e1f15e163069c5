import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treehit.drift import drift_report, family_verdict, l_set
from treehit.hitting import HittingTimes
from treehit.randomize import random_chain
from treehit.regular import RegularSpec, deepest_node, generate
from treehit.tree import TreeError, alpha

from conftest import two_node


def regular_family(r, bias, depths):
    out = []
    for d in depths:
        rs = RegularSpec(r, bias, d)
        out.append((*generate(rs), deepest_node(rs)))
    return out


def test_two_node_constants():
    tree, spec = two_node()
    dr = drift_report(tree, spec, a=1)
    assert dr.K_a == 1.0 and dr.K_mu == 0.5 and dr.Kp_a == 1.0 and dr.Kp_mu == 0.5
    assert dr.R_a == pytest.approx(1.0)
    # G(1)/rho(1) with G(1) = rho(1)^2 / mu_1 = 2
    assert dr.Q_a == pytest.approx(2.0)
    assert dr.Gamma_a == pytest.approx(0.5)
    assert dr.cutoff_ratio == pytest.approx(0.5)
    assert dr.escape_ratios == pytest.approx((1.0, 0.5))
    with pytest.raises(TreeError):
        drift_report(tree, spec, a=0)


def test_regular_values():
    tree, spec = generate(RegularSpec(2, 4.0, 3))
    assert drift_report(tree, spec, a=14).K_a == pytest.approx(1.75, rel=1e-12)
    tree, spec = generate(RegularSpec(2, 2.0, 4))
    dr = drift_report(tree, spec, a=30)
    assert dr.K_a == pytest.approx(4.0, rel=1e-12)
    assert dr.mean_to_root == pytest.approx(20.0, rel=1e-12)
    assert dr.cutoff_ratio == pytest.approx(16 / 20, rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=80, deadline=None)
def test_inequalities(seed):
    rng = np.random.default_rng(seed)
    tree, spec = random_chain(rng, max_nodes=40)
    a = int(rng.integers(1, tree.node_count))
    dr = drift_report(tree, spec, a=a)
    eps = 1e-12
    assert dr.R_a <= dr.Q_a * (1 + eps)
    assert dr.Q_a <= dr.K_a ** 2 / dr.K_mu * (1 + eps)
    assert dr.Gamma_a <= dr.R_a / dr.mean_to_root * (1 + eps)
    assert dr.var_ratio <= dr.var_ratio_bound * (1 + eps)
    assert dr.K_a <= dr.Kp_a * (1 + eps) and dr.K_mu >= dr.Kp_mu
    assert dr.K_a == pytest.approx(dr.K_a_pi, rel=1e-12)


def test_l_set_regular():
    rs = RegularSpec(2, 4.0, 5)
    tree, spec = generate(rs)
    a = deepest_node(rs)
    got = l_set(tree, spec, a=a, C=1.0)
    branch = set(tree.branch(alpha(tree, a)).tolist())
    deepest = {x for x in tree.nodes_at_depth(5).tolist() if x in branch}
    assert set(got.tolist()) == deepest
    assert alpha(tree, a) not in got
    assert l_set(tree, spec, a=a, C=1e9).size == 0
    # small C takes in the whole branch
    assert set(l_set(tree, spec, a=a, C=1e-9).tolist()) == branch
    with pytest.raises(ValueError):
        l_set(tree, spec, a=a, C=0)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 1.0))
@settings(max_examples=40, deadline=None)
def test_l_set_contains_a(seed, c):
    rng = np.random.default_rng(seed)
    tree, spec = random_chain(rng, max_nodes=30)
    a = int(rng.integers(1, tree.node_count))
    ht = HittingTimes(tree, spec)
    got = l_set(tree, spec, a=a, C=c, hitting=ht)
    assert a in got
    to_root = ht.mean_to_root_all()
    assert np.all(to_root[got] >= c * to_root[a] * (1 - 1e-12))


def test_verdicts():
    depths = (4, 8, 12, 16)
    v = family_verdict(regular_family(2, 4.0, depths))
    assert v.verdict == "both"
    assert v.depths == list(depths)
    cut = v.sequence("cutoff_ratio")
    assert all(b < a for a, b in zip(cut, cut[1:])) and cut[-1] < 0.1
    assert family_verdict(regular_family(2, 2.0, depths)).verdict == "inconclusive"
    low = family_verdict(regular_family(2, 1.0, depths))
    assert low.verdict == "inconclusive"
    assert not low.drift_holds


def test_verdict_with_bounds_and_threshold():
    fam = regular_family(2, 4.0, (4, 8, 12, 16))
    assert family_verdict(fam, K=1.0, Kp=0.4, Kp_mu=0.5).verdict == "both"
    # a too small K' breaks the growth bounds but not the drift trend
    assert family_verdict(fam, Kp=0.2).verdict == "cutoff-supported"
    assert family_verdict(fam, threshold=0.05).verdict == "escape-supported"


def test_verdict_preconditions():
    fam = regular_family(2, 4.0, (4, 8, 12))
    with pytest.raises(ValueError):
        family_verdict(fam[:2])
    with pytest.raises(ValueError):
        family_verdict([fam[1], fam[0], fam[2]])
