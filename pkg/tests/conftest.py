import sys

import numpy as np
import pytest

from treehit.chain import make_spec
from treehit.tree import build_tree


def two_node():
    tree = build_tree([(1, 0)])
    return tree, make_spec(tree, [0, 0.5], [0, 0.5], [0.5, 0.5])


def path3():
    tree = build_tree([(1, 0), (2, 1)])
    return tree, make_spec(tree, [0, 0.5, 0.5], [0, 0.5, 0.5], [0.5, 0.0, 0.5])


@pytest.fixture
def two_node_chain():
    return two_node()


@pytest.fixture
def path_chain():
    return path3()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in mod.SUMMARY:
            terminalreporter.write_line(line)
