import io
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from densepeel.graph import load_edge_list  # noqa: E402

K4_PENDANT = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n4 5\n"


def parse(text, **opts):
    return load_edge_list(io.StringIO(text), **opts)


@pytest.fixture
def k4p():
    return parse(K4_PENDANT)


@pytest.fixture
def weighted_path():
    # a-b-c with c_ab = 1, c_bc = 3
    return parse("1 2 1\n2 3 3\n", weighted=True)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
