import math

import numpy as np
import pytest

from lwtransform.quadrature import GridFunction, smooth_bump

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def bump2():
    """Smooth bump on [1/2, 2] sampled on 64 log-uniform nodes."""
    return GridFunction.from_callable(2, [(0.5, 2.0)], (64,), lambda y: smooth_bump(np.log(y)))


@pytest.fixture
def log2():
    return math.log(2.0)
