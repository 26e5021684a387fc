import numpy as np
import pytest

from sdlab.algebra import build_algebra

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[[1], [2], [3], [1, 1], [2, 3], [1, 2, 2]], ids=lambda b: "blocks" + "-".join(map(str, b)))
def alg(request):
    return build_algebra(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
