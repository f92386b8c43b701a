import numpy as np
import pytest

from matquad.moments import MomentSequence

ACCEPTANCE_LINES: dict[int, str] = {}

SEC7 = [
    [[4, 0, 0, 0], [0, 7, 3, 3], [0, 3, 4, 3], [0, 3, 3, 3]],
    [[0, 0, 0, 0], [0, -1, -1, -1], [0, -1, 0, -1], [0, -1, -1, -1]],
    [[2, 0, 0, 0], [0, 3, 1, 1], [0, 1, 2, 1], [0, 1, 1, 1]],
    [[0, 0, 0, 0], [0, -1, -1, -1], [0, -1, 0, -1], [0, -1, -1, -1]],
    [[2, 0, 0, 0], [0, 3, 1, 1], [0, 1, 2, 1], [0, 1, 1, 1]],
]


@pytest.fixture
def worked():
    """The 4x4, n = 2 example sequence with prescribed atom t = 1."""
    return MomentSequence.from_matrices(SEC7)


@pytest.fixture
def worked_float():
    return MomentSequence.from_matrices(SEC7, exact=False)


def block_diag(*blocks):
    size = sum(len(b) for b in blocks)
    out = np.zeros((size, size), dtype=object)
    k = 0
    for b in blocks:
        b = np.asarray(b, dtype=object)
        out[k : k + len(b), k : k + len(b)] = b
        k += len(b)
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
