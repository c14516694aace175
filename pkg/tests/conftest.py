import numpy as np
import pytest
from hypothesis import strategies as st

from virtimu.rotation import quat_normalize


def rodrigues(axis, angle):
    """Independent rotation-matrix oracle: R = I + sin(a) K + (1 - cos(a)) K^2."""
    axis = np.asarray(axis, float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * k @ k


def random_quats(rng, n):
    return quat_normalize(rng.normal(size=(n, 4)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


quaternions = (
    st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4)
    .filter(lambda v: np.linalg.norm(v) > 1e-3)
    .map(lambda v: quat_normalize(np.array(v)))
)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, "text")``."""

    def record(ok, text):
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {text}")
        assert ok, text

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
