import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_force_choi(channel, n):
    """``sum_{kl} |k><l| (x) channel(|k><l|)`` by direct evaluation on matrix units."""
    c = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[k, l] = 1
            c += np.kron(unit, channel(unit))
    return c


@pytest.fixture
def oracle_choi():
    return brute_force_choi


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
