import random

import pytest

from sylperm.hadamard import SignMatrix

ACCEPTANCE_LINES: list[str] = []


def random_pm_matrix(rng: random.Random, n: int) -> SignMatrix:
    return SignMatrix.from_rows([[rng.choice((-1, 1)) for _ in range(n)] for _ in range(n)])


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
