from pathlib import Path

import pytest

from condorcet_domains.constructions import fishburn_domain
from condorcet_domains.formats import read_domain
from condorcet_domains.orders import Domain

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record_domains():
    """Maximum-size domains for n = 1..6 (Fishburn's scheme is optimal there)."""
    out = {1: Domain.full(1), 2: Domain.full(2)}
    out.update({n: fishburn_domain(n) for n in range(3, 7)})
    return out


DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def d8():
    return read_domain(DATA / "n8_224.txt")


@pytest.fixture(scope="session")
def d9_pair():
    return [read_domain(DATA / f"n9_492_{c}.txt") for c in "ab"]
