import pytest

from twoway_parikh.constructions import build_mismatch, build_multiplication, build_section_example, build_sweep
from twoway_parikh.randomgen import corpus

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def sweep():
    return build_sweep()


@pytest.fixture(scope="session")
def mult():
    return build_multiplication()


@pytest.fixture(scope="session")
def mismatch1():
    return build_mismatch(1)


@pytest.fixture(scope="session")
def zigzag():
    return build_section_example()


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(11, 40, k=3)


@pytest.fixture(scope="session")
def det_corpus():
    return corpus(12, 40, deterministic=True)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
