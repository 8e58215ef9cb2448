import pytest

from gpexcursions import AcfModel

# Lines appended by the acceptance tests; echoed in the terminal summary so a
# plain ``pytest -v`` run shows one verdict per criterion.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    """Record ``(number, passed, text)`` as a one-line verdict and echo it."""

    def log(number, passed, text):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return log


@pytest.fixture
def sqexp2():
    return AcfModel.squared_exponential(2.0)
