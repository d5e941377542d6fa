import sys

import pytest

from nscartan import make_context


@pytest.fixture(scope="session")
def ctx11():
    return make_context(11)


@pytest.fixture(scope="session")
def ctx13():
    return make_context(13)


@pytest.fixture(scope="session")
def ctx5():
    return make_context(5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
