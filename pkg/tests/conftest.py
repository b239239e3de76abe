import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from opp.formats import builtin_method, embedded_framework  # noqa: E402


@pytest.fixture(scope="session")
def framework():
    return embedded_framework()


@pytest.fixture(scope="session")
def xp():
    return builtin_method("xp")


@pytest.fixture(scope="session")
def fdd():
    return builtin_method("fdd")


@pytest.fixture(scope="session")
def method_a():
    return builtin_method("method-a")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split("[")[1].split("]")[0])):
        terminalreporter.write_line(line)
