import numpy as np
import pytest

from tpctf.filterbank import default_bank

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(ACCEPTANCE_KEY, [])
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for status, name, detail in rows:
        terminalreporter.write_line(f"[{status}] {name}: {detail}")


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(name, passed, detail)``."""
    rows = request.config.stash[ACCEPTANCE_KEY]

    def record(name, passed, detail=""):
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        rows.append((status, name, detail))
        print(f"[{status}] {name}: {detail}")

    return record


@pytest.fixture(scope="session")
def down():
    return default_bank("ctf6down")


@pytest.fixture(scope="session")
def ctf3():
    return default_bank("ctf3")


@pytest.fixture(scope="session")
def ctf6():
    return default_bank("ctf6")


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
