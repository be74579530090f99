import pytest

from mubforge.jsonio import load_fixture
from mubforge.states import build_basis

CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def d9():
    return load_fixture("d9")


@pytest.fixture(scope="session")
def d4():
    return load_fixture("d4")


@pytest.fixture(scope="session")
def d9_bases(d9):
    return {name: build_basis(c) for name, c in d9.classes.items()}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(tag, text): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    tag, text = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        status = "PASS" if rep.passed else "FAIL"
        prev = CRITERIA.get(tag)
        if prev is None or prev[0] == "PASS":
            CRITERIA[tag] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(CRITERIA, key=lambda t: int(t[2:])):
        status, text = CRITERIA[tag]
        terminalreporter.write_line(f"{status} {tag}: {text}")
