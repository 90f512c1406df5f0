import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "copla",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "copla"))


# One verdict line per acceptance criterion in the terminal summary, so a
# plain pytest run shows the gate at a glance.
_acceptance: dict[str, list] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.nodeid.rpartition("/")[2].startswith("test_acceptance.py::"):
            title = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _acceptance[item.nodeid] = [title, "NOT RUN"]


def pytest_runtest_logreport(report):
    entry = _acceptance.get(report.nodeid)
    if entry is None:
        return
    if report.when == "call":
        entry[1] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.skipped:
        entry[1] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for title, verdict in _acceptance.values():
        terminalreporter.write_line(f"{verdict:7s} {title}")


@pytest.fixture
def store_root(tmp_path):
    return str(tmp_path / "store")


@pytest.fixture
def db(store_root):
    from copla.execdb import ExecDB
    from copla.store import DocumentStore

    return ExecDB(DocumentStore(store_root))
