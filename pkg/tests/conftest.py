import pytest

import lcplan
from lcplan.loss_tables import load_loss_table

FIXTURE_L = 10e-6


@pytest.fixture(scope="session")
def inductor_table():
    return load_loss_table(lcplan.data_path("inductor_10uH_q.csv").read_text(),
                           reference_inductance=FIXTURE_L)


@pytest.fixture(scope="session")
def devices():
    return lcplan.load_devices(str(lcplan.data_path("prototype_devices.json")))


_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker
    ok = report.passed
    prev = _criteria.get(number)
    _criteria[number] = (title, (prev is None or prev[1]) and ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = (m.args[0], m.kwargs.get("title", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
