import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if report.when == "call" or report.failed:
        crash = getattr(report.longrepr, "reprcrash", None)
        detail = crash.message if report.failed and crash is not None else ""
        _results[number] = (title, report.passed, report.duration, detail)

def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        title, ok, duration, detail = _results[number]
        line = f"C{number:<2} {'PASS' if ok else 'FAIL'}  {title}  ({duration:.2f} s)"
        if not ok and detail:
            line += f"\n      {detail.splitlines()[0][:160]}"
        tr.write_line(line)
