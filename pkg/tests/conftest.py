import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, text = marker.args
    entry = _results.setdefault(number, {"text": text, "outcomes": []})
    if report.when == "call" or report.outcome != "passed":
        entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        outs = entry["outcomes"]
        if outs and all(o == "skipped" for o in outs):
            status = "SKIP"
        elif outs and all(o in ("passed", "skipped") for o in outs) and "passed" in outs:
            status = "PASS" if "skipped" not in outs else "PASS (partly skipped)"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status:5s} {entry['text']}")
