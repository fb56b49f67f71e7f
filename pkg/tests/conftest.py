"""Suite-wide helpers: one PASS/FAIL line per acceptance criterion."""

import pytest

_acceptance_results: dict[str, tuple[str, str]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    skipped = (call.excinfo is not None
               and call.excinfo.errisinstance(pytest.skip.Exception))
    if call.when == "setup" and not skipped:
        return
    if call.when == "teardown":
        return
    criterion = marker.kwargs.get("criterion", marker.args[0] if marker.args else "?")
    title = marker.kwargs.get("title", item.name)
    if skipped:
        outcome = "GATED (skipped)"
    elif call.excinfo is None:
        outcome = "PASS"
    else:
        outcome = "FAIL"
    key = f"{criterion}:{item.nodeid}"
    _acceptance_results[key] = (f"criterion {criterion}: {title}", outcome)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(criterion, title): acceptance-gate criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance_results, key=lambda k: _acceptance_results[k][0]):
        label, outcome = _acceptance_results[key]
        terminalreporter.write_line(f"{outcome:>6}  {label}")
