"""Collects the outcome of each acceptance criterion and prints one line per criterion."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, text = mark.args
    ok, detail = _RESULTS.get(n, (text, True, ""))[1:]
    if not rep.passed:
        ok = False
        crash = getattr(rep.longrepr, "reprcrash", None)
        detail = detail or (crash.message.splitlines()[0][:160] if crash else "failed")
    _RESULTS[n] = (text, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        text, ok, detail = _RESULTS[n]
        line = "criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", text)
        if detail:
            line += "  (%s)" % detail
        terminalreporter.write_line(line)
