import pytest

from critnode import kernels


@pytest.fixture(params=sorted(kernels.available()))
def impl(request):
    """Each importable kernel implementation in turn."""
    return kernels.get(request.param)


# -- acceptance report -------------------------------------------------------------
# tests marked ``@pytest.mark.criterion(number, title)`` get one summary line each

_criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = dict(item.user_properties).get("detail", "")
        _criteria.append((mark.args[0], mark.args[1], rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_criteria):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {number:>2} {verdict}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
