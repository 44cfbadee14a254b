import re
from collections import OrderedDict

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_outcomes = OrderedDict()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        key = int(m.group(1))
        entry = _outcomes.setdefault(key, {"passed": True, "names": set()})
        entry["names"].add(m.group(2).split("[")[0])
        entry["passed"] &= report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_outcomes):
        entry = _outcomes[key]
        status = "PASS" if entry["passed"] else "FAIL"
        names = ", ".join(sorted(entry["names"]))
        terminalreporter.write_line(f"criterion {key:2d}: {status}  ({names})")
