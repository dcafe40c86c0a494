import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPT = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    n = int(m.group(1))
    ok = _ACCEPT.get(n, True)
    _ACCEPT[n] = ok and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPT:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPT):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _ACCEPT[n] else 'FAIL'}")
