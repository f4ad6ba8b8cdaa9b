import re
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "demos" / "data"

_criteria = {}


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    n = int(m.group(1))
    if report.when == "call" or n not in _criteria:
        detail = ""
        if report.failed:
            detail = str(report.longrepr).strip().splitlines()[-1][:160]
        _criteria[n] = (m.group(2).replace("_", " "), report.outcome, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, outcome, detail, secs = _criteria[n]
        line = f"criterion {n:2d} {outcome.upper():7s} {title} ({secs:.1f} s)"
        terminalreporter.write_line(line + (f"  -- {detail}" if detail else ""))
