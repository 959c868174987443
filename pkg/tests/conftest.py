from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    """Print one line per acceptance criterion that ran in this session."""
    module = sys.modules.get("test_acceptance")
    reports = getattr(module, "REPORTS", None)
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(reports):
        terminalreporter.write_line(reports[number].line())
