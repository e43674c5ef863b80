import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, label, passed, detail)`` for the end-of-run summary."""
    lines = request.config.stash[_LINES]

    def record(criterion, label, passed, detail=""):
        lines.append((criterion, label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    by_crit = {}
    for crit, label, ok, detail in lines:
        by_crit.setdefault(crit, []).append((label, ok, detail))
    for crit in sorted(by_crit):
        checks = by_crit[crit]
        failed = [c for c in checks if not c[1]]
        status = "PASS" if not failed else "FAIL"
        terminalreporter.write_line(f"AC{crit} {status}  ({len(checks) - len(failed)}/{len(checks)} checks)")
        for label, ok, detail in checks:
            if not ok:
                terminalreporter.write_line(f"    failed: {label} {detail}")
