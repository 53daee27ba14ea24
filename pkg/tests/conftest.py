import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("RADGAPS_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set RADGAPS_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else "")
        VERDICTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)
