import os
import sys

# make reference.py importable from every test module
sys.path.insert(0, os.path.dirname(__file__))

# verdict lines recorded by the acceptance tests; replayed after the
# run so they stay visible even when pytest captures test output
_verdicts = []


def record_verdict(line: str) -> None:
    _verdicts.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance verdicts")
        for line in _verdicts:
            terminalreporter.write_line(line)
