import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid] = (report.outcome, report.duration)
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _acceptance[report.nodeid] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    # one line per criterion; parametrized cases fold into their criterion
    rows = {}
    for nodeid, (outcome, dur) in _acceptance.items():
        m = re.search(r"test_acceptance_(\d+)_(\w+?)(\[|$)", nodeid)
        if not m:
            continue
        key = (int(m.group(1)), m.group(2))
        ok, total, count = rows.get(key, (True, 0.0, 0))
        rows[key] = (ok and outcome == "passed", total + dur, count + 1)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), (ok, dur, count) in sorted(rows.items()):
        cases = f", {count} cases" if count > 1 else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{num}] {name.replace('_', ' ')}  ({dur:.2f} s{cases})")


@pytest.fixture
def tmpfile(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make
