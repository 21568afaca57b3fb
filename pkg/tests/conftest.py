import re

TITLES = {
    1: "answers agree with exhaustive enumeration",
    2: "TW-BFS on BlowUp: no mistakes, linear visits",
    3: "BFS on BlowUp: exponential separation",
    4: "racing automaton mistakes",
    5: "zone algebra properties",
    6: "final passed set: antichain and coverage",
    7: "rank invariants",
    8: "accounting identity",
    9: "Fischer sanity",
}

_CRITERION = re.compile(r"::test_criterion_(\d+)_")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.failed:
        _outcomes[k] = False
    elif report.when == "call" and report.passed:
        _outcomes.setdefault(k, True)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        verdict = "PASS" if _outcomes[k] else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict}  {TITLES.get(k, '')}")
