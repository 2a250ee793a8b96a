import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "regression"))

TITLES = {
    1: "4-SAT counterexample reproduction",
    2: "k-COL to k-SAT on connected graphs up to 5 vertices",
    3: "1-in-3 to 3-SAT, both encodings",
    4: "SAT to MAX-SAT* path encoding",
    5: "perfect bisection to counting CSP at n=10",
    6: "composition with identities",
    7: "oracle equivalences",
    8: "CLI determinism",
}

_outcomes: dict[int, list[tuple[str, bool]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[marker.args[0]].append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(TITLES):
        results = _outcomes.get(n)
        if not results:
            continue
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {n} ({TITLES[n]}): {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f"  [failing: {', '.join(failed)}]"
        terminalreporter.write_line(line)
