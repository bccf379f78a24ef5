import re

CRITERIA = {
    1: "creation-operator algebra",
    2: "BLH reconstruction and uniqueness",
    3: "commutant representation",
    4: "polyball classification",
    5: "constrained quotients",
    6: "Drury-Arveson multiplier",
    7: "dimension-gap example",
    8: "purity diagnostics",
    9: "CLI determinism",
}


def pytest_terminal_summary(terminalreporter):
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            m = re.search(r"test_criterion_(\d+)_", nodeid)
            if not m:
                continue
            num = int(m.group(1))
            ok = key == "passed"
            outcomes[num] = outcomes.get(num, True) and ok
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        if num not in outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if outcomes[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num} ({CRITERIA[num]}): {status}")
