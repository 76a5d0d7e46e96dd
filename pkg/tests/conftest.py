import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
    for key, rows in mod.TREND_TABLES.items():
        terminalreporter.write_line(f"trend table {key}: delta, l4 grad u, l8 grad u, l4 grad v, l8 grad v")
        for r in rows:
            terminalreporter.write_line("  " + ", ".join(f"{x:.6g}" for x in r))
