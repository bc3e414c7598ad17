import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from helpers import ACCEPTANCE, ACCEPTANCE_TITLES  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in ACCEPTANCE_TITLES.items():
        results = ACCEPTANCE.get(number)
        if not results:
            terminalreporter.write_line(f"criterion {number}: NOT RUN  {title}")
            continue
        failed = [detail for ok, detail in results if not ok]
        verdict = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {verdict}  {title} ({len(results) - len(failed)}/{len(results)} checks)"
        terminalreporter.write_line(line)
        for detail in failed:
            terminalreporter.write_line(f"    failed: {detail}")
