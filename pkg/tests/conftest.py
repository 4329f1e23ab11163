import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import batchenvs.envs  # noqa: E402,F401  (registers the standard environments)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
