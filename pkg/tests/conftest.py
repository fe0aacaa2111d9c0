import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("fast", max_examples=10, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if not oracles.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(oracles.ACCEPTANCE):
        terminalreporter.write_line(oracles.ACCEPTANCE[k])
