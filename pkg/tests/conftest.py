import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import lines

    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
