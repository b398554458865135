import math

import pytest
from hypothesis import HealthCheck, settings

from kerrpr import integrator

settings.register_profile("kerrpr", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kerrpr")


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    integrator.warmup()


HALF_PI = 0.5 * math.pi


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
