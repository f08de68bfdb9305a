import os

import pytest
from hypothesis import HealthCheck, settings

from profilekit import kernels

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance outcomes collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    with kernels.use_backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
