import math

import numpy as np
import pytest

E = math.e


@pytest.fixture
def rng():
    return np.random.default_rng(20131014)


def pulse_var_xc(r, n0):
    """Var(X_c^out) from expanding the input-output relations by hand."""
    return math.exp(2 * r) + math.expm1(2 * r) * (2 * n0 + 1)


def pulse_var_xm(r, n0):
    return math.exp(2 * r) * (2 * n0 + 1) + math.expm1(2 * r)


def pulse_cov_xm_pc(r, n0):
    return -2 * math.exp(r) * math.sqrt(math.expm1(2 * r)) * (n0 + 1)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for report in terminalreporter.stats.get(key, []):
            if report.when == "call":
                lines.extend(v for k, v in report.user_properties if k == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
