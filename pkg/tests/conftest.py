import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cyclepulse.spectrum import validate_spectrum

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def star4():
    return validate_spectrum([-3, 0, 1, 2])


@pytest.fixture
def ladder4():
    return validate_spectrum([-3, -1, 0.5, 3.5])


@pytest.fixture
def ladder3():
    return validate_spectrum([-1.0, 0.0, 1.5])


@pytest.fixture
def qubit():
    return validate_spectrum([-0.5, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
