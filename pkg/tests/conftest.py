import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from multexp import build_factor_sieve

settings.register_profile("multexp", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("multexp")


@pytest.fixture(scope="session")
def sieve_small():
    return build_factor_sieve(200_000)


@pytest.fixture(scope="session")
def sieve_big():
    return build_factor_sieve(1 << 22)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
