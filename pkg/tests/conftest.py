import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=10, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def coherent_series(dim, beta):
    """|beta> from its Fock series, written independently of the package."""
    from math import factorial

    n = np.arange(dim)
    fact = np.array([float(factorial(k)) for k in n])
    return np.exp(-abs(beta) ** 2 / 2) * beta**n / np.sqrt(fact)


def random_density(rng, dim, rank=3, support=None):
    support = support or dim
    g = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    rho = np.zeros((dim, dim), dtype=complex)
    rho[:support, :support] = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture(scope="session")
def bench():
    from catability.benchmark import default_benchmark

    return default_benchmark()


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: dict = {}


def record_verdict(n: int, ok: bool, detail: str) -> str:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES[n] = line
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
