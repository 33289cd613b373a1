import pytest

from randsieve import sieve_primes


@pytest.fixture(scope="session")
def table():
    """Primes up to 10**7, enough for every grid used in the suite."""
    return sieve_primes(10**7)


@pytest.fixture(scope="session")
def small_table():
    return sieve_primes(1000)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
