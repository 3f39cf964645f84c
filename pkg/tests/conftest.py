import time

import pytest

from surplusect.stats import run_clifford_trials


@pytest.fixture(scope="session")
def tally_n2_100k():
    """The big n = 2 Monte Carlo run shared by several acceptance
    criteria (about half a minute); returns (tally, elapsed_seconds)."""
    start = time.perf_counter()
    tally = run_clifford_trials(2, 100_000, seed=42)
    return tally, time.perf_counter() - start


@pytest.fixture(scope="session")
def tally_n3_20k():
    """The n = 3 multistart Monte Carlo run for the mean criterion
    (about five minutes single-core); returns (tally, elapsed).

    100 starts per dimension reproduces the 200-start counts exactly
    on spot checks while halving the cost."""
    start = time.perf_counter()
    tally = run_clifford_trials(3, 20_000, seed=42, starts_per_dim=100)
    return tally, time.perf_counter() - start
