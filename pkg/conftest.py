import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from config import get_config_manager  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweeps and timing runs (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the default configuration."""
    yield
    if hasattr(get_config_manager, '_instance'):
        del get_config_manager._instance


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def random_signal(rng):
    def make(L):
        return rng.standard_normal(L) + 1j * rng.standard_normal(L)
    return make


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@pytest.fixture
def feasible_lattices():
    """Generator over every (L, a, M, lambda1, lambda2) with L <= max_L that closes into a lattice."""
    def enumerate_lattices(max_L):
        for L in range(1, max_L + 1):
            divisors = _divisors(L)
            for a in divisors:
                for M in divisors:
                    for lq in _divisors(L // math.lcm(a, M)):
                        for lp in range(lq):
                            if math.gcd(lp, lq) == 1:
                                yield L, a, M, lp, lq
    return enumerate_lattices


@pytest.fixture
def random_lattice(rng):
    """Draw a random feasible (L, a, M, lambda1, lambda2) with bounded length and redundancy."""
    def draw(max_L, min_redundancy=0.0, max_redundancy=4.0, max_a=64, max_lq=8, min_L=1):
        while True:
            a = int(rng.integers(1, max_a + 1))
            M = int(rng.integers(1, int(max_redundancy * a) + 1))
            lq = int(rng.integers(1, max_lq + 1))
            lp = int(rng.integers(0, lq))
            if math.gcd(lp, lq) != 1 or M < min_redundancy * a:
                continue
            l_min = lq * math.lcm(a, M)
            lo, hi = max(1, -(-min_L // l_min)), max_L // l_min
            if hi < lo:
                continue
            return l_min * int(rng.integers(lo, hi + 1)), a, M, lp, lq
    return draw
