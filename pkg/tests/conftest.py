from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import oracle_tau  # noqa: E402


@pytest.fixture(scope="session")
def small_tau_table():
    """tau(n) for n <= 10^4 from plain divisor counting."""
    return [0] + [oracle_tau(n) for n in range(1, 10**4 + 1)]
