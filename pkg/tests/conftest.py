import itertools
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from storysets.setsystem import BinMatrix

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def random_bins(rng, m, n, k) -> BinMatrix:
    return BinMatrix(rng.integers(1, k + 1, size=(m, n)), k)


@st.composite
def bin_matrices(draw, max_m=5, max_n=6, max_k=4, min_m=1, min_n=1):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(2, max_k))
    cells = draw(st.lists(st.integers(1, k), min_size=m * n, max_size=m * n))
    return BinMatrix(np.array(cells, dtype=np.int64).reshape(m, n), k)


def pairwise_discordance(a, b) -> int:
    """Quadratic count of curve pairs ordered differently by two position vectors."""
    m = len(a)
    return sum(
        1
        for x, y in itertools.combinations(range(m), 2)
        if (a[x] - a[y]) * (b[x] - b[y]) < 0
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_csv():
    return DATA / "toy.csv"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
