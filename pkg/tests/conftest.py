import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import strategies as st

from loopforge import corpus
from loopforge.loop import CayleyLoop
from loopforge.varieties import classify


@lru_cache(maxsize=None)
def report_of(name):
    return classify(corpus.get(name))


def random_loop(n, seed):
    """A random loop of order n by randomized backtracking (fine for n <= 8)."""
    rng = np.random.default_rng(seed)
    table = -np.ones((n, n), dtype=np.int64)
    table[0] = table[:, 0] = np.arange(n)
    cells = [(r, c) for r in range(1, n) for c in range(1, n)]

    def fill(i):
        if i == len(cells):
            return True
        r, c = cells[i]
        used = set(table[r, :c].tolist()) | set(table[:r, c].tolist()) | {r, c}
        options = [v for v in range(n) if v not in used]
        rng.shuffle(options)
        for v in options:
            table[r, c] = v
            if fill(i + 1):
                return True
        table[r, c] = -1
        return False

    assert fill(0)
    return CayleyLoop(table)


@st.composite
def loops(draw, min_order=1, max_order=6):
    n = draw(st.integers(min_order, max_order))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_loop(n, seed)


def naive_reduced_latin_squares(n):
    """Every n x n table with row 0 and column 0 equal to 0..n-1 and no
    repeated symbol in a row or column, built row by row from permutations."""
    rows_for = {r: [p for p in itertools.permutations(range(n)) if p[0] == r] for r in range(n)}
    out = []

    def extend(rows):
        if len(rows) == n:
            out.append(np.array(rows))
            return
        r = len(rows)
        for p in rows_for[r]:
            if all(p[c] != row[c] for row in rows for c in range(n)):
                extend(rows + [p])

    extend([tuple(range(n))])
    return out


@pytest.fixture(scope="session")
def flexible_c24():
    return corpus.get("flexible_c24")


@pytest.fixture(scope="session")
def nonflexible_c12():
    return corpus.get("nonflexible_c12")


@pytest.fixture(scope="session")
def steiner14():
    return corpus.get("steiner14")


@pytest.fixture(scope="session")
def steiner10():
    return corpus.get("steiner10")
