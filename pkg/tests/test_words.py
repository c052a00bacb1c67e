import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import loops
from loopforge import corpus
from loopforge.errors import BadSplit, LengthCapExceeded, NotIP
from loopforge.loop import cyclic_group
from loopforge.varieties import is_ip
from loopforge.words import (
    associates, block_length, d_associative, min_failing_block_length, pi_all, pi_k, pi_r,
)


def _all_bracketings(loop, word):
    """Every product of ``word``, enumerating bracketings recursively."""
    if len(word) == 1:
        return {word[0]}
    out = set()
    for k in range(1, len(word)):
        for a in _all_bracketings(loop, word[:k]):
            for b in _all_bracketings(loop, word[k:]):
                out.add(loop.mul(a, b))
    return out


@settings(max_examples=60, deadline=None)
@given(loops(max_order=6), st.lists(st.integers(0, 100), min_size=1, max_size=6))
def test_pi_all_matches_recursive_enumeration(L, raw):
    word = tuple(v % L.n for v in raw)
    assert pi_all(L, word) == _all_bracketings(L, word)


def test_pi_on_the_14_element_loop(steiner14):
    # elements are point + 1
    assert pi_all(steiner14, (2, 1, 6)) == {13}
    assert pi_all(steiner14, (1, 2, 6)) == {4, 13}
    assert pi_r(steiner14, (1, 2, 6)) == steiner14.mul(1, steiner14.mul(2, 6))


def test_pi_k_and_bad_split(nonflexible_c12):
    w = (3, 6, 3, 5)
    L = nonflexible_c12
    assert pi_k(L, w, 2) == L.mul(L.mul(3, 6), L.mul(3, 5))
    with pytest.raises(BadSplit):
        pi_k(L, w, 0)
    with pytest.raises(BadSplit):
        pi_k(L, w, 4)


def test_length_cap(nonflexible_c12):
    with pytest.raises(LengthCapExceeded):
        pi_all(nonflexible_c12, (1,) * 11)
    assert pi_all(nonflexible_c12, ()) == {0}
    assert associates(nonflexible_c12, (1,) * 10, cap=10) in (True, False)


def test_block_length():
    z6 = cyclic_group(6)
    assert block_length(z6, (1, 5, 1, 2, 4, 3)) == 3
    assert block_length(z6, ()) == 0
    assert block_length(z6, (2,)) == 1


def _brute_d_associative(loop, D, max_len):
    J = loop.inverses()
    seen = set()
    for a in range(loop.n):
        for b in range(loop.n):
            alphabet = sorted({a, b, int(J[a]), int(J[b])})
            for length in range(3, max_len + 1):
                for word in itertools.product(alphabet, repeat=length):
                    if word in seen:
                        continue
                    seen.add(word)
                    if block_length(loop, word) <= D and len(pi_all(loop, word)) > 1:
                        return False
    return True


IP_SMALL = [n for n in corpus.names() if corpus.get(n).n <= 12 and is_ip(corpus.get(n))[0]]


@pytest.mark.parametrize("name", IP_SMALL)
def test_d_associativity_against_brute_force(name):
    L = corpus.get(name)
    max_len = 4 if L.n > 7 else 5
    for D in (1, 2, 3):
        assert d_associative(L, D, max_len)[0] == _brute_d_associative(L, D, max_len), D


def test_block_length_profile_of_the_12_element_loop(nonflexible_c12):
    assert [d_associative(nonflexible_c12, D)[0] for D in (1, 2, 3)] == [True, True, False]
    ok, failure = d_associative(nonflexible_c12, 3)
    assert failure.as_list() == [3, 6, "aba"]
    assert len(pi_all(nonflexible_c12, failure.word)) > 1
    assert min_failing_block_length(nonflexible_c12) == 3


def test_diassociative_loops_associate_everything(flexible_c24, steiner14, steiner10):
    for L in (flexible_c24, steiner14, steiner10):
        assert min_failing_block_length(L) is None
        assert all(d_associative(L, D)[0] for D in (1, 2, 3))


def test_d_associative_needs_inverses():
    with pytest.raises(NotIP):
        d_associative(corpus.get("nonip5"), 2)


def test_monotone_in_block_bound():
    L = corpus.get("ip7_nonalt")
    results = [d_associative(L, D, 5)[0] for D in range(1, 6)]
    assert results == sorted(results, reverse=True)
    m = min_failing_block_length(L, 5)
    assert results == [m is None or D < m for D in range(1, 6)]
