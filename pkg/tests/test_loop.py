import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import loops, random_loop
from loopforge import corpus
from loopforge.errors import NoIdentityAtZero, NotAGroup, NotIP, NotLatin
from loopforge.loop import (
    boolean_group, chein_double, cyclic_group, direct_product, find_isomorphism, from_table,
    is_associative, is_boolean_group, is_commutative, isomorphic, normalize, nucleus, opposite,
    parse_loop, serialize_loop, sub_table, subloop_closure, symmetric_group, trivial_loop,
)
from loopforge.steiner import TripleSystem, steiner_loop, z13_system
from loopforge.terms import catalog, holds
from loopforge.varieties import is_ip, is_power_associative


def test_trivial_loop():
    L = from_table([[0]])
    assert L.n == 1 and L.mul(0, 0) == 0


def test_not_latin_reports_cell():
    with pytest.raises(NotLatin) as exc:
        from_table([[0, 1], [1, 1]])
    assert exc.value.row == 1


def test_column_repeat_reported():
    with pytest.raises(NotLatin) as exc:
        from_table([[0, 1, 2], [1, 2, 0], [2, 1, 0]])
    assert exc.value.col is not None


def test_identity_must_be_zero():
    with pytest.raises(NoIdentityAtZero):
        from_table([[1, 0], [0, 1]])


def test_normalize_moves_identity():
    L = normalize([[1, 0], [0, 1]])
    assert L.table.tolist() == [[0, 1], [1, 0]]


def test_non_square_rejected():
    with pytest.raises(NotLatin):
        from_table([[0, 1]])


def test_table_lookups(flexible_c24, nonflexible_c12):
    assert flexible_c24.mul(3, 12) == 18
    assert nonflexible_c12.ldiv(3, 0) == 3
    assert flexible_c24.mul(0, 7) == 7


def test_inverses(steiner14, flexible_c24):
    z5 = cyclic_group(5)
    assert z5.left_inverse(2) == 3
    assert z5.right_inverse(2) == 3
    assert all(steiner14.left_inverse(x) == x for x in range(14))
    assert flexible_c24.inverse(3) == 3
    assert trivial_loop().left_inverse(0) == 0


def test_inverse_on_non_ip_loop():
    L = corpus.get("nonip5")
    with pytest.raises(NotIP):
        L.inverses()
    bad = [x for x in range(L.n) if L.left_inverse(x) != L.right_inverse(x)]
    with pytest.raises(NotIP):
        L.inverse(bad[0])


def test_powers(steiner14):
    z5 = cyclic_group(5)
    assert z5.power(2, -3) == 4
    assert z5.power(3, 0) == 0
    assert all(steiner14.power(x, 2) == 0 for x in range(14))
    assert z5.power(2, 1) == 2
    with pytest.raises(NotIP):
        corpus.get("nonip5").power(1, -1)


def test_element_order(steiner14, flexible_c24):
    assert steiner14.element_order(5) == 2
    assert flexible_c24.element_order(3) == 2
    assert cyclic_group(6).element_order(0) == 1
    assert cyclic_group(6).element_order(2) == 3


def test_subloop_closure(steiner14):
    assert subloop_closure(cyclic_group(6), []).elements == (0,)
    assert subloop_closure(cyclic_group(6), [2]).elements == (0, 2, 4)
    for x, y in itertools.combinations(range(14), 2):
        assert len(subloop_closure(steiner14, [x, y])) in (1, 2, 4)


def test_nucleus(flexible_c24, nonflexible_c12):
    assert nucleus(flexible_c24) == [0, 1, 2]
    assert nucleus(nonflexible_c12) == [0, 1, 2]
    assert nucleus(symmetric_group(3)) == list(range(6))


def test_direct_product_with_trivial(nonflexible_c12):
    assert isomorphic(direct_product(trivial_loop(), nonflexible_c12), nonflexible_c12)
    P = direct_product(cyclic_group(2), cyclic_group(3))
    assert P.n == 6 and P.mul(1 * 3 + 2, 1 * 3 + 2) == 0 * 3 + 1


def test_opposite(nonflexible_c12):
    assert opposite(opposite(nonflexible_c12)) == nonflexible_c12
    assert opposite(cyclic_group(6)) == cyclic_group(6)
    mirror_c = catalog()["C"].mirror()
    assert holds(opposite(nonflexible_c12), mirror_c).holds == holds(nonflexible_c12, catalog()["C"]).holds


def test_chein_double():
    assert is_boolean_group(chein_double(cyclic_group(2)))
    assert is_associative(chein_double(cyclic_group(3)))
    M = chein_double(symmetric_group(3))
    assert M.n == 12 and not is_associative(M)
    for name in ("M1", "M2", "N1", "N2"):
        assert holds(M, catalog()[name]).holds
    with pytest.raises(NotAGroup):
        chein_double(corpus.get("steiner10"))


def test_boolean_and_commutative(steiner14, flexible_c24):
    assert is_boolean_group(boolean_group(2))
    assert is_commutative(steiner14) and not is_associative(steiner14)
    assert not is_commutative(flexible_c24)


def test_isomorphism_basics(steiner14):
    assert isomorphic(cyclic_group(4), cyclic_group(4))
    assert not isomorphic(cyclic_group(4), boolean_group(2))
    # relabel the points of the system and rebuild
    rng = np.random.default_rng(5)
    perm = rng.permutation(13)
    ts = z13_system()
    relabeled = TripleSystem(13, [tuple(int(perm[p]) for p in b) for b in ts.blocks])
    other = steiner_loop(relabeled)
    assert other != steiner14
    phi = find_isomorphism(other, steiner14)
    assert phi is not None
    assert all(steiner14.mul(phi[a], phi[b]) == phi[other.mul(a, b)]
               for a in range(14) for b in range(14))


def _brute_isomorphic(l1, l2):
    n = l1.n
    for rest in itertools.permutations(range(1, n)):
        phi = np.array((0,) + rest)
        if np.array_equal(phi[l1.table], l2.table[np.ix_(phi, phi)]):
            return True
    return False


@settings(max_examples=40, deadline=None)
@given(loops(max_order=5), st.integers(0, 2 ** 32 - 1))
def test_isomorphism_against_brute_force(L, seed):
    other = random_loop(L.n, seed)
    assert isomorphic(L, other) == _brute_isomorphic(L, other)
    # a random relabelling is always isomorphic
    perm = np.concatenate([[0], 1 + np.random.default_rng(seed).permutation(L.n - 1)]).astype(int)
    inv = np.argsort(perm)
    relabeled = from_table(perm[L.table[np.ix_(inv, inv)]])
    assert isomorphic(L, relabeled)


@settings(max_examples=60, deadline=None)
@given(loops())
def test_division_axioms(L):
    a = np.arange(L.n)[:, None]
    b = np.arange(L.n)[None, :]
    T, LD, RD = L.table, L.ldiv_table, L.rdiv_table
    assert (T[a, LD[a, b]] == b).all()
    assert (LD[a, T[a, b]] == b).all()
    assert (T[RD[b, a], a] == b).all()
    assert (RD[T[b, a], a] == b).all()


@settings(max_examples=60, deadline=None)
@given(loops())
def test_text_round_trip(L):
    text = serialize_loop(L)
    again = parse_loop(text)
    assert again == L
    assert serialize_loop(again) == text


def test_round_trip_keeps_comments():
    text = (corpus._data("flexible_c24.tbl")).read_text()
    assert serialize_loop(parse_loop(text)) == text


@settings(max_examples=60, deadline=None)
@given(loops(max_order=7))
def test_subloop_closure_is_closure_operator(L):
    rng = np.random.default_rng(L.n)
    seed = set(rng.choice(L.n, size=min(2, L.n), replace=False).tolist())
    first = subloop_closure(L, seed)
    assert set(subloop_closure(L, first.elements).elements) == set(first.elements)
    bigger = subloop_closure(L, seed | {int(rng.integers(L.n))})
    assert set(first.elements) <= set(bigger.elements)
    from_table(sub_table(L, first.elements))  # a loop in its own right


@pytest.mark.parametrize("name", [n for n in corpus.names() if is_ip(corpus.get(n))[0]])
def test_ip_loops_have_involutive_antiautomorphic_inverse(name):
    L = corpus.get(name)
    J = L.inverses()
    assert (J[J] == np.arange(L.n)).all()
    a = np.arange(L.n)[:, None]
    b = np.arange(L.n)[None, :]
    assert (J[L.table[a, b]] == L.table[J[b], J[a]]).all()


@pytest.mark.parametrize("name", [n for n in corpus.names()
                                  if corpus.get(n).n <= 30 and is_power_associative(corpus.get(n))[0]])
def test_power_additivity_in_power_associative_loops(name):
    L = corpus.get(name)
    span = range(-L.n, L.n + 1)
    cache = {k: L.powers(k) for k in range(-2 * L.n, 2 * L.n + 1)}
    for i in span:
        for j in span:
            assert (cache[i + j] == L.table[cache[i], cache[j]]).all()


@pytest.mark.parametrize("first,second", [("z3", "nonflexible_c12"), ("s3", "steiner10"), ("chein_s3", "z2")])
def test_direct_product_preserves_identities(first, second):
    A, B = corpus.get(first), corpus.get(second)
    P = direct_product(A, B)
    for ident in catalog().values():
        assert holds(P, ident).holds == (holds(A, ident).holds and holds(B, ident).holds), ident.name
