from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from conftest import loops, report_of
from loopforge import corpus
from loopforge.finder import SearchProblem, solve
from loopforge.loop import (
    CayleyLoop, cyclic_group, direct_product, from_table, is_associative, opposite, sub_table,
    subloop_closure, symmetric_group,
)
from loopforge.terms import catalog, evaluate
from loopforge.varieties import (
    INCLUSIONS, PROPERTIES, InclusionViolation, PropertyReport, classify, inclusion_violations,
    is_rif, report_dict,
)


@lru_cache(maxsize=None)
def small_ip_loops():
    out = []
    for n in range(1, 8):
        out += solve(SearchProblem(n, require_ip=True, mode="enumerate_up_to_iso")).models
    return tuple(out)


def _compare(loop):
    report = classify(loop)
    want = oracles.properties(loop)
    got = {k: report[k] for k in PROPERTIES}
    assert got == want, {k: (got[k], want[k]) for k in PROPERTIES if got[k] != want[k]}
    return report


@settings(max_examples=60, deadline=None)
@given(loops(max_order=5))
def test_classification_matches_naive_oracle_on_random_loops(L):
    _compare(L)


def test_classification_matches_naive_oracle_on_small_ip_loops():
    models = small_ip_loops()
    assert len(models) == 10
    for L in models:
        _compare(L)


@pytest.mark.parametrize("name", [n for n in corpus.names() if corpus.get(n).n <= 14])
def test_classification_matches_naive_oracle_on_corpus(name):
    _compare(corpus.get(name))


IDENTITY_WITNESSES = {
    "flexible": "FLEX", "left_alt": "LALT", "right_alt": "RALT", "c_loop": "C",
    "moufang": "M1", "arif": None,
}


@pytest.mark.parametrize("name", ["nonflexible_c12", "nonip5", "ip7_nonalt", "steiner10", "flexible_c24"])
def test_witnesses_refute(name):
    L = corpus.get(name)
    report = report_of(name)
    cat = catalog()
    for prop, ident_name in IDENTITY_WITNESSES.items():
        if report[prop] or ident_name is None:
            continue
        ident = cat[ident_name]
        env = dict(zip(ident.vars, report.witness(prop)))
        assert evaluate(L, ident.lhs, env) != evaluate(L, ident.rhs, env)
    if not report["associative"]:
        x, y, z = report.witness("associative")
        assert L.mul(L.mul(x, y), z) != L.mul(x, L.mul(y, z))
    if not report["diassociative"]:
        x, y = report.witness("diassociative")
        assert not is_associative(from_table(sub_table(L, subloop_closure(L, [x, y]).elements)))
    for prop in PROPERTIES:
        assert (report.witness(prop) is None) == report[prop]


def test_rif_witness_names_an_inner_map(flexible_c24):
    ok, w = is_rif(flexible_c24)
    assert not ok and w[0][0] in "TLR"


def test_report_dict_shape(nonflexible_c12):
    d = report_dict(nonflexible_c12, report_of("nonflexible_c12"), name="nonflexible_c12")
    assert d["loop"] == "nonflexible_c12" and d["order"] == 12
    assert set(d["properties"]) == set(PROPERTIES)
    assert d["properties"]["flexible"]["holds"] is False
    assert d["suites"] == {}
    anon = report_dict(CayleyLoop(nonflexible_c12.table), report_of("nonflexible_c12"))
    assert anon["loop"].startswith("sha1:")


def test_inclusion_violation_is_raised():
    fake = PropertyReport(3, {p: (False, [0]) for p in PROPERTIES})
    fake.properties["steiner"] = (True, None)
    assert "steiner=>rif" in inclusion_violations(fake)
    assert "steiner=>commutative" in inclusion_violations(fake)
    fake.properties["arif"] = (True, None)
    assert "odd_arif=>moufang" in inclusion_violations(fake)


def test_inclusions_hold_on_random_loops_and_products():
    rng = np.random.default_rng(3)
    parts = [cyclic_group(3), symmetric_group(3), corpus.get("steiner10"), corpus.get("nonflexible_c12")]
    for i in range(4):
        a, b = rng.choice(len(parts), 2)
        P = direct_product(parts[a], parts[b])
        report = classify(P)  # raises on a violation
        assert not inclusion_violations(report)


def test_inclusion_names_unique():
    names = [name for name, _, _ in INCLUSIONS]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("name", ["nonflexible_c12", "flexible_c24", "chein_s3", "ip7_nonalt", "nonip5"])
def test_opposite_loop_has_mirrored_classification(name):
    L = corpus.get(name)
    swap = {"left_alt": "right_alt", "right_alt": "left_alt"}
    a, b = report_of(name), classify(opposite(L))
    for prop in PROPERTIES:
        assert b[swap.get(prop, prop)] == a[prop], prop


def test_classify_can_skip_inclusion_check(nonflexible_c12):
    assert classify(nonflexible_c12, check_inclusions=False)["c_loop"]


def test_inclusion_error_type():
    assert issubclass(InclusionViolation, Exception)
