import pytest

from conftest import report_of
from loopforge import corpus
from loopforge.suites import (
    SHIFT_SAMPLES, SUITES, SuiteResult, c_loop_right_squares, conjugate_powers, p_map_rule,
    power_words, premoufang, run_suites, shifting_rules,
)

FAST = [n for n in corpus.names() if corpus.get(n).n <= 30]


@pytest.mark.parametrize("name", FAST)
def test_applicable_suites_pass(name):
    results = run_suites(corpus.get(name), report_of(name))
    for suite, res in results.items():
        assert res.ok, (suite, res.first_failure)
        assert res.passed > 0


def test_applicability(flexible_c24, nonflexible_c12):
    assert set(run_suites(nonflexible_c12, report_of("nonflexible_c12"))) == {
        "inclusions", "mirror", "c_loop_right_squares", "two_associative"}
    assert "p_map_rule" not in run_suites(flexible_c24, report_of("flexible_c24"))
    assert "premoufang" in run_suites(flexible_c24, report_of("flexible_c24"))
    assert set(run_suites(corpus.get("nonip5"), report_of("nonip5"))) == {"inclusions", "mirror"}


def test_shifting_rules_sample_count(flexible_c24):
    res = shifting_rules(flexible_c24)
    assert res.passed + res.failed == SHIFT_SAMPLES >= 500


def test_suite_selection(flexible_c24):
    assert set(run_suites(flexible_c24, report_of("flexible_c24"), names=["premoufang"])) == {"premoufang"}


# the laws fail outside their varieties, so the suites are not vacuous

def _P(L, x, z):
    return L.mul(L.mul(x, z), x)


def test_p_map_rule_fails_without_rif(flexible_c24):
    L = flexible_c24
    res = p_map_rule(L)
    assert res.failed > 0
    x, y = res.first_failure["x"], res.first_failure["y"]
    xyx = L.mul(x, L.mul(y, x))
    assert any(_P(L, xyx, z) != _P(L, x, _P(L, y, _P(L, x, z))) for z in range(L.n))


def test_c_loop_squares_fail_outside_c_loops():
    L = corpus.get("chein_s3")
    res = c_loop_right_squares(L)
    assert res.failed > 0
    x, y = res.first_failure["x"], res.first_failure["y"]
    xy = L.mul(x, y)
    sq = [L.mul(L.mul(z, xy), xy) for z in range(L.n)]
    mid = [L.mul(L.mul(z, x), L.mul(y, xy)) for z in range(L.n)]
    last = [L.mul(L.mul(z, L.mul(xy, x)), y) for z in range(L.n)]
    assert sq != mid or sq != last


def test_premoufang_fails_on_non_flexible_ip_loop():
    L = corpus.get("ip7_nonalt")
    res = premoufang(L)
    assert res.failed > 0
    x, y = res.first_failure["x"], res.first_failure["y"]
    J = L.inverses()
    y2 = L.mul(y, y)
    lhs_r = [L.mul(L.mul(L.mul(z, x), L.mul(y2, int(J[x]))), x) for z in range(L.n)]
    lhs_l = [L.mul(x, L.mul(L.mul(int(J[x]), y2), L.mul(x, z))) for z in range(L.n)]
    assert lhs_r != [L.mul(z, L.mul(x, y2)) for z in range(L.n)] or \
        lhs_l != [L.mul(L.mul(y2, x), z) for z in range(L.n)]


def test_power_words_and_conjugates_fail_on_non_flexible_c_loop(nonflexible_c12):
    L = nonflexible_c12
    res = power_words(L)
    assert res.failed > 0
    f = res.first_failure
    x, y = f["x"], f["y"]
    p = L.power
    lhs = L.mul(L.mul(p(x, f["i"]), p(y, f["m"])), L.mul(p(y, f["n"]), p(x, f["j"])))
    rhs = L.mul(p(x, f["i"]), L.mul(p(y, f["m"] + f["n"]), p(x, f["j"])))
    assert lhs != rhs
    conj = conjugate_powers(L)
    assert conj.failed > 0
    f = conj.first_failure
    J = L.inverses()
    x, y, k = f["x"], f["y"], f["k"]
    c = L.mul(L.mul(int(J[x]), y), x)
    assert L.power(c, k) != L.mul(L.mul(int(J[x]), L.power(y, k)), x)


def test_shifting_rules_fail_on_non_flexible_ip_loop():
    assert shifting_rules(corpus.get("ip7_nonalt")).failed > 0


def test_suite_result_bookkeeping():
    res = SuiteResult()
    res.record([True, False, True], lambda i: {"index": i})
    res.record([False], lambda i: {"second": i})
    assert (res.passed, res.failed) == (2, 2)
    assert res.first_failure == {"index": 1}
    assert res.as_dict() == {"passed": 2, "failed": 2, "first_failure": {"index": 1}}
    assert not res.ok


def test_every_suite_registered_has_applicability():
    for name, (applies, runner) in SUITES.items():
        assert callable(applies) and callable(runner), name
