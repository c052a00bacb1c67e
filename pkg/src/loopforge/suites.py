"""Executable property suites: structural laws of the varieties checked on a loop.

Each suite returns a :class:`SuiteResult` counting checked instances.  Maps
are image arrays composed left to right, so ``p`` then ``q`` is ``q[p]``.
A suite only runs on loops in its variety; ``run_suites`` records which ones
applied.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import varieties
from .loop import opposite
from .words import d_associative

DEFAULT_SEED = 20031
SHIFT_SAMPLES = 600
SHIFT_RANGE = 6
POWER_WORD_RANGE = 4
POWER_WORD_SAMPLES = 120
CONJ_RANGE = 6


@dataclass
class SuiteResult:
    passed: int = 0
    failed: int = 0
    first_failure: dict | None = None

    def record(self, ok_mask, describe):
        """Add a boolean array of outcomes; ``describe(i)`` explains index i."""
        ok_mask = np.asarray(ok_mask, dtype=bool).ravel()
        bad = int((~ok_mask).sum())
        self.passed += ok_mask.size - bad
        self.failed += bad
        if bad and self.first_failure is None:
            self.first_failure = describe(int(np.argmin(ok_mask)))

    def as_dict(self):
        return {"passed": self.passed, "failed": self.failed, "first_failure": self.first_failure}

    @property
    def ok(self):
        return self.failed == 0


def _R(loop, a):
    """Right translation images for every element of ``a``: row i is R(a[i])."""
    return loop.table[:, np.asarray(a)].T


def _L(loop, a):
    return loop.table[np.asarray(a)]


def _then(p, q):
    """Row-wise composition: apply p, then q."""
    return np.take_along_axis(q, p, axis=1)


def _pairs(n):
    idx = np.arange(n * n)
    return idx // n, idx % n


def _pair_blocks(n, size=1 << 12):
    x, y = _pairs(n)
    for s in range(0, n * n, size):
        yield x[s:s + size], y[s:s + size]


def p_map_rule(loop):
    """P(x(yx)) = P(x) P(y) P(x) with P(x) = L(x) R(x), for all x, y."""
    T = loop.table
    res = SuiteResult()
    P = _then(_L(loop, np.arange(loop.n)), _R(loop, np.arange(loop.n)))
    for x, y in _pair_blocks(loop.n):
        lhs = P[T[x, T[y, x]]]
        rhs = _then(_then(P[x], P[y]), P[x])
        res.record((lhs == rhs).all(axis=1), lambda i: {"x": int(x[i]), "y": int(y[i])})
    return res


def c_loop_right_squares(loop):
    """R(xy)^2 = R(x) R(y(xy)) = R((xy)x) R(y) for all x, y."""
    T = loop.table
    res = SuiteResult()
    for x, y in _pair_blocks(loop.n):
        xy = T[x, y]
        sq = _then(_R(loop, xy), _R(loop, xy))
        mid = _then(_R(loop, x), _R(loop, T[y, xy]))
        last = _then(_R(loop, T[xy, x]), _R(loop, y))
        ok = (sq == mid).all(axis=1) & (sq == last).all(axis=1)
        res.record(ok, lambda i: {"x": int(x[i]), "y": int(y[i])})
    return res


def premoufang(loop):
    """R(x) R(y^2 x^-1) R(x) = R(x y^2) and L(x) L(x^-1 y^2) L(x) = L(y^2 x)."""
    T = loop.table
    J = loop.inverses()
    res = SuiteResult()
    for x, y in _pair_blocks(loop.n):
        y2 = T[y, y]
        r_lhs = _then(_then(_R(loop, x), _R(loop, T[y2, J[x]])), _R(loop, x))
        l_lhs = _then(_then(_L(loop, x), _L(loop, T[J[x], y2])), _L(loop, x))
        ok = (r_lhs == _R(loop, T[x, y2])).all(axis=1) & (l_lhs == _L(loop, T[y2, x])).all(axis=1)
        res.record(ok, lambda i: {"x": int(x[i]), "y": int(y[i])})
    return res


class _Powers:
    """x^k for every element, cached per exponent."""

    def __init__(self, loop):
        self.loop = loop
        self.cache = {}

    def __call__(self, k, xs):
        if k not in self.cache:
            self.cache[k] = self.loop.powers(k)
        return self.cache[k][xs]


def _parity_ok(m, n, k):
    return k % 2 == 0 or (m + n) % 2 == 0


def shifting_rules(loop, samples=SHIFT_SAMPLES, bound=SHIFT_RANGE, seed=DEFAULT_SEED):
    """Exponent shifting between paired translations, on random parity-valid tuples.

    With a = x^m, b = x^n, c = x^(m+k), d = x^(n-k):
      1. R(y a) R(b y^-1) = R(y c) R(d y^-1)
      2. R(a y) R(y^-1 b) = R(c y) R(y^-1 d)
      3. L(a y) L(y^-1 b) = L(c y) L(y^-1 d)
      4. L(y a) L(b y^-1) = L(y c) L(d y^-1)
    for m, n, k in [-bound, bound] with k even or m + n even.
    """
    rng = np.random.default_rng(seed)
    T = loop.table
    J = loop.inverses()
    pw = _Powers(loop)
    res = SuiteResult()
    tuples = []
    while len(tuples) < samples:
        m, n, k = (int(v) for v in rng.integers(-bound, bound + 1, size=3))
        if _parity_ok(m, n, k):
            tuples.append((int(rng.integers(loop.n)), int(rng.integers(loop.n)), m, n, k))
    outcomes = np.ones(len(tuples), dtype=bool)
    for i, (xi, yi, m, n, k) in enumerate(tuples):
        a, b = pw(m, xi), pw(n, xi)
        c, d = pw(m + k, xi), pw(n - k, xi)
        yv = J[yi]
        checks = (
            (_R(loop, [T[yi, a]]), _R(loop, [T[b, yv]]), _R(loop, [T[yi, c]]), _R(loop, [T[d, yv]])),
            (_R(loop, [T[a, yi]]), _R(loop, [T[yv, b]]), _R(loop, [T[c, yi]]), _R(loop, [T[yv, d]])),
            (_L(loop, [T[a, yi]]), _L(loop, [T[yv, b]]), _L(loop, [T[c, yi]]), _L(loop, [T[yv, d]])),
            (_L(loop, [T[yi, a]]), _L(loop, [T[b, yv]]), _L(loop, [T[yi, c]]), _L(loop, [T[d, yv]])),
        )
        for p1, p2, q1, q2 in checks:
            if not np.array_equal(_then(p1, p2), _then(q1, q2)):
                outcomes[i] = False
    res.record(outcomes, lambda i: dict(zip(("x", "y", "m", "n", "k"), map(int, tuples[i]))))
    return res


def power_words(loop, samples=POWER_WORD_SAMPLES, bound=POWER_WORD_RANGE, seed=DEFAULT_SEED):
    """x^i y^m * y^n x^j = x^i y^(m+n) x^j over all pairs, for sampled exponents.

    The right side is read as x^i (y^(m+n) x^j), which is unambiguous in
    flexible power-alternative loops.
    """
    rng = np.random.default_rng(seed)
    T = loop.table
    pw = _Powers(loop)
    res = SuiteResult()
    combos = list(itertools.product(range(-bound, bound + 1), repeat=4))
    if samples < len(combos):
        pick = rng.choice(len(combos), size=samples, replace=False)
        combos = [combos[i] for i in sorted(pick)]
    for x, y in _pair_blocks(loop.n):
        for i, j, m, n in combos:
            lhs = T[T[pw(i, x), pw(m, y)], T[pw(n, y), pw(j, x)]]
            rhs = T[pw(i, x), T[pw(m + n, y), pw(j, x)]]
            res.record(lhs == rhs, lambda t, i=i, j=j, m=m, n=n: {
                "x": int(x[t]), "y": int(y[t]), "i": i, "j": j, "m": m, "n": n})
    return res


def conjugate_powers(loop, bound=CONJ_RANGE):
    """(x^-1 y x)^k = x^-1 y^k x for |k| <= bound, over all pairs."""
    T = loop.table
    J = loop.inverses()
    pw = _Powers(loop)
    res = SuiteResult()
    for x, y in _pair_blocks(loop.n):
        conj = T[T[J[x], y], x]
        for k in range(-bound, bound + 1):
            lhs = pw(k, conj)
            rhs = T[T[J[x], pw(k, y)], x]
            res.record(lhs == rhs, lambda t, k=k: {"x": int(x[t]), "y": int(y[t]), "k": k})
    return res


def commutative_diassociative(loop):
    """A commutative ARIF loop is diassociative."""
    res = SuiteResult()
    ok, w = varieties.is_diassociative(loop)
    res.record([ok], lambda i: {"pair": w})
    return res


def inclusions(loop, report):
    """Every inclusion edge of the variety diagram, as one check per edge."""
    res = SuiteResult()
    bad = set(varieties.inclusion_violations(report))
    names = [name for name, _, _ in varieties.INCLUSIONS]
    res.record([name not in bad for name in names], lambda i: {"edge": names[i]})
    return res


def mirror_stability(loop, report):
    """Every property keeps its truth value on the opposite loop (left and right
    alternativity trade places)."""
    res = SuiteResult()
    other = varieties.classify(opposite(loop))
    names = list(varieties.PROPERTIES)
    swap = {"left_alt": "right_alt", "right_alt": "left_alt"}
    res.record([report[p] == other[swap.get(p, p)] for p in names], lambda i: {"property": names[i]})
    return res


def two_associative_vs_power_alternative(loop, report, max_len=6):
    """For IP loops: 2-associativity of short words agrees with power alternativity."""
    res = SuiteResult()
    two, failure = d_associative(loop, 2, max_len)
    res.record([two == report["power_alternative"]], lambda i: {
        "two_associative": two, "power_alternative": report["power_alternative"],
        "word": None if failure is None else list(failure.word)})
    return res


# suite name -> (applicability over the report, runner taking (loop, report))
SUITES = {
    "inclusions": (lambda r: True, inclusions),
    "mirror": (lambda r: True, mirror_stability),
    "p_map_rule": (lambda r: r["rif"], lambda L, r: p_map_rule(L)),
    "c_loop_right_squares": (lambda r: r["c_loop"], lambda L, r: c_loop_right_squares(L)),
    "premoufang": (lambda r: r["arif"], lambda L, r: premoufang(L)),
    "shifting_rules": (lambda r: r["arif"], lambda L, r: shifting_rules(L)),
    "power_words": (lambda r: r["arif"], lambda L, r: power_words(L)),
    "conjugate_powers": (lambda r: r["arif"], lambda L, r: conjugate_powers(L)),
    "commutative_diassociative": (lambda r: r["arif"] and r["commutative"],
                                  lambda L, r: commutative_diassociative(L)),
    "two_associative": (lambda r: r["ip"], two_associative_vs_power_alternative),
}


def run_suites(loop, report=None, names=None):
    """Run every applicable suite (or just ``names``); returns name -> SuiteResult."""
    report = report or varieties.classify(loop)
    out = {}
    for name, (applies, runner) in SUITES.items():
        if names is not None and name not in names:
            continue
        if applies(report):
            out[name] = runner(loop, report)
    return out
