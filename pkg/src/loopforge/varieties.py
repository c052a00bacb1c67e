"""Membership tests for the loop varieties, and the combined classification.

Every predicate returns ``(holds, witness)`` where the witness is a small
JSON-friendly list (or ``None``) explaining a failure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import terms
from .errors import LoopError
from .loop import associativity_witness, is_commutative, sub_table, subloop_closure
from .perms import is_rif_inner

PROPERTIES = (
    "associative", "commutative", "boolean_group", "ip", "flexible", "left_alt",
    "right_alt", "alternative", "moufang", "c_loop", "extra", "steiner", "rif",
    "arif", "power_associative", "power_alternative", "diassociative",
)

_CATALOG = terms.catalog()


class OracleDisagreement(LoopError):
    """Two independent routes to the same property gave different answers."""


class InclusionViolation(LoopError):
    pass


def _identity(loop, name):
    res = terms.holds(loop, _CATALOG[name])
    if res.holds:
        return True, None
    return False, [res.witness[v] for v in _CATALOG[name].vars]


def is_associative(loop):
    w = associativity_witness(loop)
    return w is None, None if w is None else list(w)


def is_commutative_(loop):
    if is_commutative(loop):
        return True, None
    x, y = np.argwhere(loop.table != loop.table.T)[0]
    return False, [int(x), int(y)]


def is_boolean_group(loop):
    ok, w = is_associative(loop)
    if not ok:
        return False, w
    diag = np.diagonal(loop.table)
    if (diag != 0).any():
        return False, [int(np.argmax(diag != 0))]
    return True, None


def is_ip(loop):
    """Two-sided inverses that cancel on both sides."""
    lft, rgt = loop.rdiv_table[0], loop.ldiv_table[:, 0]
    if not np.array_equal(lft, rgt):
        return False, [int(np.argmax(lft != rgt))]
    T = loop.table
    x = np.arange(loop.n)
    # x^-1 (x y) = y
    bad = T[lft[:, None], T] != x[None, :]
    if bad.any():
        return False, [int(v) for v in np.unravel_index(int(np.argmax(bad)), bad.shape)]
    # (y x) x^-1 = y, indexed [x, y]
    bad = T[T.T, lft[:, None]] != x[None, :]
    if bad.any():
        return False, [int(v) for v in np.unravel_index(int(np.argmax(bad)), bad.shape)]
    return True, None


def is_flexible(loop):
    return _identity(loop, "FLEX")


def is_left_alt(loop):
    return _identity(loop, "LALT")


def is_right_alt(loop):
    return _identity(loop, "RALT")


def is_alternative(loop):
    ok, w = is_right_alt(loop)
    if not ok:
        return ok, w
    return is_left_alt(loop)


def is_moufang(loop):
    """All four Moufang identities; they must agree on every loop."""
    results = {name: _identity(loop, name) for name in ("M1", "M2", "N1", "N2")}
    truth = {ok for ok, _ in results.values()}
    if len(truth) != 1:
        raise OracleDisagreement(f"Moufang identities disagree: { {k: v[0] for k, v in results.items()} }")
    return results["M1"]


def is_c_loop(loop):
    return _identity(loop, "C")


def is_extra(loop):
    ok, w = is_moufang(loop)
    if not ok:
        return ok, w
    return is_c_loop(loop)


def is_steiner(loop):
    ok, w = is_ip(loop)
    if not ok:
        return ok, w
    diag = np.diagonal(loop.table)
    if (diag != 0).any():
        return False, [int(np.argmax(diag != 0))]
    return True, None


def is_rif(loop):
    """IP plus inner mappings commuting with J, cross-checked against RIF3/RIF4."""
    ok, w = is_ip(loop)
    if not ok:
        return ok, w
    inner_ok, label = is_rif_inner(loop)
    eq3, w3 = _identity(loop, "RIF3")
    eq4, _ = _identity(loop, "RIF4")
    if not (inner_ok == eq3 == eq4):
        raise OracleDisagreement(
            f"RIF by inner mappings is {inner_ok}, by identities {eq3}/{eq4}")
    return inner_ok, None if inner_ok else [label] + w3


def is_arif(loop):
    for name in ("FLEX", "W1", "W2"):
        ok, w = _identity(loop, name)
        if not ok:
            return ok, w
    return True, None


def _closure_is_group(loop, seed):
    elems = subloop_closure(loop, seed).elements
    sub = sub_table(loop, elems)
    T = sub
    for x in range(len(elems)):
        if (T[T[x]] != T[x, T]).any():
            return False, elems
    return True, elems


def _covering_scan(loop, seeds):
    """First seed whose generated subloop is not a group; covered seeds are skipped."""
    n = loop.n
    covered = np.zeros((n,) * len(seeds[0]) if seeds else (n,), dtype=bool)
    for seed in seeds:
        if covered[seed]:
            continue
        ok, elems = _closure_is_group(loop, seed)
        if not ok:
            return list(seed)
        # any seed drawn from a subgroup generates a subgroup of it
        idx = np.ix_(*([np.array(elems)] * len(seed)))
        covered[idx] = True
    return None


def is_power_associative(loop):
    w = _covering_scan(loop, [(x,) for x in range(loop.n)])
    return w is None, w


def is_diassociative(loop):
    w = _covering_scan(loop, [(x, y) for x in range(loop.n) for y in range(loop.n)])
    return w is None, w


def is_power_alternative(loop):
    """L(x^i) = L(x)^i and R(x^i) = R(x)^i for |i| <= 2 * max element order.

    Negative exponents are only meaningful (and only checked) with the IP.
    """
    n = loop.n
    T = loop.table
    x = np.arange(n)
    top = 2 * max(loop.element_order(e) for e in range(n))
    signs = [(1, x)]
    if is_ip(loop)[0]:
        signs.append((-1, loop.inverses()))
    for sign, base in signs:
        Lp = np.tile(x, (n, 1))  # row x holds L(x)^i as an image array
        Rp = np.tile(x, (n, 1))
        Linv = loop.ldiv_table   # z L(x)^-1 = x \ z, row x
        Rinv = loop.rdiv_table.T  # z R(x)^-1 = z / x, row x
        for i in range(1, top + 1):
            if sign > 0:
                Lp = T[x[:, None], Lp]
                Rp = T[Rp, x[:, None]]
            else:
                Lp = Linv[x[:, None], Lp]
                Rp = Rinv[x[:, None], Rp]
            xi = loop.powers(sign * i)
            bad = (T[xi] != Lp).any(axis=1) | (T[:, xi].T != Rp).any(axis=1)
            if bad.any():
                return False, [int(np.argmax(bad)), sign * i]
    return True, None


def every_element_square(loop):
    return len(set(np.diagonal(loop.table).tolist())) == loop.n


# -- report ----------------------------------------------------------------------

@dataclass
class PropertyReport:
    order: int
    properties: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.properties[name][0]

    def witness(self, name):
        return self.properties[name][1]

    def holding(self):
        return {k for k, (ok, _) in self.properties.items() if ok}


_PREDICATES = {
    "associative": is_associative,
    "commutative": is_commutative_,
    "boolean_group": is_boolean_group,
    "ip": is_ip,
    "flexible": is_flexible,
    "left_alt": is_left_alt,
    "right_alt": is_right_alt,
    "alternative": is_alternative,
    "moufang": is_moufang,
    "c_loop": is_c_loop,
    "extra": is_extra,
    "steiner": is_steiner,
    "rif": is_rif,
    "arif": is_arif,
    "power_associative": is_power_associative,
    "power_alternative": is_power_alternative,
    "diassociative": is_diassociative,
}

# (name, premise properties, conclusion properties, extra premise key)
INCLUSIONS = (
    ("steiner=>rif", ("steiner",), ("rif",)),
    ("moufang=>rif", ("moufang",), ("rif",)),
    ("rif=>arif", ("rif",), ("arif",)),
    ("flexible_c=>arif", ("flexible", "c_loop"), ("arif",)),
    ("arif=>alternative_ip", ("arif",), ("ip", "alternative")),
    ("arif=>power_alternative", ("arif",), ("power_alternative",)),
    ("arif=>diassociative", ("arif",), ("diassociative",)),
    ("diassociative=>ip_flexible_alternative", ("diassociative",), ("ip", "flexible", "alternative")),
    ("odd_arif=>moufang", ("arif", "odd_order"), ("moufang",)),
    ("square_arif=>moufang", ("arif", "all_squares"), ("moufang",)),
    ("c_loop=>alternative_ip", ("c_loop",), ("ip", "alternative")),
    ("extra=>moufang_c", ("extra",), ("moufang", "c_loop")),
    ("associative=>moufang", ("associative",), ("moufang",)),
    ("boolean_group=>steiner", ("boolean_group",), ("steiner", "associative")),
    ("diassociative=>power_alternative", ("diassociative",), ("power_alternative",)),
    ("power_alternative=>power_associative", ("power_alternative",), ("power_associative",)),
    ("steiner=>commutative", ("steiner",), ("commutative",)),
)


def inclusion_violations(report):
    facts = report.holding()
    if report.order % 2 == 1:
        facts.add("odd_order")
    if report.extras.get("all_squares"):
        facts.add("all_squares")
    out = []
    for name, premise, conclusion in INCLUSIONS:
        if all(p in facts for p in premise) and not all(c in facts for c in conclusion):
            out.append(name)
    return out


def classify(loop, check_inclusions=True):
    """Evaluate every property and assert the inclusion diagram on the result."""
    report = PropertyReport(loop.n)
    for name in PROPERTIES:
        report.properties[name] = _PREDICATES[name](loop)
    report.extras["all_squares"] = every_element_square(loop)
    if check_inclusions:
        bad = inclusion_violations(report)
        if bad:
            raise InclusionViolation(f"{loop!r} violates {bad}")
    return report


def report_dict(loop, report, suites=None, name=None):
    """The JSON report structure for one loop."""
    label = name or loop.name or f"sha1:{_digest(loop)}"
    return {
        "loop": label,
        "order": loop.n,
        "properties": {
            k: {"holds": bool(ok), "witness": w} for k, (ok, w) in report.properties.items()
        },
        "suites": suites or {},
    }


def _digest(loop):
    import hashlib
    return hashlib.sha1(loop.table.tobytes()).hexdigest()[:12]
