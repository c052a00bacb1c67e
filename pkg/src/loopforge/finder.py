"""Finite model search for loops: Latin-square completion with propagation.

The search state is a partial Cayley table plus a boolean candidate cube
``cand[r, c, v]``.  Row 0 and column 0 are fixed to the identity.  After every
decision the state is closed under

* Latin rules (a placed value leaves its row and column; naked and hidden
  singles are placed),
* the inverse property, when required (inverse cells are linked),
* ground instances of the constraint identities: both sides are evaluated on
  the partial table, and when one side is known the requirement is pushed
  down the other side until it pins a single cell.

Branching picks the unset cell with the fewest candidates (lowest row, then
column, on ties) and tries its values in increasing order, so node counts are
reproducible.  Forbidden identities are only checked on complete tables, and
every model is re-verified from scratch before it is reported.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import terms
from .errors import InvalidProblem
from .loop import CayleyLoop, isomorphic, loop_fingerprint
from .terms import Identity, Inv, LDiv, Mul, One, RDiv, Var

DEFAULT_NODES = 10 ** 7
DEFAULT_SECONDS = 300.0
MODES = ("first", "count", "enumerate_up_to_iso")


def _env_budget():
    """``LOOPFORGE_BUDGET=<nodes>[:<seconds>]`` overrides the default budget."""
    raw = os.environ.get("LOOPFORGE_BUDGET")
    if not raw:
        return DEFAULT_NODES, DEFAULT_SECONDS
    nodes, _, secs = raw.partition(":")
    return int(nodes), float(secs) if secs else DEFAULT_SECONDS


@dataclass
class SearchProblem:
    order: int
    constraints: list = field(default_factory=list)
    require_ip: bool = False
    require_exponent_two: bool = False
    forbid: list = field(default_factory=list)
    node_budget: int | None = None
    time_budget: float | None = None
    mode: str = "first"
    givens: dict = field(default_factory=dict)  # (row, col) -> value
    propagate_identities: bool = True

    def __post_init__(self):
        if self.order < 1:
            raise InvalidProblem(f"order must be positive, got {self.order}")
        if self.mode not in MODES:
            raise InvalidProblem(f"unknown mode {self.mode!r}")
        for ident in list(self.constraints) + list(self.forbid):
            if not isinstance(ident, Identity):
                raise InvalidProblem(f"not an identity: {ident!r}")
            if _uses_inverse(ident.lhs) or _uses_inverse(ident.rhs):
                if not self.require_ip:
                    raise InvalidProblem(f"{ident} uses ' but the IP is not required")
        for (r, c), v in self.givens.items():
            if not all(0 <= t < self.order for t in (r, c, v)):
                raise InvalidProblem(f"given ({r},{c})={v} out of range")
        env_nodes, env_secs = _env_budget()
        if self.node_budget is None:
            self.node_budget = env_nodes
        if self.time_budget is None:
            self.time_budget = env_secs


def _uses_inverse(t):
    if isinstance(t, Inv):
        return True
    if isinstance(t, (Mul, LDiv, RDiv)):
        return _uses_inverse(t.left) or _uses_inverse(t.right)
    return False


@dataclass
class SearchOutcome:
    status: str                      # "SAT", "UNSAT" or "BUDGET"
    models: list = field(default_factory=list)
    count: int = 0
    stats: dict = field(default_factory=dict)
    reason: str | None = None

    @property
    def sat(self):
        return self.status == "SAT"


class Conflict(Exception):
    def __init__(self, cell=None):
        super().__init__(cell)
        self.cell = cell


class PartialTable:
    """Cells (``-1`` when unset) and the candidate cube."""

    __slots__ = ("n", "cells", "cand")

    def __init__(self, n, cells=None, cand=None):
        self.n = n
        if cells is None:
            cells = np.full((n, n), -1, dtype=np.int64)
            cand = np.ones((n, n, n), dtype=bool)
        self.cells = cells
        self.cand = cand

    @classmethod
    def fresh(cls, n):
        pt = cls(n)
        for x in range(n):
            pt.assign(0, x, x)
            pt.assign(x, 0, x)
        return pt

    def copy(self):
        return PartialTable(self.n, self.cells.copy(), self.cand.copy())

    @property
    def row_masks(self):
        """Values still missing from each row, as bitsets."""
        return [_bits(set(range(self.n)) - set(row[row >= 0].tolist())) for row in self.cells]

    @property
    def col_masks(self):
        return [_bits(set(range(self.n)) - set(col[col >= 0].tolist())) for col in self.cells.T]

    def complete(self):
        return bool((self.cells >= 0).all())

    def remaining(self):
        """Total number of candidate values over unset cells."""
        unset = self.cells < 0
        return int(self.cand[unset].sum())

    def assign(self, r, c, v):
        cur = self.cells[r, c]
        if cur == v:
            return False
        if cur >= 0 or not self.cand[r, c, v]:
            raise Conflict((r, c))
        self.cells[r, c] = v
        self.cand[r, :, v] = False
        self.cand[:, c, v] = False
        self.cand[r, c, :] = False
        self.cand[r, c, v] = True
        return True


def _bits(values):
    out = 0
    for v in values:
        out |= 1 << v
    return out


# -- ground identity propagation -------------------------------------------------

class _Partial:
    """Extended tables over a partial state; index ``n`` means unknown."""

    def __init__(self, pt):
        n = pt.n
        self.n = n
        cells = np.where(pt.cells >= 0, pt.cells, n)
        mul = np.full((n + 1, n + 1), n, dtype=np.int64)
        mul[:n, :n] = cells
        ld = np.full((n + 1, n + 1), n, dtype=np.int64)
        rd = np.full((n + 1, n + 1), n, dtype=np.int64)
        a, c = np.nonzero(pt.cells >= 0)
        b = pt.cells[a, c]
        ld[a, b] = c   # a * c = b
        rd[b, c] = a   # a * c = b, so b / c = a
        self.mul, self.ld, self.rd = mul, ld, rd
        self.inv = ld[:, 0].copy()  # right inverse; two-sided under the IP

    def value(self, t, env, memo):
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Var):
            v = env[t.name]
        elif isinstance(t, One):
            v = np.zeros((), dtype=np.int64)
        elif isinstance(t, Mul):
            v = self.mul[self.value(t.left, env, memo), self.value(t.right, env, memo)]
        elif isinstance(t, LDiv):
            v = self.ld[self.value(t.left, env, memo), self.value(t.right, env, memo)]
        elif isinstance(t, RDiv):
            v = self.rd[self.value(t.left, env, memo), self.value(t.right, env, memo)]
        elif isinstance(t, Inv):
            v = self.inv[self.value(t.arg, env, memo)]
        else:
            raise TypeError(t)
        memo[key] = v
        return v

    def push(self, t, req, env, memo, out):
        """Require ``t == req`` wherever ``req`` is known; collect forced cells."""
        n = self.n
        if not (req < n).any():
            return
        if isinstance(t, Mul):
            a = self.value(t.left, env, memo)
            b = self.value(t.right, env, memo)
            a, b, req = np.broadcast_arrays(a, b, req)
            known = req < n
            both = known & (a < n) & (b < n)
            out.append((a[both], b[both], req[both]))
            only_a = known & (a < n) & (b == n)
            if only_a.any():
                self.push(t.right, np.where(only_a, self.ld[a, req], n), env, memo, out)
            only_b = known & (a == n) & (b < n)
            if only_b.any():
                self.push(t.left, np.where(only_b, self.rd[req, b], n), env, memo, out)
        elif isinstance(t, LDiv):
            # a \ b = req  <=>  a * req = b
            a = self.value(t.left, env, memo)
            b = self.value(t.right, env, memo)
            a, b, req = np.broadcast_arrays(a, b, req)
            known = req < n
            both = known & (a < n) & (b < n)
            out.append((a[both], req[both], b[both]))
            only_a = known & (a < n) & (b == n)
            if only_a.any():
                self.push(t.right, np.where(only_a, self.mul[a, req], n), env, memo, out)
            only_b = known & (a == n) & (b < n)
            if only_b.any():
                self.push(t.left, np.where(only_b, self.rd[b, req], n), env, memo, out)
        elif isinstance(t, RDiv):
            # b / a = req  <=>  req * a = b
            b = self.value(t.left, env, memo)
            a = self.value(t.right, env, memo)
            a, b, req = np.broadcast_arrays(a, b, req)
            known = req < n
            both = known & (a < n) & (b < n)
            out.append((req[both], a[both], b[both]))
            only_a = known & (a < n) & (b == n)
            if only_a.any():
                self.push(t.left, np.where(only_a, self.mul[req, a], n), env, memo, out)
            only_b = known & (a == n) & (b < n)
            if only_b.any():
                self.push(t.right, np.where(only_b, self.ld[req, b], n), env, memo, out)
        elif isinstance(t, Inv):
            a = self.value(t.arg, env, memo)
            a, req = np.broadcast_arrays(a, req)
            known = req < n
            both = known & (a < n)
            out.append((a[both], req[both], np.zeros(int(both.sum()), dtype=np.int64)))
            rest = known & (a == n)
            if rest.any():
                self.push(t.arg, np.where(rest, self.inv[req], n), env, memo, out)
        elif isinstance(t, One):
            req = np.broadcast_to(req, req.shape)
            if ((req < n) & (req != 0)).any():
                raise Conflict()
        # a bare variable is fixed by the instance; the value comparison catches it


_CHUNK = 1 << 16


def _identity_forces(part, identity):
    """Forced (row, col, value) arrays from every ground instance of ``identity``."""
    n = part.n
    names = identity.vars
    k = len(names)
    lead = 0
    while lead < k and n ** (k - lead) > _CHUNK:
        lead += 1
    rest = k - lead
    grids = {}
    for pos, name in enumerate(names[lead:]):
        view = [1] * rest
        view[pos] = n
        grids[name] = np.arange(n).reshape(view)
    shape = (n,) * rest
    out = []
    for prefix in np.ndindex(*((n,) * lead)):
        env = dict(grids)
        env.update({name: np.int64(v) for name, v in zip(names, prefix)})
        memo = {}
        lhs = np.broadcast_to(part.value(identity.lhs, env, memo), shape)
        rhs = np.broadcast_to(part.value(identity.rhs, env, memo), shape)
        if ((lhs < n) & (rhs < n) & (lhs != rhs)).any():
            raise Conflict()
        part.push(identity.rhs, np.where(rhs == n, lhs, n), env, memo, out)
        part.push(identity.lhs, np.where(lhs == n, rhs, n), env, memo, out)
    return out


def _ip_forces(pt):
    """Inverse-property links: x*y = 0 => y*x = 0, and x*y = z gives
    x^-1 * z = y and z * y^-1 = x once the inverses are known."""
    n = pt.n
    cells = pt.cells
    rows, cols = np.nonzero(cells >= 0)
    vals = cells[rows, cols]
    J = np.full(n, -1)
    zr, zc = np.nonzero(cells == 0)
    J[zr] = zc
    J[zc] = zr
    out = [(zc, zr, np.zeros(len(zr), dtype=np.int64))]
    jr = J[rows]
    m = jr >= 0
    out.append((jr[m], vals[m], cols[m]))
    jc = J[cols]
    m = jc >= 0
    out.append((vals[m], jc[m], rows[m]))
    return out


def propagate(pt, problem, use_identities=None):
    """Close ``pt`` under the propagation rules; raises Conflict.  Returns the
    number of cells placed."""
    n = pt.n
    use_identities = problem.propagate_identities if use_identities is None else use_identities
    placed = 0
    while True:
        before = placed
        counts = pt.cand.sum(axis=2)
        if (counts == 0).any():
            raise Conflict(tuple(int(v) for v in np.argwhere(counts == 0)[0]))
        # naked singles
        for r, c in np.argwhere((counts == 1) & (pt.cells < 0)):
            v = int(np.argmax(pt.cand[r, c]))
            placed += pt.assign(int(r), int(c), v)
        # hidden singles in rows and columns
        for axis in (1, 0):
            places = pt.cand.sum(axis=axis)   # [row or col, value]
            if (places == 0).any():
                raise Conflict()
            for line, v in np.argwhere(places == 1):
                if axis == 1:
                    c = int(np.argmax(pt.cand[line, :, v]))
                    placed += pt.assign(int(line), c, int(v))
                else:
                    r = int(np.argmax(pt.cand[:, line, v]))
                    placed += pt.assign(r, int(line), int(v))
        forces = []
        if problem.require_ip:
            forces += _ip_forces(pt)
        if use_identities and problem.constraints:
            part = _Partial(pt)
            for ident in problem.constraints:
                forces += _identity_forces(part, ident)
        for rr, cc, vv in forces:
            for r, c, v in zip(rr.tolist(), cc.tolist(), vv.tolist()):
                if r >= n or c >= n or v >= n:
                    continue
                placed += pt.assign(r, c, v)
        if placed == before:
            return placed


def branching(pt):
    """The unset cell with fewest candidates; lowest (row, col) on ties."""
    counts = pt.cand.sum(axis=2).astype(np.int64)
    counts[pt.cells >= 0] = pt.n + 1
    flat = int(np.argmin(counts))
    return divmod(flat, pt.n)


# -- verification ----------------------------------------------------------------

def verify(loop, problem):
    """Independent check of a complete table against every requirement."""
    from .varieties import is_ip
    if problem.require_ip and not is_ip(loop)[0]:
        return False
    if problem.require_exponent_two and (np.diagonal(loop.table) != 0).any():
        return False
    for (r, c), v in problem.givens.items():
        if loop.table[r, c] != v:
            return False
    for ident in problem.constraints:
        if not terms.holds(loop, ident).holds:
            return False
    for ident in problem.forbid:
        if terms.holds(loop, ident).holds:
            return False
    return True


# -- search ----------------------------------------------------------------------

class _Budget(Exception):
    pass


class _Search:
    def __init__(self, problem):
        self.p = problem
        self.nodes = 0
        self.propagations = 0
        self.count = 0
        self.models = []
        self.buckets = {}
        self.start = time.monotonic()

    def tick(self):
        self.nodes += 1
        if self.nodes > self.p.node_budget:
            raise _Budget()
        if self.nodes % 256 == 0 and time.monotonic() - self.start > self.p.time_budget:
            raise _Budget()

    def leaf(self, pt):
        loop = CayleyLoop(pt.cells.copy())
        if not verify(loop, self.p):
            return False
        self.count += 1
        mode = self.p.mode
        if mode == "first":
            self.models.append(loop)
            return True
        if mode == "enumerate_up_to_iso":
            key = loop_fingerprint(loop)
            bucket = self.buckets.setdefault(key, [])
            if not any(isomorphic(loop, other) for other in bucket):
                bucket.append(loop)
                self.models.append(loop)
        return False

    def run(self, pt):
        """Depth-first search; True stops the whole search (first mode)."""
        try:
            self.propagations += 1
            propagate(pt, self.p)
        except Conflict:
            return False
        if pt.complete():
            return self.leaf(pt)
        r, c = branching(pt)
        for v in np.flatnonzero(pt.cand[r, c]).tolist():
            self.tick()
            child = pt.copy()
            child.assign(r, c, v)
            if self.run(child):
                return True
        return False


def initial_table(problem):
    n = problem.order
    pt = PartialTable.fresh(n)
    if problem.require_exponent_two:
        for x in range(n):
            pt.assign(x, x, 0)
    for (r, c), v in sorted(problem.givens.items()):
        pt.assign(r, c, v)
    return pt


def solve(problem):
    """Run the search described by ``problem``."""
    n = problem.order
    search = _Search(problem)

    def outcome(status, reason=None):
        stats = {"nodes": search.nodes, "propagations": search.propagations,
                 "time": time.monotonic() - search.start}
        return SearchOutcome(status, list(search.models), search.count, stats, reason)

    if problem.require_ip and problem.require_exponent_two and n > 1 and n % 2 == 1:
        # here x^-1 = x, so the non-identity elements other than x split into
        # pairs {y, xy}; n - 2 is even
        return outcome("UNSAT", "an IP loop of exponent two has even order or order one")
    try:
        pt = initial_table(problem)
    except Conflict:
        return outcome("UNSAT", "the givens contradict the fixed identity row and column")
    try:
        search.run(pt)
    except _Budget:
        return outcome("BUDGET", "node or time budget exhausted")
    if search.count:
        return outcome("SAT")
    return outcome("UNSAT")


# -- problem files ---------------------------------------------------------------

def parse_problem(text, **overrides):
    """``n = <int>``, identity lines, ``forbid:`` lines and ``flag: ip|exp2``."""
    order = None
    constraints, forbid = [], []
    flags = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition("=")
        if order is None and sep and head.strip() == "n":
            try:
                order = int(rest)
            except ValueError:
                raise InvalidProblem(f"line {lineno}: bad order {rest.strip()!r}") from None
            continue
        if line.startswith("flag:"):
            for flag in line[5:].replace(",", " ").split():
                if flag not in ("ip", "exp2"):
                    raise InvalidProblem(f"line {lineno}: unknown flag {flag!r}")
                flags.add(flag)
            continue
        target = constraints
        if line.startswith("forbid:"):
            target, line = forbid, line[7:].strip()
        name, sep, body = line.partition(":")
        if sep and "=" not in name:
            ident = terms.parse_identity(body.strip(), name=name.strip())
        else:
            ident = terms.parse_identity(line)
        target.append(ident)
    if order is None:
        raise InvalidProblem("missing 'n = <int>' line")
    return SearchProblem(order, constraints, "ip" in flags, "exp2" in flags, forbid, **overrides)


def load_problem(path, **overrides):
    return parse_problem(Path(path).read_text(), **overrides)
