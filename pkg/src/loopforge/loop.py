"""Finite loops stored as Cayley tables.

Element ``0`` is always the identity.  Tables are held as read-only numpy
arrays together with the two division tables, so every operation below is a
lookup.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NoIdentityAtZero, NotAGroup, NotIP, NotLatin

__all__ = [
    "CayleyLoop",
    "SubloopClosure",
    "from_table",
    "parse_loop",
    "serialize_loop",
    "load_loop",
    "normalize",
    "subloop_closure",
    "nucleus",
    "direct_product",
    "opposite",
    "chein_double",
    "is_associative",
    "associativity_witness",
    "is_commutative",
    "is_boolean_group",
    "isomorphic",
    "find_isomorphism",
    "trivial_loop",
    "cyclic_group",
    "boolean_group",
    "symmetric_group",
]


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class CayleyLoop:
    """A validated loop of order ``n`` with identity ``0``.

    Instances are immutable.  ``name`` and ``comments`` are labels only and
    take no part in equality.
    """

    __slots__ = ("table", "ldiv_table", "rdiv_table", "n", "name", "comments")

    def __init__(self, table, name=None, comments=()):
        table = np.asarray(table)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise NotLatin("table is not square")
        n = table.shape[0]
        if n < 1:
            raise NotLatin("empty table")
        if table.min() < 0 or table.max() >= n:
            bad = np.argwhere((table < 0) | (table >= n))[0]
            raise NotLatin(f"entry out of range at ({bad[0]}, {bad[1]})", row=int(bad[0]), col=int(bad[1]))
        _check_latin(table)
        ident = np.arange(n)
        if not (np.array_equal(table[0], ident) and np.array_equal(table[:, 0], ident)):
            raise NoIdentityAtZero("row 0 and column 0 must be the identity map")

        rows = np.arange(n)[:, None]
        ldiv = np.empty_like(table)
        ldiv[rows, table] = np.arange(n)[None, :]  # a * ldiv[a, b] = b
        rdiv = np.empty_like(table)
        rdiv[table, np.arange(n)[None, :]] = rows  # rdiv[b, a] * a = b

        self.table = _frozen(table)
        self.ldiv_table = _frozen(ldiv)
        self.rdiv_table = _frozen(rdiv)
        self.n = n
        self.name = name
        self.comments = tuple(comments)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<CayleyLoop{label} order={self.n}>"

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, CayleyLoop) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def elements(self):
        return range(self.n)

    def mul(self, a, b):
        return int(self.table[a, b])

    def ldiv(self, a, b):
        """The unique x with a*x = b."""
        return int(self.ldiv_table[a, b])

    def rdiv(self, b, a):
        """The unique x with x*a = b."""
        return int(self.rdiv_table[b, a])

    def left_inverse(self, x):
        """Solves z*x = 1."""
        return int(self.rdiv_table[0, x])

    def right_inverse(self, x):
        """Solves x*z = 1."""
        return int(self.ldiv_table[x, 0])

    def inverse(self, x):
        lft, rgt = self.left_inverse(x), self.right_inverse(x)
        if lft != rgt:
            raise NotIP(f"element {x} has left inverse {lft} but right inverse {rgt}")
        return lft

    def inverses(self):
        """Array of two-sided inverses; raises NotIP if any side differs."""
        lft = self.rdiv_table[0]
        rgt = self.ldiv_table[:, 0]
        if not np.array_equal(lft, rgt):
            x = int(np.argmax(lft != rgt))
            raise NotIP(f"element {x} has left inverse {lft[x]} but right inverse {rgt[x]}")
        return lft

    def power(self, x, k):
        """Right-associated power ``1 L(x)^k``; negative k goes through L(x^-1)."""
        if k < 0:
            x = self.inverse(x)
            k = -k
        p = 0
        for _ in range(k):
            p = int(self.table[x, p])
        return p

    def powers(self, k, xs=None):
        """Vectorised ``power`` over ``xs`` (default: every element)."""
        xs = np.arange(self.n) if xs is None else np.asarray(xs)
        if k < 0:
            xs = self.inverses()[xs]
            k = -k
        p = np.zeros_like(xs)
        for _ in range(k):
            p = self.table[xs, p]
        return p

    def element_order(self, x):
        """Period of the orbit of 0 under L(x).

        L(x) is a permutation, so the orbit is a cycle and this always
        terminates; it is the group-theoretic order only when <x> is a group.
        """
        p, k = int(self.table[x, 0]), 1
        while p != 0:
            p = int(self.table[x, p])
            k += 1
        return k


def _check_latin(table):
    n = table.shape[0]
    for axis, what in ((1, "row"), (0, "column")):
        s = np.sort(table, axis=axis)
        ok = (s == np.arange(n)[None, :]) if axis == 1 else (s == np.arange(n)[:, None])
        bad = ~ok.all(axis=axis)
        if bad.any():
            i = int(np.argmax(bad))
            line = table[i] if axis == 1 else table[:, i]
            vals, counts = np.unique(line, return_counts=True)
            dup = int(vals[np.argmax(counts > 1)])
            if axis == 1:
                raise NotLatin(f"row {i} repeats value {dup}", row=i)
            raise NotLatin(f"column {i} repeats value {dup}", col=i)


def from_table(rows, name=None):
    """Build a loop from a square grid, validating the Latin and identity laws."""
    try:
        arr = np.array(rows, dtype=np.int64)
    except ValueError as exc:
        raise NotLatin("table is not square") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotLatin("table is not square")
    return CayleyLoop(arr, name=name)


def normalize(rows, name=None):
    """Relabel a table with some two-sided identity so that it sits at 0."""
    arr = np.array(rows, dtype=np.int64)
    n = arr.shape[0]
    ident = np.arange(n)
    for e in range(n):
        if np.array_equal(arr[e], ident) and np.array_equal(arr[:, e], ident):
            break
    else:
        raise NoIdentityAtZero("table has no two-sided identity")
    perm = np.arange(n)
    perm[[0, e]] = perm[[e, 0]]
    return CayleyLoop(perm[arr[np.ix_(perm, perm)]], name=name)


# -- text format -----------------------------------------------------------

def parse_loop(text, name=None):
    """Parse the loop table text format (``n`` then ``n`` rows; ``#`` comments)."""
    comments = []
    payload = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        payload.append(line)
    if not payload:
        raise NotLatin("empty loop file")
    try:
        n = int(payload[0])
        rows = [[int(tok) for tok in line.split()] for line in payload[1:]]
    except ValueError as exc:
        raise NotLatin(f"non-integer entry: {exc}") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise NotLatin(f"expected {n} rows of {n} entries")
    loop = from_table(rows, name=name)
    return CayleyLoop(loop.table, name=name, comments=comments)


def serialize_loop(loop):
    width = len(str(loop.n - 1))
    lines = [f"# {c}" if c else "#" for c in loop.comments]
    lines.append(str(loop.n))
    lines.extend(" ".join(str(v).rjust(width) for v in row) for row in loop.table.tolist())
    return "\n".join(lines) + "\n"


def load_loop(path, name=None):
    path = Path(path)
    return parse_loop(path.read_text(), name=name or path.stem)


# -- structure ---------------------------------------------------------------

@dataclass(frozen=True)
class SubloopClosure:
    elements: tuple
    generators: tuple

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.elements


def subloop_closure(loop, seed=()):
    """Least subset containing ``seed`` and 0, closed under *, \\ and /."""
    generators = tuple(sorted(set(int(s) for s in seed)))
    current = np.unique(np.array((0,) + generators, dtype=np.int64))
    while True:
        a, b = current[:, None], current[None, :]
        grown = np.unique(np.concatenate([
            current,
            loop.table[a, b].ravel(),
            loop.ldiv_table[a, b].ravel(),
            loop.rdiv_table[a, b].ravel(),
        ]))
        if len(grown) == len(current):
            return SubloopClosure(tuple(int(v) for v in current), generators)
        current = grown


def sub_table(loop, elements):
    """The Cayley table of a subloop, relabelled to 0..k-1 in sorted order."""
    elems = np.asarray(sorted(elements))
    index = np.full(loop.n, -1)
    index[elems] = np.arange(len(elems))
    return index[loop.table[np.ix_(elems, elems)]]


def nucleus(loop):
    """Elements lying in the left, middle and right nucleus at once."""
    T = loop.table
    out = []
    for a in range(loop.n):
        # a(xy) = (ax)y
        if not np.array_equal(T[a, T], T[T[a]]):
            continue
        # x(ay) = (xa)y
        if not np.array_equal(T[:, T[a]], T[T[:, a]]):
            continue
        # x(ya) = (xy)a
        if not np.array_equal(T[:, T[:, a]], T[T, a]):
            continue
        out.append(a)
    return out


def associativity_witness(loop):
    """First (x, y, z) in lex order with (xy)z != x(yz), or None."""
    T = loop.table
    for x in range(loop.n):
        bad = T[T[x]] != T[x, T]
        if bad.any():
            y, z = np.unravel_index(int(np.argmax(bad)), bad.shape)
            return x, int(y), int(z)
    return None


def is_associative(loop):
    return associativity_witness(loop) is None


def is_commutative(loop):
    return bool(np.array_equal(loop.table, loop.table.T))


def is_boolean_group(loop):
    return bool((np.diagonal(loop.table) == 0).all()) and is_associative(loop)


# -- constructions -----------------------------------------------------------

def direct_product(l1, l2, name=None):
    """Componentwise product; the pair (a, b) gets index a*n2 + b."""
    n1, n2 = l1.n, l2.n
    t = l1.table[:, None, :, None] * n2 + l2.table[None, :, None, :]
    if name is None and l1.name and l2.name:
        name = f"{l1.name} x {l2.name}"
    return CayleyLoop(t.reshape(n1 * n2, n1 * n2), name=name)


def opposite(loop, name=None):
    return CayleyLoop(loop.table.T, name=name)


def chein_double(group, name=None):
    """The Moufang loop M(G, 2) on G and a coset Gu.

    Index g < n stands for g, index n + g for gu.
    """
    if not is_associative(group):
        raise NotAGroup("chein_double needs an associative input")
    n = group.n
    G = group.table
    inv = group.inverses()
    t = np.empty((2 * n, 2 * n), dtype=np.int64)
    g = np.arange(n)[:, None]
    h = np.arange(n)[None, :]
    t[:n, :n] = G                          # g * h = gh
    t[:n, n:] = n + G[h, g]                # g * hu = (hg)u
    t[n:, :n] = n + G[g, inv[h]]           # gu * h = (g h^-1)u
    t[n:, n:] = G[inv[h], g]               # gu * hu = h^-1 g
    return CayleyLoop(t, name=name)


def trivial_loop():
    return CayleyLoop([[0]], name="trivial")


def cyclic_group(n):
    a = np.arange(n)
    return CayleyLoop((a[:, None] + a[None, :]) % n, name=f"Z{n}")


def boolean_group(k):
    """Z2^k, elements encoded as bit vectors."""
    a = np.arange(2 ** k)
    name = "Z2" if k == 1 else f"Z2^{k}"
    return CayleyLoop(a[:, None] ^ a[None, :], name=name)


def symmetric_group(m):
    """S_m acting on 0..m-1; index 0 is the identity permutation."""
    perms = list(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(perms)}
    # diagrammatic product: apply p then q
    t = [[index[tuple(q[p[i]] for i in range(m))] for q in perms] for p in perms]
    return CayleyLoop(t, name=f"S{m}")


# -- isomorphism -------------------------------------------------------------

def _cycle_type(perm):
    seen = np.zeros(len(perm), dtype=bool)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        k, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            k += 1
        lengths.append(k)
    return tuple(sorted(lengths))


def element_invariants(loop):
    """Per-element isomorphism invariants: cycle types of L(x) and R(x)."""
    T = loop.table
    return [(_cycle_type(T[x]), _cycle_type(T[:, x]), int(T[x, x] == 0)) for x in range(loop.n)]


def loop_fingerprint(loop):
    """An isomorphism invariant usable as a dictionary key."""
    return (loop.n, tuple(sorted(element_invariants(loop))))


def _generating_sequence(loop):
    gens, span = [], {0}
    for x in range(loop.n):
        if x not in span:
            gens.append(x)
            span = set(subloop_closure(loop, gens).elements)
            if len(span) == loop.n:
                break
    return gens


def _extend(l1, l2, phi):
    """Propagate a partial map through products and divisions; None on clash."""
    n = l1.n
    image_of = dict(phi)
    used = {v: k for k, v in image_of.items()}
    frontier = list(image_of)
    tables = ((l1.table, l2.table), (l1.ldiv_table, l2.ldiv_table), (l1.rdiv_table, l2.rdiv_table))
    while frontier:
        new = []
        domain = list(image_of)
        for a in frontier:
            for b in domain:
                for t1, t2 in tables:
                    for x, y in ((a, b), (b, a)):
                        src = int(t1[x, y])
                        dst = int(t2[image_of[x], image_of[y]])
                        have = image_of.get(src)
                        if have is None:
                            if dst in used:
                                return None
                            image_of[src] = dst
                            used[dst] = src
                            new.append(src)
                            domain.append(src)
                        elif have != dst:
                            return None
        frontier = new
    if len(image_of) != n:
        return None
    perm = np.array([image_of[i] for i in range(n)])
    if not np.array_equal(perm[l1.table], l2.table[perm[:, None], perm[None, :]]):
        return None
    return perm


def find_isomorphism(l1, l2):
    """A bijection ``perm`` with perm[a*b] = perm[a]*perm[b], or None."""
    if l1.n != l2.n:
        return None
    inv1, inv2 = element_invariants(l1), element_invariants(l2)
    if sorted(inv1) != sorted(inv2):
        return None
    gens = _generating_sequence(l1)
    candidates = [[y for y in range(l2.n) if inv2[y] == inv1[g]] for g in gens]

    def search(i, phi):
        if i == len(gens):
            return _extend(l1, l2, phi)
        for y in candidates[i]:
            if y in phi.values():
                continue
            phi[gens[i]] = y
            if _partial_ok(l1, l2, phi):
                found = search(i + 1, phi)
                if found is not None:
                    return found
            del phi[gens[i]]
        return None

    return search(0, {0: 0})


def _partial_ok(l1, l2, phi):
    # one round of products among the mapped elements must stay injective
    image_of = dict(phi)
    used = set(image_of.values())
    if len(used) != len(image_of):
        return False
    for a, b in itertools.product(list(phi), repeat=2):
        src = int(l1.table[a, b])
        dst = int(l2.table[image_of[a], image_of[b]])
        have = image_of.get(src)
        if have is None:
            if dst in used:
                return False
            image_of[src] = dst
            used.add(dst)
        elif have != dst:
            return False
    return True


def isomorphic(l1, l2):
    return find_isomorphism(l1, l2) is not None
