"""Permutations of loop elements, translation maps and their groups.

Composition is diagrammatic throughout: ``compose(p, q)`` applies ``p``
first, then ``q``, so ``i compose(p, q) == (i p) q``.  This matches writing
maps on the right, as in ``T(x) = R(x) L(x)^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, DegreeMismatch

DEFAULT_CAP = 10 ** 6


class Permutation:
    """An immutable bijection on ``0..n-1`` stored as an image array."""

    __slots__ = ("images", "_key")

    def __init__(self, images, check=True):
        arr = np.array(images, dtype=np.int64)
        if check and not np.array_equal(np.sort(arr), np.arange(len(arr))):
            raise ValueError(f"not a permutation: {arr.tolist()}")
        arr.setflags(write=False)
        self.images = arr
        self._key = arr.tobytes()

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n), check=False)

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, i):
        return int(self.images[i])

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __mul__(self, other):
        return compose(self, other)

    def __invert__(self):
        return invert(self)

    def __pow__(self, k):
        base = self if k >= 0 else invert(self)
        out = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            out = compose(out, base)
        return out

    def is_identity(self):
        return bool((self.images == np.arange(self.degree)).all())

    def fixes(self, i):
        return int(self.images[i]) == i

    def cycles(self):
        """Cycle notation, fixed points omitted; ``()`` for the identity."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc, j = [], start
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = int(self.images[j])
            out.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(out) or "()"

    def __repr__(self):
        return f"Permutation({self.images.tolist()})"

    def __str__(self):
        return " ".join(map(str, self.images.tolist()))


def compose(p, q):
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees {p.degree} and {q.degree}")
    return Permutation(q.images[p.images], check=False)


def invert(p):
    inv = np.empty_like(p.images)
    inv[p.images] = np.arange(p.degree)
    return Permutation(inv, check=False)


# -- translations --------------------------------------------------------------

def L_map(loop, x):
    """y -> x*y."""
    return Permutation(loop.table[x], check=False)


def R_map(loop, x):
    """y -> y*x."""
    return Permutation(loop.table[:, x], check=False)


def P_map(loop, x):
    """L(x) then R(x): y -> (x*y)*x."""
    return compose(L_map(loop, x), R_map(loop, x))


def inner_generator_blocks(loop, rows=None):
    """Yield ``(labels, images)`` blocks covering every T(x), L(x,y), R(x,y).

    Blocks hold ``rows`` x-values at a time so large loops stay in memory.
    """
    n = loop.n
    rows = rows or max(1, (1 << 21) // (n * n))
    T, LD, RD = loop.table, loop.ldiv_table, loop.rdiv_table
    z = np.arange(n)
    # T(x) = R(x) L(x)^-1 : z -> x \ (z x)
    yield [f"T({x})" for x in range(n)], LD[z[:, None], T[z[None, :], z[:, None]]]
    y = z[None, :, None]
    zz = z[None, None, :]
    for start in range(0, n, rows):
        x = z[start:start + rows, None, None]
        labels = [f"L({a},{b})" for a in range(start, min(n, start + rows)) for b in range(n)]
        # L(x,y) = L(x) L(y) L(yx)^-1 : z -> (yx) \ (y (x z))
        yield labels, LD[T[y, x], T[y, T[x, zz]]].reshape(-1, n)
    for start in range(0, n, rows):
        x = z[start:start + rows, None, None]
        labels = [f"R({a},{b})" for a in range(start, min(n, start + rows)) for b in range(n)]
        # R(x,y) = R(x) R(y) R(xy)^-1 : z -> ((z x) y) / (x y)
        yield labels, RD[T[T[zz, x], y], T[x, y]].reshape(-1, n)


def inner_generator_arrays(loop):
    """Labels and an (2n^2 + n, n) image array of every T(x), L(x,y), R(x,y)."""
    labels, arrays = [], []
    for lab, arr in inner_generator_blocks(loop):
        labels += lab
        arrays.append(arr)
    return labels, np.concatenate(arrays)


def inner_generators(loop):
    labels, arrays = inner_generator_arrays(loop)
    return [(lab, Permutation(row, check=False)) for lab, row in zip(labels, arrays)]


def j_perm(loop):
    return Permutation(loop.inverses(), check=False)


def conj_by_j(loop, p):
    """J p J, i.e. i -> ((i^-1) p)^-1."""
    J = loop.inverses()
    return Permutation(J[p.images[J]], check=False)


def is_rif_inner(loop, full=False, cap=DEFAULT_CAP):
    """Do all inner mappings commute with J?

    Returns ``(holds, witness_label)``.  Checking generators suffices because
    conjugation by J is an automorphism of the permutation group; ``full=True``
    checks every element of the closed inner mapping group instead.
    """
    J = loop.inverses()
    if full:
        group = mlt1(loop, cap=cap).closure()
        for p in sorted(group.elements, key=lambda q: q._key):
            if not np.array_equal(J[p.images[J]], p.images):
                return False, p.cycles()
        return True, None
    for labels, maps in inner_generator_blocks(loop):
        bad = (J[maps[:, J]] != maps).any(axis=1)
        if bad.any():
            return False, labels[int(np.argmax(bad))]
    return True, None


# -- groups --------------------------------------------------------------------

@dataclass
class GeneratedGroup:
    """A permutation group given by generators; elements filled by ``closure``."""

    degree: int
    generators: list
    cap: int = DEFAULT_CAP
    elements: set | None = field(default=None, repr=False)
    _chain: "StabilizerChain | None" = field(default=None, repr=False)

    def closure(self):
        """Enumerate every element by breadth-first products (at most ``cap``)."""
        if self.elements is not None:
            return self
        n = self.degree
        gens = _unique_arrays(self.generators, n)
        ident = np.arange(n)
        seen = {ident.tobytes()}
        found = [ident]
        frontier = ident[None, :]
        while len(frontier):
            fresh = []
            for g in gens:
                for row in g[frontier]:
                    key = row.tobytes()
                    if key not in seen:
                        seen.add(key)
                        fresh.append(row)
                        if len(seen) > self.cap:
                            raise CapExceeded(len(seen))
            found.extend(fresh)
            frontier = np.array(fresh) if fresh else np.empty((0, n), dtype=np.int64)
        self.elements = {Permutation(row, check=False) for row in found}
        return self

    def chain(self):
        if self._chain is None:
            self._chain = StabilizerChain(self.degree, [g.images for g in self.generators])
        return self._chain

    def order(self):
        if self.elements is not None:
            return len(self.elements)
        return self.chain().order()

    def __contains__(self, p):
        if self.elements is not None:
            return p in self.elements
        return self.chain().contains(p.images)


def _unique_arrays(perms, n):
    rows = {}
    for p in perms:
        images = p.images if isinstance(p, Permutation) else np.asarray(p)
        if not np.array_equal(images, np.arange(n)):
            rows.setdefault(images.tobytes(), images)
    return list(rows.values())


def mlt(loop, cap=DEFAULT_CAP):
    gens = [L_map(loop, x) for x in range(loop.n)] + [R_map(loop, x) for x in range(loop.n)]
    return GeneratedGroup(loop.n, _dedupe(gens), cap)


def mlt1(loop, cap=DEFAULT_CAP):
    return GeneratedGroup(loop.n, _dedupe(p for _, p in inner_generators(loop)), cap)


def _dedupe(perms):
    out, seen = [], set()
    for p in perms:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def schreier_stabilizer(group, point=0):
    """Stabilizer of ``point`` generated by Schreier generators.

    Uses an orbit transversal: for each orbit point b with coset
    representative u_b and generator s, u_b s u_{b s}^-1 fixes ``point``.
    """
    n = group.degree
    transversal = {point: np.arange(n)}
    queue = [point]
    gens = [g.images for g in group.generators]
    while queue:
        b = queue.pop(0)
        for s in gens:
            c = int(s[b])
            if c not in transversal:
                transversal[c] = s[transversal[b]]
                queue.append(c)
    schreier = []
    for b, u in transversal.items():
        for s in gens:
            us = s[u]
            v = transversal[int(s[b])]
            v_inv = np.empty_like(v)
            v_inv[v] = np.arange(n)
            schreier.append(Permutation(v_inv[us], check=False))
    return GeneratedGroup(n, _dedupe(schreier), group.cap)


def same_group(g1, g2):
    """Mutual containment of generators, via stabilizer chains."""
    return all(p in g2 for p in g1.generators) and all(p in g1 for p in g2.generators)


class StabilizerChain:
    """Deterministic Schreier-Sims base and strong generating set.

    Only meant for the small degrees used here (up to a few dozen points).
    Permutations are tuples composed diagrammatically.
    """

    def __init__(self, n, generators):
        self.n = n
        self.identity = tuple(range(n))
        self.base = []
        self.strong = []       # strong[i]: generators fixing base[:i]
        self.transversal = []  # transversal[i]: orbit point -> perm taking base[i] there
        for g in generators:
            self._insert(tuple(int(v) for v in g))
        self._complete()

    @staticmethod
    def _mul(p, q):
        return tuple(q[i] for i in p)

    @staticmethod
    def _inv(p):
        out = [0] * len(p)
        for i, v in enumerate(p):
            out[v] = i
        return tuple(out)

    def strip(self, g, start=0):
        for i in range(start, len(self.base)):
            x = g[self.base[i]]
            u = self.transversal[i].get(x)
            if u is None:
                return g, i
            g = self._mul(g, self._inv(u))
        return g, len(self.base)

    def _insert(self, g, start=0):
        h, level = self.strip(g, start)
        if h == self.identity:
            return False
        if level == len(self.base):
            moved = next(i for i in range(self.n) if h[i] != i)
            self.base.append(moved)
            self.strong.append([])
            self.transversal.append({moved: self.identity})
        for j in range(start, level + 1):
            self.strong[j].append(h)
            self._orbit(j)
        return True

    def _orbit(self, i):
        trans = self.transversal[i]
        queue = list(trans)
        while queue:
            b = queue.pop()
            for s in self.strong[i]:
                c = s[b]
                if c not in trans:
                    trans[c] = self._mul(trans[b], s)
                    queue.append(c)

    def _complete(self):
        changed = True
        while changed:
            changed = False
            for i in range(len(self.base) - 1, -1, -1):
                for b, u in list(self.transversal[i].items()):
                    for s in list(self.strong[i]):
                        us = self._mul(u, s)
                        sg = self._mul(us, self._inv(self.transversal[i][us[self.base[i]]]))
                        if self._insert(sg, i + 1):
                            changed = True
                if changed:
                    break

    def order(self):
        out = 1
        for t in self.transversal:
            out *= len(t)
        return out

    def contains(self, images):
        g = tuple(int(v) for v in images)
        h, level = self.strip(g)
        return level == len(self.base) and h == self.identity
