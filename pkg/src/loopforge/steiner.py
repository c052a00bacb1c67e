"""Steiner triple systems and their Steiner loops.

A system on points ``0..v-1`` becomes a loop on ``0..v`` by shifting every
point up by one and adjoining the identity as element 0.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSystem, NotSteiner
from .loop import CayleyLoop


@dataclass(frozen=True)
class TripleSystem:
    v: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(int(p) for p in b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)


@dataclass
class ValidationReport:
    missing: list = field(default_factory=list)
    duplicated: list = field(default_factory=list)
    malformed: list = field(default_factory=list)

    @property
    def ok(self):
        return not (self.missing or self.duplicated or self.malformed)

    def __str__(self):
        if self.ok:
            return "ok"
        parts = []
        if self.malformed:
            parts.append(f"malformed blocks {self.malformed}")
        if self.missing:
            parts.append(f"pairs missing {self.missing}")
        if self.duplicated:
            parts.append(f"pairs duplicated {self.duplicated}")
        return "; ".join(parts)


def validate(ts):
    report = ValidationReport()
    counts = Counter()
    for b in ts.blocks:
        if len(set(b)) != 3 or not all(0 <= p < ts.v for p in b):
            report.malformed.append(b)
            continue
        counts.update(itertools.combinations(b, 2))
    for pair in itertools.combinations(range(ts.v), 2):
        c = counts.get(pair, 0)
        if c == 0:
            report.missing.append(pair)
        elif c > 1:
            report.duplicated.append(pair)
    return report


def z13_system():
    """The cyclic STS(13) with base blocks {0, 2, 8} and {0, 3, 4}."""
    blocks = [{n % 13, (n + 2) % 13, (n + 8) % 13} for n in range(13)]
    blocks += [{n % 13, (n + 3) % 13, (n + 4) % 13} for n in range(13)]
    return TripleSystem(13, blocks)


def fano_system():
    return TripleSystem(7, [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 0), (5, 6, 1), (6, 0, 2)])


def sts9_system():
    """Lines of the affine plane on a 3x3 grid (point 3r + c)."""
    pts = [(r, c) for r in range(3) for c in range(3)]
    blocks = set()
    for p, q in itertools.combinations(pts, 2):
        third = ((-p[0] - q[0]) % 3, (-p[1] - q[1]) % 3)
        blocks.add(frozenset(3 * r + c for r, c in (p, q, third)))
    return TripleSystem(9, blocks)


def steiner_loop(ts, name=None):
    report = validate(ts)
    if not report.ok:
        raise InvalidSystem(str(report))
    n = ts.v + 1
    table = np.zeros((n, n), dtype=np.int64)
    table[0] = table[:, 0] = np.arange(n)
    for b in ts.blocks:
        for x, y, z in itertools.permutations(b):
            table[x + 1, y + 1] = z + 1
    return CayleyLoop(table, name=name)


def loop_to_system(loop):
    T = loop.table
    J = loop.rdiv_table[0]
    if not ((np.diagonal(T) == 0).all() and np.array_equal(J, loop.ldiv_table[:, 0])):
        raise NotSteiner("loop does not have exponent two")
    x = np.arange(loop.n)
    if not ((T[x[:, None], T] == x[None, :]).all() and (T[T, x[None, :]] == x[:, None]).all()):
        raise NotSteiner("loop does not have the inverse property")
    blocks = {frozenset((a - 1, b - 1, int(T[a, b]) - 1))
              for a in range(1, loop.n) for b in range(a + 1, loop.n)}
    return TripleSystem(loop.n - 1, blocks)


# -- labels and files ----------------------------------------------------------

def point_label(element):
    """Point label for a loop element: ``e`` for the identity, else point index."""
    return "e" if element == 0 else str(element - 1)


def from_point_label(label):
    return 0 if str(label) == "e" else int(label) + 1


def parse_system(text):
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidSystem("empty system file")
    head, sep, value = lines[0].partition("=")
    if not sep or head.strip() != "v":
        raise InvalidSystem("first line must be 'v = <int>'")
    try:
        blocks = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
        ts = TripleSystem(int(value), blocks)
    except ValueError as exc:
        raise InvalidSystem(str(exc)) from exc
    return ts


def serialize_system(ts):
    return "\n".join([f"v = {ts.v}"] + [" ".join(map(str, b)) for b in ts.blocks]) + "\n"


def load_system(path):
    return parse_system(Path(path).read_text())
