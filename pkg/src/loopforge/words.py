"""Products of words under every bracketing, and block-length associativity.

A word is a tuple of loop elements.  ``pi_all`` returns the set of values of
all bracketings; a word *associates* when that set is a singleton.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadSplit, LengthCapExceeded

DEFAULT_LENGTH_CAP = 10


def pi_all(loop, word, cap=DEFAULT_LENGTH_CAP):
    """All products of ``word`` under every association (interval DP)."""
    word = tuple(int(w) for w in word)
    m = len(word)
    if m > cap:
        raise LengthCapExceeded(f"word length {m} exceeds cap {cap}")
    if m == 0:
        return {0}
    T = loop.table
    span = {(i, i + 1): {word[i]} for i in range(m)}
    for length in range(2, m + 1):
        for i in range(m - length + 1):
            j = i + length
            vals = set()
            for k in range(i + 1, j):
                left = np.fromiter(span[i, k], dtype=np.int64)
                right = np.fromiter(span[k, j], dtype=np.int64)
                vals.update(T[left[:, None], right[None, :]].ravel().tolist())
            span[i, j] = vals
    return span[0, m]


def pi_r(loop, word):
    """Right-associated product a1 (a2 (... an))."""
    p = 0
    for w in reversed(tuple(word)):
        p = loop.mul(int(w), p)
    return p if word else 0


def pi_k(loop, word, k):
    """pi_R of the first k letters times pi_R of the rest."""
    word = tuple(word)
    if not 1 <= k <= len(word) - 1:
        raise BadSplit(f"split {k} outside 1..{len(word) - 1}")
    return loop.mul(pi_r(loop, word[:k]), pi_r(loop, word[k:]))


def associates(loop, word, cap=DEFAULT_LENGTH_CAP):
    return len(pi_all(loop, word, cap)) == 1


def block_length(loop, word):
    """Number of maximal runs of letters drawn from one pair {y, y^-1}."""
    word = tuple(int(w) for w in word)
    if not word:
        return 0
    J = loop.inverses()
    breaks = sum(1 for x, y in zip(word, word[1:]) if x != y and x != J[y])
    return 1 + breaks


# -- D-associativity -------------------------------------------------------------

_LETTERS = "abAB"  # A, B stand for a^-1, b^-1


@dataclass(frozen=True)
class AssociativityFailure:
    a: int
    b: int
    pattern: str
    word: tuple
    block_length: int

    def as_list(self):
        return [self.a, self.b, self.pattern]


def _symbolic_blocks(pattern):
    cls = [c.lower() for c in pattern]
    return 1 + sum(1 for x, y in zip(cls, cls[1:]) if x != y)


def _patterns(max_len):
    # words starting with anything but 'a' are the same checks with a, b
    # swapped or a replaced by its inverse, and every pair (a, b) is tried
    for length in range(3, max_len + 1):
        for tail in itertools.product(_LETTERS, repeat=length - 1):
            yield "a" + "".join(tail)


def _scan(loop, max_len, chunk=1 << 13):
    """Yield (pattern, block count per pair, failing-pair mask) per chunk of pairs."""
    n = loop.n
    T = loop.table
    J = loop.inverses()
    pairs = np.arange(n * n)
    for start in range(0, n * n, chunk):
        idx = pairs[start:start + chunk]
        a, b = idx // n, idx % n
        letters = {"a": a, "b": b, "A": J[a], "B": J[b]}
        same_class = (b == a) | (b == J[a])
        right = {"": np.zeros_like(a)}
        for c in _LETTERS:
            right[c] = letters[c]

        def pr(w):
            v = right.get(w)
            if v is None:
                v = T[letters[w[0]], pr(w[1:])]
                if len(w) < max_len:
                    right[w] = v
            return v

        for pattern in _patterns(max_len):
            full = pr(pattern)
            bad = np.zeros(len(idx), dtype=bool)
            for k in range(1, len(pattern)):
                bad |= T[pr(pattern[:k]), pr(pattern[k:])] != full
            blocks = np.where(same_class, 1, _symbolic_blocks(pattern))
            yield start, pattern, blocks, a, b, bad


def _first_failure(loop, D, max_len):
    best = None
    best_key = None
    order = {p: i for i, p in enumerate(_patterns(max_len))}
    for start, pattern, blocks, a, b, bad in _scan(loop, max_len):
        bad = bad & (blocks <= D)
        if not bad.any():
            continue
        i = int(np.argmax(bad))
        key = (order[pattern], start + i)
        if best_key is None or key < best_key:
            best_key = key
            best = (int(a[i]), int(b[i]), pattern, int(blocks[i]))
    if best is None:
        return None
    a, b, pattern, blocks = best
    return _failure(loop, a, b, pattern, blocks)


def _failure(loop, a, b, pattern, blocks):
    J = loop.inverses()
    letters = {"a": a, "b": b, "A": int(J[a]), "B": int(J[b])}
    return AssociativityFailure(a, b, pattern, tuple(letters[c] for c in pattern), blocks)


def d_associative(loop, D, max_len=6):
    """Do all words over {a, b, a^-1, b^-1} with B(W) <= D and |W| <= max_len associate?

    Returns ``(holds, failure)``.  Words are checked in increasing length, so
    when a word is reached all of its proper subwords already associate and
    it suffices to compare the split products pi^k.
    """
    if max_len > DEFAULT_LENGTH_CAP:
        raise LengthCapExceeded(f"max_len {max_len} exceeds cap {DEFAULT_LENGTH_CAP}")
    loop.inverses()  # raises NotIP
    failure = _first_failure(loop, D, max_len)
    return failure is None, failure


def min_failing_block_length(loop, max_len=6):
    """Smallest B(W) over non-associating words of length <= max_len, or None.

    ``d_associative(loop, D, max_len)`` holds exactly when this exceeds D.
    """
    loop.inverses()
    best = None
    for _start, _pattern, blocks, _a, _b, bad in _scan(loop, max_len):
        if bad.any():
            m = int(blocks[bad].min())
            best = m if best is None else min(best, m)
    return best
