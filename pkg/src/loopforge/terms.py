"""Loop words, identities, and exhaustive identity checking.

Grammar (fully parenthesised; a chain of two binary operators without
parentheses is rejected)::

    identity := term "=" term
    term     := unary [("*" | "\\" | "/") unary]
    unary    := atom "'"*
    atom     := name | "1" | "(" term ")"

``a\\b`` is the x with a*x = b, ``b/a`` is the x with x*a = b, and ``a'`` is
the two-sided inverse (only defined in IP loops).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AmbiguityError, TermSyntaxError, UnboundVariable


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class One(Term):
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"{_wrap(self.left)}*{_wrap(self.right)}"


@dataclass(frozen=True)
class LDiv(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"{_wrap(self.left)}\\{_wrap(self.right)}"


@dataclass(frozen=True)
class RDiv(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"{_wrap(self.left)}/{_wrap(self.right)}"


@dataclass(frozen=True)
class Inv(Term):
    arg: Term

    def __str__(self):
        return f"{_wrap(self.arg)}'"


_BINARY = (Mul, LDiv, RDiv)


def _wrap(t):
    return f"({t})" if isinstance(t, _BINARY) else str(t)


def serialize(t):
    return str(t)


def variables(t, acc=None):
    """Variable names of ``t`` in order of first occurrence."""
    acc = [] if acc is None else acc
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, _BINARY):
        variables(t.left, acc)
        variables(t.right, acc)
    elif isinstance(t, Inv):
        variables(t.arg, acc)
    return acc


def mirror(t):
    """The term that computes the same value in the opposite loop."""
    if isinstance(t, Mul):
        return Mul(mirror(t.right), mirror(t.left))
    if isinstance(t, LDiv):
        return RDiv(mirror(t.right), mirror(t.left))
    if isinstance(t, RDiv):
        return LDiv(mirror(t.right), mirror(t.left))
    if isinstance(t, Inv):
        return Inv(mirror(t.arg))
    return t


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    vars: tuple = field(default=None)
    name: str | None = None

    def __post_init__(self):
        names = tuple(sorted(set(variables(self.lhs)) | set(variables(self.rhs))))
        if self.vars is None:
            object.__setattr__(self, "vars", names)
        elif tuple(sorted(self.vars)) != names:
            raise ValueError(f"declared variables {self.vars} do not match {names}")

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"

    def mirror(self, name=None):
        return Identity(mirror(self.lhs), mirror(self.rhs), self.vars, name)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"([a-z][a-z0-9_]*)|(1)|(\*|\\|/)|(')|(\()|(\))|(=)")


def _tokenize(src):
    tokens, pos = [], 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = ("name", "one", "op", "inv", "lparen", "rparen", "eq")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise TermSyntaxError(f"expected {kind}, found {what!r}", tok[2])
        self.i += 1
        return tok

    def term(self):
        left = self.unary()
        kind, op, pos = self.peek()
        if kind != "op":
            return left
        self.i += 1
        right = self.unary()
        nxt = self.peek()
        if nxt[0] == "op":
            raise AmbiguityError(f"operator {nxt[1]!r} chained without parentheses", nxt[2])
        return {"*": Mul, "\\": LDiv, "/": RDiv}[op](left, right)

    def unary(self):
        t = self.atom()
        while self.peek()[0] == "inv":
            self.i += 1
            t = Inv(t)
        return t

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "name":
            self.i += 1
            return Var(text)
        if kind == "one":
            self.i += 1
            return One()
        if kind == "lparen":
            self.i += 1
            t = self.term()
            self.take("rparen")
            return t
        raise TermSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse_term(src):
    p = _Parser(src)
    t = p.term()
    p.take("end")
    return t


def parse_identity(src, name=None):
    p = _Parser(src)
    lhs = p.term()
    p.take("eq")
    rhs = p.term()
    p.take("end")
    return Identity(lhs, rhs, name=name)


def parse_identity_file(text):
    """``name : LHS = RHS`` per line; ``#`` starts a comment."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition(":")
        if not sep:
            name, body = None, line
        out.append(parse_identity(body.strip(), name=name.strip() if name else None))
    return out


def load_identities(path):
    return parse_identity_file(Path(path).read_text())


# -- evaluation ----------------------------------------------------------------

def evaluate(loop, t, env):
    """Value of ``t`` in ``loop`` under ``env`` (name -> element)."""
    if isinstance(t, Var):
        try:
            return int(env[t.name])
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, One):
        return 0
    if isinstance(t, Mul):
        return loop.mul(evaluate(loop, t.left, env), evaluate(loop, t.right, env))
    if isinstance(t, LDiv):
        return loop.ldiv(evaluate(loop, t.left, env), evaluate(loop, t.right, env))
    if isinstance(t, RDiv):
        return loop.rdiv(evaluate(loop, t.left, env), evaluate(loop, t.right, env))
    if isinstance(t, Inv):
        return loop.inverse(evaluate(loop, t.arg, env))
    raise TypeError(f"not a term: {t!r}")


def evaluate_array(loop, t, env):
    """Vectorised ``evaluate``: ``env`` values are broadcastable int arrays."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, One):
        return np.zeros((), dtype=np.int64)
    if isinstance(t, Mul):
        return loop.table[evaluate_array(loop, t.left, env), evaluate_array(loop, t.right, env)]
    if isinstance(t, LDiv):
        return loop.ldiv_table[evaluate_array(loop, t.left, env), evaluate_array(loop, t.right, env)]
    if isinstance(t, RDiv):
        return loop.rdiv_table[evaluate_array(loop, t.left, env), evaluate_array(loop, t.right, env)]
    if isinstance(t, Inv):
        return loop.inverses()[evaluate_array(loop, t.arg, env)]
    raise TypeError(f"not a term: {t!r}")


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: dict | None
    evaluations: int

    def __bool__(self):
        return self.holds


_CHUNK = 1 << 18


def holds(loop, identity):
    """Check ``identity`` on every assignment, in lexicographic order.

    The first falsifying assignment (variables in ``identity.vars`` order,
    elements by index) is returned as the witness.
    """
    names = identity.vars
    n, k = loop.n, len(names)
    # iterate over the leading variables so each vectorised block stays small
    lead = 0
    while lead < k and n ** (k - lead) > _CHUNK:
        lead += 1
    rest = k - lead
    shape = (n,) * rest
    grids = {}
    for pos, name in enumerate(names[lead:]):
        view = [1] * rest
        view[pos] = n
        grids[name] = np.arange(n).reshape(view)
    block = n ** rest
    for count, prefix in enumerate(np.ndindex(*((n,) * lead))):
        env = dict(grids)
        env.update({name: np.int64(v) for name, v in zip(names, prefix)})
        lhs = np.broadcast_to(evaluate_array(loop, identity.lhs, env), shape)
        rhs = np.broadcast_to(evaluate_array(loop, identity.rhs, env), shape)
        bad = lhs != rhs
        if bad.any():
            flat = int(np.argmax(bad))
            tail = np.unravel_index(flat, shape) if rest else ()
            values = tuple(prefix) + tuple(int(v) for v in tail)
            witness = dict(zip(names, (int(v) for v in values)))
            return CheckResult(False, witness, count * block + flat + 1)
    return CheckResult(True, None, n ** k)


# -- catalogue -----------------------------------------------------------------

_CATALOG_SOURCE = (
    ("ASSOC", "(x*y)*z = x*(y*z)"),
    ("COMM", "x*y = y*x"),
    ("FLEX", "x*(y*x) = (x*y)*x"),
    ("RALT", "x*(y*y) = (x*y)*y"),
    ("LALT", "y*(y*x) = (y*y)*x"),
    ("M1", "(x*(y*z))*x = (x*y)*(z*x)"),
    ("M2", "(x*z)*(y*x) = x*((z*y)*x)"),
    ("N1", "((x*y)*z)*y = x*(y*(z*y))"),
    ("N2", "((y*z)*y)*x = y*(z*(y*x))"),
    ("C", "((x*y)*y)*z = x*(y*(y*z))"),
    # R(x)R(yxy) = R(xyx)R(y) applied to z, with yxy = (yx)y and xyx = (xy)x
    ("W1", "(z*x)*((y*x)*y) = (z*((x*y)*x))*y"),
    # L(x)L(yxy) = L(xyx)L(y); the exact mirror image of W1
    ("W2", "(y*(x*y))*(x*z) = y*((x*(y*x))*z)"),
    # R(xy)L(xy) = L(y)L(x)R(x)R(y) applied to z
    ("RIF3", "(x*y)*(z*(x*y)) = ((x*(y*z))*x)*y"),
    # L(xy)R(xy) = R(x)R(y)L(y)L(x), written as the mirror image of RIF3
    ("RIF4", "((y*x)*z)*(y*x) = y*(x*((z*y)*x))"),
    ("RIFC", "((x*(y*z))*x)*y = x*(y*((z*x)*y))"),
)


def catalog():
    """Named identities used throughout the package, keyed by name."""
    return {name: parse_identity(src, name=name) for name, src in _CATALOG_SOURCE}
