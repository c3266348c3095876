"""Lattice terms: meet/join trees over variables and named constants.

Text grammar (the on-disk and on-wire format)::

    expr  := atom (op atom)*        all ops in one chain must agree
    op    := "^" (meet) | "v" (join)
    atom  := var | const | "(" expr ")"
    var   := "x" digits | "xm" digits   (xm1 is variable -1)
    const := "#" [A-Za-z0-9_]+

Same-operator chains are flattened into one n-ary node; no other simplification is done.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence, Union

from .errors import BadInput

__all__ = [
    "Var",
    "Const",
    "Meet",
    "Join",
    "LatTerm",
    "meet_of",
    "join_of",
    "parse",
    "to_text",
    "EvalContext",
    "evaluate",
    "random_term",
    "is_trivial",
    "leaves",
    "size",
    "variables",
]


@dataclass(frozen=True, eq=True)
class Var:
    index: int

    @property
    def arity(self) -> int:
        return self.index + 1


@dataclass(frozen=True, eq=True)
class Const:
    name: str

    @property
    def arity(self) -> int:
        return 0


@dataclass(frozen=True, eq=True)
class _Op:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise BadInput(f"{type(self).__name__} needs at least two children")

    @property
    def arity(self) -> int:
        return max(c.arity for c in self.children)


class Meet(_Op):
    symbol = "^"


class Join(_Op):
    symbol = "v"


LatTerm = Union[Var, Const, Meet, Join]


def _combine(cls, terms):
    flat = []
    for t in terms:
        if isinstance(t, cls):
            flat.extend(t.children)
        else:
            flat.append(t)
    if not flat:
        raise BadInput(f"empty {cls.__name__.lower()}")
    if len(flat) == 1:
        return flat[0]
    return cls(tuple(flat))


def meet_of(*terms: LatTerm) -> LatTerm:
    """Flattened meet; a single operand is returned unchanged."""
    return _combine(Meet, terms)


def join_of(*terms: LatTerm) -> LatTerm:
    """Flattened join; a single operand is returned unchanged."""
    return _combine(Join, terms)


# -- printing ---------------------------------------------------------------


def _var_text(i: int) -> str:
    return f"x{i}" if i >= 0 else f"xm{-i}"


def to_text(term: LatTerm) -> str:
    if isinstance(term, Var):
        return _var_text(term.index)
    if isinstance(term, Const):
        return "#" + term.name
    sep = f" {term.symbol} "
    return "(" + sep.join(to_text(c) for c in term.children) + ")"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<op>\^|v(?![A-Za-z0-9_]))|(?P<var>x[A-Za-z0-9_]*)|(?P<const>#[A-Za-z0-9_]*)|(?P<bad>\S))")
_VAR = re.compile(r"x(?:(0|[1-9][0-9]*)|m([1-9][0-9]*))\Z")
_CONST = re.compile(r"#[A-Za-z0-9_]+\Z")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "bad":
            raise BadInput(f"unexpected character {value!r} at position {start}")
        tokens.append((kind, value, start))
        pos = m.end()
    if text[pos:].strip():
        raise BadInput(f"unexpected trailing input at position {pos}")
    return tokens


def parse(text: str) -> LatTerm:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(kind=None):
        nonlocal pos
        tok = peek()
        if tok is None:
            raise BadInput(f"unexpected end of term at position {len(text)}")
        if kind is not None and tok[0] != kind:
            raise BadInput(f"expected {kind} at position {tok[2]}, found {tok[1]!r}")
        pos += 1
        return tok

    def atom():
        tok = take()
        kind, value, at = tok
        if kind == "lp":
            inner = expr()
            take("rp")
            return inner
        if kind == "var":
            m = _VAR.match(value)
            if m is None:
                raise BadInput(f"malformed variable {value!r} at position {at}")
            return Var(int(m.group(1))) if m.group(1) is not None else Var(-int(m.group(2)))
        if kind == "const":
            if not _CONST.match(value):
                raise BadInput(f"malformed constant {value!r} at position {at}")
            return Const(value[1:])
        raise BadInput(f"unexpected {value!r} at position {at}")

    def expr():
        items = [atom()]
        op = None
        while peek() is not None and peek()[0] == "op":
            sym, at = peek()[1], peek()[2]
            if op is not None and sym != op:
                raise BadInput(f"mixed operators without parentheses at position {at}")
            op = sym
            take()
            items.append(atom())
        if op is None:
            return items[0]
        return meet_of(*items) if op == "^" else join_of(*items)

    if not tokens:
        raise BadInput("empty term")
    result = expr()
    if pos != len(tokens):
        raise BadInput(f"unexpected {tokens[pos][1]!r} at position {tokens[pos][2]}")
    return result


# -- structure ----------------------------------------------------------------


def leaves(term: LatTerm) -> int:
    if isinstance(term, (Var, Const)):
        return 1
    return sum(leaves(c) for c in term.children)


def size(term: LatTerm) -> int:
    """Node count of the term tree."""
    if isinstance(term, (Var, Const)):
        return 1
    return 1 + sum(size(c) for c in term.children)


def variables(term: LatTerm) -> set[int]:
    if isinstance(term, Var):
        return {term.index}
    if isinstance(term, Const):
        return set()
    out = set()
    for c in term.children:
        out |= variables(c)
    return out


def is_trivial(term: LatTerm) -> bool:
    """A bare projection, or a term that mentions no variable at all."""
    return isinstance(term, Var) or not variables(term)


# -- evaluation -----------------------------------------------------------------


@dataclass
class EvalContext:
    """Values for variables and constants plus the lattice operations to fold with.

    ``ops`` needs ``meet(a, b)`` and ``join(a, b)``.  ``assignment`` may be a sequence
    (non-negative indices only) or a mapping from variable index to value.
    """

    assignment: Sequence[Any] | Mapping[int, Any]
    ops: Any
    constants: Mapping[str, Any] | None = None

    def var(self, i: int):
        a = self.assignment
        if isinstance(a, Mapping):
            if i not in a:
                raise BadInput(f"no value for variable {_var_text(i)}")
            return a[i]
        if i < 0 or i >= len(a):
            raise BadInput(f"no value for variable {_var_text(i)}")
        return a[i]

    def const(self, name: str):
        if not self.constants or name not in self.constants:
            raise BadInput(f"unbound constant #{name}")
        return self.constants[name]


def evaluate(term: LatTerm, ctx: EvalContext, memo: dict | None = None):
    """Structural fold of ``term`` under ``ctx``; shared subterms are evaluated once."""
    if memo is None:
        memo = {}
    meet, join = ctx.ops.meet, ctx.ops.join

    def go(t):
        key = id(t)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(t, Var):
            val = ctx.var(t.index)
        elif isinstance(t, Const):
            val = ctx.const(t.name)
        else:
            op = meet if isinstance(t, Meet) else join
            it = iter(t.children)
            val = go(next(it))
            for c in it:
                val = op(val, go(c))
        memo[key] = (t, val)  # keep t alive so its id is not recycled
        return val

    return go(term)


# -- random generation --------------------------------------------------------------


def random_term(
    k: int,
    depth: int,
    constants: Sequence[str] = (),
    seed: int | random.Random | None = None,
    leaf_prob: float = 0.3,
    const_prob: float = 0.2,
) -> LatTerm:
    """Random term over ``x0..x{k-1}`` (and optional constants) of depth at most ``depth``.

    The root is always an operator; trivial shapes are discarded and redrawn.
    """
    if depth < 1:
        raise BadInput("depth must be at least 1")
    if k < 1:
        raise BadInput("need at least one variable")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    constants = list(constants)

    def leaf():
        if constants and rng.random() < const_prob:
            return Const(rng.choice(constants))
        return Var(rng.randrange(k))

    def node(d, root=False):
        if d == 0 or (not root and rng.random() < leaf_prob):
            return leaf()
        kids = [node(d - 1), node(d - 1)]
        return meet_of(*kids) if rng.random() < 0.5 else join_of(*kids)

    while True:
        t = node(depth, root=True)
        if not is_trivial(t):
            return t


class FuncOps:
    """Adapter turning two plain functions into an ``ops`` object."""

    def __init__(self, meet: Callable, join: Callable):
        self.meet = meet
        self.join = join
