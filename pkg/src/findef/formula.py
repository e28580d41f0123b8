"""First-order formulas over a relational signature.

Variables are indexed: ``x0, x1, ...`` are represented by their integer index.
Two evaluation routes are provided on purpose: :func:`evaluate` is the plain
recursive Tarskian interpreter, :func:`relation_table` computes whole tables
with numpy, one array per subformula over that subformula's free variables.
"""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityError, FormulaSyntaxError, UnboundVariableError, UnknownSymbolError
from .structure import EQUALITY, Signature, Structure, is_operator_name


def _node(cls):
    """Frozen dataclass whose hash is computed once (formulas are shared DAGs)."""
    cls = dataclass(frozen=True)(cls)
    structural_hash = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = structural_hash(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


class Formula:
    __slots__ = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


@_node
class Top(Formula):
    pass


@_node
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@_node
class Atom(Formula):
    symbol: str
    args: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(int(a) for a in self.args))


@_node
class Eq(Formula):
    left: int
    right: int


@_node
class Not(Formula):
    sub: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Exists(Formula):
    var: int
    body: Formula


@_node
class Forall(Formula):
    var: int
    body: Formula


@dataclass(frozen=True)
class SignedFormula:
    """``base`` when sign is +1, its negation when sign is -1."""

    base: Formula
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    def formula(self) -> Formula:
        return self.base if self.sign == 1 else Not(self.base)


def conjoin(parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


_BINARY = (And, Or, Implies)
_QUANT = (Exists, Forall)


def free_vars(F: Formula) -> frozenset[int]:
    memo: dict[int, frozenset] = {}

    def go(f):
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, Atom):
            r = frozenset(f.args)
        elif isinstance(f, Eq):
            r = frozenset((f.left, f.right))
        elif isinstance(f, Not):
            r = go(f.sub)
        elif isinstance(f, _BINARY):
            r = go(f.left) | go(f.right)
        elif isinstance(f, _QUANT):
            r = go(f.body) - {f.var}
        else:
            r = frozenset()
        memo[key] = r
        return r

    return go(F)


def quantifier_rank(F: Formula) -> int:
    memo: dict[int, int] = {}

    def go(f):
        key = id(f)
        if key not in memo:
            if isinstance(f, Not):
                memo[key] = go(f.sub)
            elif isinstance(f, _BINARY):
                memo[key] = max(go(f.left), go(f.right))
            elif isinstance(f, _QUANT):
                memo[key] = go(f.body) + 1
            else:
                memo[key] = 0
        return memo[key]

    return go(F)


def node_count(F: Formula) -> int:
    """Number of distinct nodes in the formula DAG."""
    seen = set()
    stack = [F]
    while stack:
        f = stack.pop()
        if id(f) in seen:
            continue
        seen.add(id(f))
        if isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, _BINARY):
            stack += [f.left, f.right]
        elif isinstance(f, _QUANT):
            stack.append(f.body)
    return len(seen)


# -- text ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<arrow>->)
      | (?P<punct>[(),.!&|])
      | (?P<word>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<op>[<>=+*~^%$@?/:\\-]+)
    )""",
    re.VERBOSE,
)
_VAR = re.compile(r"x(\d+)\Z")


def _tokenize(text: str):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "word" and _VAR.match(value):
            kind = "var"
        elif kind in ("punct", "arrow"):
            kind = value
        toks.append((kind, value, start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, signature):
        self.toks = _tokenize(text)
        self.i = 0
        self.signature = signature

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, got {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def var(self):
        tok = self.take("var")
        return int(tok[1][1:])

    def atom(self, name, args, pos):
        if self.signature is not None:
            if name not in self.signature:
                raise UnknownSymbolError(name)
            arity = self.signature.arity(name)
            if arity != len(args):
                raise ArityError(
                    f"{name} has arity {arity}, got {len(args)} arguments (position {pos})"
                )
        return Atom(name, tuple(args))

    def formula(self):
        kind, value, pos = self.peek()
        if kind == "word" and value == "true":
            self.take()
            return TRUE
        if kind == "word" and value == "false":
            self.take()
            return FALSE
        if kind == "!":
            self.take()
            return Not(self.formula())
        if kind == "word" and value in ("E", "A") and self.peek(1)[0] == "var":
            self.take()
            v = self.var()
            self.take(".")
            body = self.formula()
            return Exists(v, body) if value == "E" else Forall(v, body)
        if kind in ("word", "op") and self.peek(1)[0] == "(":
            self.take()
            self.take("(")
            args = [self.var()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.var())
            self.take(")")
            return self.atom(value, args, pos)
        if kind == "(":
            self.take()
            if self.peek()[0] == "var" and self.peek(1)[0] == "op":
                left = self.var()
                _, op, op_pos = self.take("op")
                right = self.var()
                self.take(")")
                if op == EQUALITY:
                    return Eq(left, right)
                return self.atom(op, [left, right], op_pos)
            f = self.formula()
            connective = self.peek()[0]
            if connective in ("&", "|", "->"):
                while self.peek()[0] == connective:
                    self.take()
                    g = self.formula()
                    f = {"&": And, "|": Or, "->": Implies}[connective](f, g)
                    if connective == "->":
                        break
            self.take(")")
            return f
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse_formula(text: str, signature: Signature | Structure | None = None) -> Formula:
    """Parse formula text; atoms are arity-checked when a signature is given."""
    if isinstance(signature, Structure):
        signature = signature.signature
    p = _Parser(text, signature)
    f = p.formula()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"trailing input {value!r}", pos)
    return f


def render_formula(F: Formula) -> str:
    if isinstance(F, Top):
        return "true"
    if isinstance(F, Bottom):
        return "false"
    if isinstance(F, Atom):
        if len(F.args) == 2 and is_operator_name(F.symbol):
            return f"(x{F.args[0]} {F.symbol} x{F.args[1]})"
        return F.symbol + "(" + ",".join(f"x{a}" for a in F.args) + ")"
    if isinstance(F, Eq):
        return f"(x{F.left} = x{F.right})"
    if isinstance(F, Not):
        return "!(" + render_formula(F.sub) + ")"
    if isinstance(F, _BINARY):
        op = {And: "&", Or: "|", Implies: "->"}[type(F)]
        return f"({render_formula(F.left)} {op} {render_formula(F.right)})"
    if isinstance(F, _QUANT):
        q = "E" if isinstance(F, Exists) else "A"
        return f"{q} x{F.var}. ({render_formula(F.body)})"
    raise TypeError(f"not a formula: {F!r}")


# -- semantics -------------------------------------------------------------

def evaluate(S: Structure, F: Formula, assignment: Mapping[int, int]) -> bool:
    """Truth of ``F`` in ``S`` under ``assignment`` (variable index -> element)."""
    a = dict(assignment)

    def value(v):
        try:
            return a[v]
        except KeyError:
            raise UnboundVariableError(f"x{v} is unbound") from None

    def go(f):
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            return tuple(value(v) for v in f.args) in S.table(f.symbol)
        if isinstance(f, Eq):
            return value(f.left) == value(f.right)
        if isinstance(f, Not):
            return not go(f.sub)
        if isinstance(f, And):
            return go(f.left) and go(f.right)
        if isinstance(f, Or):
            return go(f.left) or go(f.right)
        if isinstance(f, Implies):
            return (not go(f.left)) or go(f.right)
        if isinstance(f, _QUANT):
            had, saved = f.var in a, a.get(f.var)
            want = isinstance(f, Exists)
            result = not want
            for e in range(S.size):
                a[f.var] = e
                if go(f.body) == want:
                    result = want
                    break
            if had:
                a[f.var] = saved
            else:
                del a[f.var]
            return result
        raise TypeError(f"not a formula: {f!r}")

    return go(F)


@functools.lru_cache(maxsize=4096)
def symbol_array(S: Structure, name: str) -> np.ndarray:
    """Boolean membership array of shape ``(n,) * arity`` for a symbol or the target."""
    if name == EQUALITY:
        return np.eye(S.size, dtype=bool)
    arity = S.arity(name)
    arr = np.zeros((S.size,) * arity, dtype=bool)
    rows = S.table(name)
    if rows:
        arr[tuple(np.array(sorted(rows)).T)] = True
    arr.setflags(write=False)
    return arr


def table_array(n: int, table, arity: int) -> np.ndarray:
    arr = np.zeros((n,) * arity, dtype=bool)
    if table:
        arr[tuple(np.array(sorted(table)).T)] = True
    return arr


def _grid_lookup(n, arr, args, fv):
    """Index ``arr`` by argument variables, producing an array over sorted ``fv``."""
    grids = np.indices((n,) * len(fv), sparse=True)
    pos = {v: i for i, v in enumerate(fv)}
    return arr[tuple(grids[pos[a]] for a in args)]


def _expand(n, fv, arr, target):
    shape = [n if v in fv else 1 for v in target]
    return np.asarray(arr).reshape(shape) if target else np.asarray(arr)


def formula_array(S: Structure, F: Formula) -> tuple[tuple[int, ...], np.ndarray]:
    """``(vars, array)``: truth values over the sorted free variables of ``F``."""
    n = S.size
    memo: dict[int, tuple] = {}

    def go(f):
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, Top):
            r = ((), np.bool_(True))
        elif isinstance(f, Bottom):
            r = ((), np.bool_(False))
        elif isinstance(f, Atom):
            fv = tuple(sorted(set(f.args)))
            r = (fv, _grid_lookup(n, symbol_array(S, f.symbol), f.args, fv))
        elif isinstance(f, Eq):
            fv = tuple(sorted({f.left, f.right}))
            r = (fv, _grid_lookup(n, np.eye(n, dtype=bool), (f.left, f.right), fv))
        elif isinstance(f, Not):
            fv, arr = go(f.sub)
            r = (fv, ~arr)
        elif isinstance(f, _BINARY):
            lv, la = go(f.left)
            rv, ra = go(f.right)
            fv = tuple(sorted(set(lv) | set(rv)))
            la, ra = _expand(n, lv, la, fv), _expand(n, rv, ra, fv)
            if isinstance(f, And):
                arr = la & ra
            elif isinstance(f, Or):
                arr = la | ra
            else:
                arr = ~la | ra
            r = (fv, np.broadcast_to(arr, (n,) * len(fv)) if fv else arr)
        elif isinstance(f, _QUANT):
            bv, ba = go(f.body)
            if f.var in bv:
                axis = bv.index(f.var)
                arr = ba.any(axis=axis) if isinstance(f, Exists) else ba.all(axis=axis)
                r = (tuple(v for v in bv if v != f.var), arr)
            else:
                r = (bv, ba)
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = r
        return r

    return go(F)


def relation_array(S: Structure, F: Formula, variables: Sequence[int]) -> np.ndarray:
    """Boolean array over ``variables`` (axis order as given)."""
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise ValueError("variable list has repeats")
    fv, arr = formula_array(S, F)
    missing = set(fv) - set(variables)
    if missing:
        raise UnboundVariableError(
            "free variables not covered: " + ", ".join(f"x{v}" for v in sorted(missing))
        )
    order = sorted(variables)
    full = np.broadcast_to(_expand(S.size, fv, arr, order), (S.size,) * len(order))
    perm = [order.index(v) for v in variables]
    return np.ascontiguousarray(np.transpose(full, perm)) if perm else np.asarray(full)


def relation_table(S: Structure, F: Formula, variables: Sequence[int]) -> frozenset:
    """The set of tuples ``t`` with ``S |= F[variables := t]``."""
    arr = relation_array(S, F, variables)
    if not len(variables):
        return frozenset({()}) if bool(arr) else frozenset()
    return frozenset(tuple(int(v) for v in row) for row in np.argwhere(arr))


def relation_table_pointwise(S: Structure, F: Formula, variables: Sequence[int]) -> frozenset:
    """Same as :func:`relation_table`, by calling :func:`evaluate` on every tuple."""
    variables = list(variables)
    return frozenset(
        t
        for t in itertools.product(range(S.size), repeat=len(variables))
        if evaluate(S, F, dict(zip(variables, t)))
    )


# -- conservative simplification -------------------------------------------

def _flatten(f, cls, out):
    if isinstance(f, cls):
        _flatten(f.left, cls, out)
        _flatten(f.right, cls, out)
    else:
        out.append(f)


def simplify(F: Formula) -> Formula:
    """Collapse constants, drop duplicate conjuncts/disjuncts, remove double negation.

    Extensionally equivalent to the input; makes no attempt at minimality.
    """
    memo: dict[int, Formula] = {}

    def go(f):
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, Not):
            s = go(f.sub)
            if isinstance(s, Top):
                r = FALSE
            elif isinstance(s, Bottom):
                r = TRUE
            elif isinstance(s, Not):
                r = s.sub
            else:
                r = f if s is f.sub else Not(s)
        elif isinstance(f, (And, Or)):
            cls = type(f)
            unit, zero = (TRUE, FALSE) if cls is And else (FALSE, TRUE)
            parts: list = []
            _flatten(f, cls, parts)
            kept, seen = [], set()
            r = None
            for p in parts:
                p = go(p)
                if p == zero:
                    r = zero
                    break
                if p == unit or p in seen:
                    continue
                seen.add(p)
                kept.append(p)
            if r is None:
                r = (conjoin if cls is And else disjoin)(kept)
        elif isinstance(f, Implies):
            a, b = go(f.left), go(f.right)
            if isinstance(a, Bottom) or isinstance(b, Top):
                r = TRUE
            elif isinstance(a, Top):
                r = b
            elif isinstance(b, Bottom):
                r = a.sub if isinstance(a, Not) else Not(a)
            else:
                r = Implies(a, b)
        elif isinstance(f, _QUANT):
            b = go(f.body)
            if isinstance(b, (Top, Bottom)):
                r = b  # the universe is never empty
            else:
                r = type(f)(f.var, b)
        else:
            r = f
        memo[key] = r
        return r

    return go(F)
