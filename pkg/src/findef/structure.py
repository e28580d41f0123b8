"""Finite relational structures ``<{0..n-1}, Sigma + {R}>`` and their text format.

Equality is always available under the reserved name ``"="`` and is never
stored as an interpreted symbol. The target relation R lives beside the
signature, not inside it: symmetry and definability computations only ever
look at the Sigma part.
"""
from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import ArityError, LimitExceeded, StructureError, UnknownSymbolError

EQUALITY = "="

#: soft limits for the exhaustive operations
MAX_SIZE = 10
MAX_ARITY = 3

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_OPERATOR = re.compile(r"[<>=+*~^%$@?/:\\-]+\Z")
_VARIABLE = re.compile(r"x\d+\Z")
_KEYWORDS = {"true", "false", "universe", "rel", "target", "arity", "end"}


class LimitWarning(UserWarning):
    pass


def is_operator_name(name: str) -> bool:
    return bool(_OPERATOR.match(name))


def check_name(name: str) -> None:
    if not name:
        raise StructureError("empty symbol name")
    if name == EQUALITY:
        raise StructureError("'=' is reserved for equality")
    if _IDENT.match(name):
        if _VARIABLE.match(name) or name in _KEYWORDS:
            raise StructureError(f"symbol name {name!r} is reserved")
    elif _OPERATOR.match(name):
        if name.startswith("->"):
            raise StructureError(f"symbol name {name!r} clashes with '->'")
    else:
        raise StructureError(f"bad symbol name {name!r}")


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        symbols = tuple((str(name), int(arity)) for name, arity in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        seen = set()
        for name, arity in symbols:
            check_name(name)
            if name in seen:
                raise StructureError(f"duplicate symbol name {name!r}")
            if arity < 1:
                raise StructureError(f"symbol {name!r} has arity {arity} < 1")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def arity(self, name: str) -> int:
        if name == EQUALITY:
            return 2
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise UnknownSymbolError(name)

    def __contains__(self, name) -> bool:
        return any(sym == name for sym, _ in self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


def _normalize_rows(rows: Iterable, arity: int, size: int, what: str) -> frozenset:
    out = set()
    for row in rows:
        t = tuple(int(v) for v in row)
        if len(t) != arity:
            raise ArityError(f"{what}: tuple {t} does not have arity {arity}")
        for v in t:
            if not 0 <= v < size:
                raise StructureError(f"{what}: element {v} out of range [0, {size})")
        out.add(t)
    return frozenset(out)


@dataclass(frozen=True)
class Structure:
    """A finite structure with universe ``range(size)`` and a target relation.

    ``interp`` is aligned with ``signature.symbols``. Build instances with
    :meth:`build` unless you already hold normalized frozensets.
    """

    size: int
    signature: Signature
    interp: tuple[frozenset, ...]
    target_name: str
    target_arity: int
    target: frozenset

    def __post_init__(self):
        if self.size < 1:
            raise StructureError(f"universe size must be positive, got {self.size}")
        if len(self.interp) != len(self.signature):
            raise StructureError("interpretation does not match the signature")
        interp = tuple(
            _normalize_rows(rows, arity, self.size, name)
            for (name, arity), rows in zip(self.signature, self.interp)
        )
        object.__setattr__(self, "interp", interp)
        check_name(self.target_name)
        if self.target_name in self.signature:
            raise StructureError(f"target {self.target_name!r} is also a signature symbol")
        if self.target_arity < 1:
            raise StructureError("target arity must be positive")
        target = _normalize_rows(self.target, self.target_arity, self.size, self.target_name)
        object.__setattr__(self, "target", target)

    @classmethod
    def build(
        cls,
        size: int,
        relations: Mapping[str, tuple[int, Iterable]],
        target: tuple[str, int, Iterable],
    ) -> "Structure":
        """``relations`` maps name -> (arity, rows); ``target`` is (name, arity, rows)."""
        sig = Signature(tuple((name, arity) for name, (arity, _) in relations.items()))
        interp = tuple(rows for _, rows in relations.values())
        name, arity, rows = target
        return cls(size, sig, interp, name, arity, rows)

    @property
    def universe(self) -> range:
        return range(self.size)

    @property
    def sigma_key(self):
        """Hashable key of the Sigma-reduct (target dropped)."""
        return (self.size, self.signature, self.interp)

    def table(self, name: str) -> frozenset:
        if name == self.target_name:
            return self.target
        for (sym, _), rows in zip(self.signature, self.interp):
            if sym == name:
                return rows
        raise UnknownSymbolError(name)

    def arity(self, name: str) -> int:
        if name == self.target_name:
            return self.target_arity
        return self.signature.arity(name)

    def relations(self) -> dict[str, frozenset]:
        return {name: rows for (name, _), rows in zip(self.signature, self.interp)}

    def with_target(self, rows: Iterable, arity: int | None = None, name: str | None = None):
        return replace(
            self,
            target=rows,
            target_arity=self.target_arity if arity is None else arity,
            target_name=self.target_name if name is None else name,
        )

    def tuples(self, arity: int):
        """All tuples of the given arity, in lexicographic order."""
        return itertools.product(range(self.size), repeat=arity)


def eval_relation(S: Structure, name: str, t) -> bool:
    t = tuple(t)
    if name == EQUALITY:
        if len(t) != 2:
            raise ArityError(f"equality takes 2 arguments, got {len(t)}")
        return t[0] == t[1]
    arity = S.arity(name)
    if len(t) != arity:
        raise ArityError(f"{name} has arity {arity}, got a {len(t)}-tuple")
    return t in S.table(name)


def check_limits(S: Structure, arity: int | None = None, strict: bool = False) -> None:
    """Warn (or raise with ``strict``) when an exhaustive operation exceeds the soft limits."""
    problems = []
    if S.size > MAX_SIZE:
        problems.append(f"universe size {S.size} exceeds {MAX_SIZE}")
    if arity is not None and arity > MAX_ARITY:
        problems.append(f"arity {arity} exceeds {MAX_ARITY}")
    if not problems:
        return
    msg = "; ".join(problems)
    if strict:
        raise LimitExceeded(msg)
    warnings.warn(msg, LimitWarning, stacklevel=3)


# -- text format -----------------------------------------------------------

def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for tok in line.split():
            yield tok, lineno


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise StructureError(f"expected {what}, got {tok!r}", lineno) from None


def parse_structure(text: str) -> Structure:
    toks = list(_tokens(text))
    pos = 0

    def take(expected=None):
        nonlocal pos
        if pos >= len(toks):
            last = toks[-1][1] if toks else 1
            raise StructureError(
                f"unexpected end of input, expected {expected or 'a token'}", last
            )
        tok, lineno = toks[pos]
        if expected is not None and tok != expected:
            raise StructureError(f"expected {expected!r}, got {tok!r}", lineno)
        pos += 1
        return tok, lineno

    take("universe")
    tok, lineno = take()
    size = _int(tok, lineno, "universe size")
    if size < 1:
        raise StructureError("universe size must be positive", lineno)

    symbols, interp, target = [], [], None
    names = set()
    while pos < len(toks):
        kind, lineno = take()
        if kind not in ("rel", "target"):
            raise StructureError(f"expected 'rel' or 'target', got {kind!r}", lineno)
        name, name_line = take()
        try:
            check_name(name)
        except StructureError as e:
            raise StructureError(str(e), name_line) from None
        if name in names:
            raise StructureError(f"duplicate symbol name {name!r}", name_line)
        names.add(name)
        take("arity")
        tok, lineno = take()
        arity = _int(tok, lineno, "arity")
        if arity < 1:
            raise StructureError(f"arity must be positive, got {arity}", lineno)
        rows, row, row_line = [], [], None
        while True:
            tok, lineno = take()
            if tok == "end":
                if row:
                    raise StructureError(
                        f"incomplete row {row} for arity {arity}", row_line
                    )
                break
            v = _int(tok, lineno, "an element or 'end'")
            if not 0 <= v < size:
                raise StructureError(f"element {v} out of range [0, {size})", lineno)
            if not row:
                row_line = lineno
            row.append(v)
            if len(row) == arity:
                rows.append(tuple(row))
                row = []
        if kind == "rel":
            symbols.append((name, arity))
            interp.append(rows)
        else:
            if target is not None:
                raise StructureError("more than one target block", name_line)
            target = (name, arity, rows)
    if target is None:
        raise StructureError("missing target block")
    name, arity, rows = target
    return Structure(size, Signature(tuple(symbols)), tuple(interp), name, arity, rows)


def render_structure(S: Structure) -> str:
    """Canonical text: declaration order kept, rows sorted."""
    lines = [f"universe {S.size}"]

    def block(kind, name, arity, rows):
        lines.append(f"{kind} {name} arity {arity}")
        for row in sorted(rows):
            lines.append("  " + " ".join(map(str, row)))
        lines.append("end")

    for (name, arity), rows in zip(S.signature, S.interp):
        block("rel", name, arity, rows)
    block("target", S.target_name, S.target_arity, S.target)
    return "\n".join(lines) + "\n"


def load_structure(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())
