"""Deciding whether the target relation is definable from the signature.

The decision itself is the finite symmetry criterion: the target is
definable iff it is a union of automorphism orbits. Beyond the verdict this
module produces checkable certificates, and rebuilds the defining formula
the constructive way: enumerate definable relations ``P_1, P_2, ...``, find
the first level ``m`` at which no pair of tuples agrees on ``P_1..P_m`` yet
disagrees on the target, and take the disjunction of the sign patterns
realized inside the target.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .errors import ArityError, NotDefinable
from .formula import FALSE, TRUE, Formula, Not, conjoin, disjoin, relation_table, simplify
from .structure import Structure, check_limits
from .symmetry import (
    apply_perm,
    automorphisms,
    orbits,
    preserves_check,
    split_pattern,
    type_levels,
)

ORBIT_ATOMS = "orbit-atoms"
BY_RANK = "by-rank"
_MODE_ALIASES = {"orbit": ORBIT_ATOMS, "orbits": ORBIT_ATOMS, "rank": BY_RANK}


def normalize_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in (ORBIT_ATOMS, BY_RANK):
        raise ValueError(f"unknown enumeration mode {mode!r}")
    return mode


@dataclass(frozen=True)
class DefinableEnumeration:
    """Ordered, duplicate-free list of definable ``arity``-ary relations ``P_1..P_M``."""

    size: int
    arity: int
    items: tuple[tuple[frozenset, Formula], ...]
    mode: str = ORBIT_ATOMS

    def __len__(self) -> int:
        return len(self.items)

    def tables(self) -> list[frozenset]:
        return [t for t, _ in self.items]

    def formulas(self) -> list[Formula]:
        return [f for _, f in self.items]

    @cached_property
    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in t) for t in np.ndindex(*(self.size,) * self.arity)]

    @cached_property
    def membership(self) -> np.ndarray:
        """``membership[idx, i]``: is the idx-th tuple (lexicographic) in ``P_{i+1}``."""
        out = np.zeros((self.size ** self.arity, len(self.items)), dtype=bool)
        for i, (table, _) in enumerate(self.items):
            for t in table:
                out[self.index(t), i] = True
        out.setflags(write=False)
        return out

    def index(self, t) -> int:
        return int(np.ravel_multi_index(tuple(t), (self.size,) * self.arity)) if t else 0

    def pattern(self, t, m: int | None = None) -> tuple[int, ...]:
        """Sign vector of ``t`` against the first ``m`` items (+1 member, -1 not)."""
        row = self.membership[self.index(t)]
        if m is not None:
            row = row[:m]
        return tuple(1 if v else -1 for v in row)


@dataclass(frozen=True)
class SigmaPattern:
    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs must be +1/-1: {self.signs}")

    def __len__(self) -> int:
        return len(self.signs)

    def formula(self, E: DefinableEnumeration) -> Formula:
        if len(self.signs) > len(E):
            raise ValueError("pattern is longer than the enumeration")
        parts = [
            f if s == 1 else Not(f) for s, f in zip(self.signs, E.formulas())
        ]
        return conjoin(parts)


@dataclass(frozen=True)
class DefiningFormula:
    formula: Formula


@dataclass(frozen=True)
class Violation:
    """An automorphism moving ``a`` to ``b`` although the target separates them."""

    permutation: tuple[int, ...]
    a: tuple[int, ...]
    b: tuple[int, ...]


Certificate = Union[DefiningFormula, Violation]


def enumerate_definables(
    S: Structure, arity: int, mode: str = ORBIT_ATOMS, strict: bool = False
) -> DefinableEnumeration:
    """Definable ``arity``-ary relations with defining formulas.

    ``orbit-atoms``: the orbits themselves, a complete finite basis.
    ``by-rank``: the rank-0 type classes, then the rank-1 classes not seen yet,
    and so on up to the stable depth.
    """
    mode = normalize_mode(mode)
    check_limits(S, arity, strict=strict)
    levels = type_levels(S)
    stable = levels.stable_depth(arity)
    items = []
    if mode == ORBIT_ATOMS:
        for cl in orbits(S, arity, strict=strict):
            items.append((frozenset(cl), levels.hintikka(cl[0], stable)))
    else:
        seen = set()
        for q in range(stable + 1):
            for cl in levels.partition(arity, q):
                table = frozenset(cl)
                if table in seen:
                    continue
                seen.add(table)
                items.append((table, levels.hintikka(cl[0], q)))
    return DefinableEnumeration(S.size, arity, tuple(items), mode)


def _target_vector(S: Structure, E: DefinableEnumeration) -> np.ndarray:
    out = np.zeros(len(E.tuples), dtype=bool)
    for t in S.target:
        out[E.index(t)] = True
    return out


def witness_pair(
    S: Structure, m: int, E: DefinableEnumeration, same_pattern: bool = False
):
    """Least ``(a, b)`` (lexicographic in ``a + b``) with the target separating
    ``a`` from ``b`` while ``P_1..P_m`` do not; ``None`` if there is none.

    ``m`` beyond ``len(E)`` means the whole enumeration. With ``same_pattern``
    the pair must also share its equality pattern.
    """
    if E.arity != S.target_arity:
        raise ArityError(f"enumeration arity {E.arity} != target arity {S.target_arity}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    m = min(m, len(E))
    rows = E.membership[:, :m]
    target = _target_vector(S, E)
    if same_pattern:
        pats = {}
        pattern_ids = np.array(
            [pats.setdefault(split_pattern(t)[0], len(pats)) for t in E.tuples]
        )
    for ai, a in enumerate(E.tuples):
        cand = (target != target[ai]) & (rows == rows[ai]).all(axis=1)
        if same_pattern:
            cand &= pattern_ids == pattern_ids[ai]
        hits = np.flatnonzero(cand)
        if hits.size:
            return a, E.tuples[int(hits[0])]
    return None


def is_definable(S: Structure, strict: bool = False):
    """``(verdict, certificate)``; the certificate is a DefiningFormula or a Violation."""
    k = S.target_arity
    part = orbits(S, k, strict=strict)
    target = S.target
    members = [cl for cl in part if cl[0] in target]
    definable = all(
        all(t in target for t in cl) or not any(t in target for t in cl) for cl in part
    )
    if definable:
        if not members:
            return True, DefiningFormula(FALSE)
        if len(members) == len(part):
            return True, DefiningFormula(TRUE)
        levels = type_levels(S)
        depth = levels.stable_depth(k)
        f = disjoin([levels.hintikka(cl[0], depth) for cl in members])
        return True, DefiningFormula(simplify(f))
    for a in S.tuples(k):
        cl = part.class_of(a)
        for b in S.tuples(k):
            if part.class_of(b) == cl and (a in target) != (b in target):
                for g in automorphisms(S, strict=strict):
                    if apply_perm(g, a) == b:
                        return False, Violation(g, a, b)
    raise AssertionError("orbit test failed but no violating pair was found")


def synthesize(S: Structure, E: DefinableEnumeration):
    """Defining formula built from sign patterns over ``E``; returns ``(formula, m_star)``.

    Raises :class:`NotDefinable` (carrying a Violation) when no level of
    ``E`` separates the target.
    """
    m_star = None
    for m in range(len(E) + 1):
        if witness_pair(S, m, E) is None:
            m_star = m
            break
    if m_star is None:
        _, cert = is_definable(S)
        raise NotDefinable(cert)
    patterns = []
    for t in sorted(S.target):
        p = E.pattern(t, m_star)
        if p not in patterns:
            patterns.append(p)
    f = disjoin([SigmaPattern(p).formula(E) for p in patterns])
    return simplify(f), m_star


def check_certificate(S: Structure, cert: Certificate) -> bool:
    """Re-verify a certificate from scratch against ``S``."""
    k = S.target_arity
    if isinstance(cert, DefiningFormula):
        return relation_table(S, cert.formula, range(k)) == S.target
    p = tuple(cert.permutation)
    if sorted(p) != list(range(S.size)):
        return False
    for name, _ in S.signature:
        if not preserves_check(S, p, name)[0]:
            return False
    return (
        apply_perm(p, cert.a) == tuple(cert.b)
        and (tuple(cert.a) in S.target) != (tuple(cert.b) in S.target)
    )
