"""Automorphisms, orbits on tuples, rank-q types and Hintikka formulas.

Two independent routes partition ``A^k``: :func:`orbits` goes through the
explicit automorphism group, :func:`type_partition` through back-and-forth
refinement of atomic types. On finite structures the stable type partition
and the orbit partition coincide, which the test-suite checks.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .formula import TRUE, Atom, Eq, Exists, Forall, Formula, Not, conjoin, disjoin
from .structure import Structure, check_limits

Permutation = tuple  # image vector: p[i] is the image of i


def identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def compose(p, q) -> tuple[int, ...]:
    """``p o q``: apply ``q`` first, then ``p``."""
    return tuple(p[i] for i in q)


def inverse(p) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def is_permutation(p, n: int | None = None) -> bool:
    n = len(p) if n is None else n
    return len(p) == n and sorted(p) == list(range(n))


def apply_perm(p, t) -> tuple[int, ...]:
    return tuple(p[v] for v in t)


def cycle_notation(p) -> str:
    """Cycles of length > 1, e.g. ``(0 2)(1 3)``; ``()`` for the identity."""
    seen, out = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cycle, i = [], start
        while i not in seen:
            seen.add(i)
            cycle.append(i)
            i = p[i]
        out.append("(" + " ".join(map(str, cycle)) + ")")
    return "".join(out) or "()"


def preserves_check(S: Structure, p, table, arity: int | None = None):
    """Does ``p`` preserve ``table``? Returns ``(ok, violations)``.

    ``table`` is a tuple set or the name of a relation of ``S``. A violation is
    a tuple ``t`` whose membership differs from that of ``p(t)``.
    """
    if isinstance(table, str):
        arity = S.arity(table)
        table = S.table(table)
    if arity is None:
        if not table:
            raise ValueError("arity is required for an empty table")
        arity = len(next(iter(table)))
    violations = [
        t for t in S.tuples(arity) if (t in table) != (apply_perm(p, t) in table)
    ]
    return not violations, violations


# -- automorphisms ---------------------------------------------------------

def _element_types(n, signature, interp):
    types = []
    for a in range(n):
        types.append(
            tuple((a,) * arity in rows for (_, arity), rows in zip(signature, interp))
        )
    return types


@functools.lru_cache(maxsize=256)
def _automorphisms(key) -> tuple[tuple[int, ...], ...]:
    n, signature, interp = key
    rels = [(arity, rows) for (_, arity), rows in zip(signature, interp)]
    etype = _element_types(n, signature, interp)
    image = [None] * n
    used = [False] * n
    found = []

    def consistent(i):
        # tuples over {0..i} that mention i
        for arity, rows in rels:
            for t in itertools.product(range(i + 1), repeat=arity):
                if i not in t:
                    continue
                if (t in rows) != (tuple(image[v] for v in t) in rows):
                    return False
        return True

    def extend(i):
        if i == n:
            found.append(tuple(image))
            return
        for c in range(n):
            if used[c] or etype[c] != etype[i]:
                continue
            image[i] = c
            used[c] = True
            if consistent(i):
                extend(i + 1)
            used[c] = False
        image[i] = None

    extend(0)
    return tuple(found)


def automorphisms(S: Structure, strict: bool = False) -> list[tuple[int, ...]]:
    """All automorphisms of the Sigma-reduct, in lexicographic order of image vectors."""
    check_limits(S, strict=strict)
    return list(_automorphisms(S.sigma_key))


# -- partitions ------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """A partition of ``A^arity``; classes sorted, ordered by least member."""

    arity: int
    classes: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_labels(cls, arity: int, tuples: Iterable, label) -> "Partition":
        groups: dict = {}
        for t in tuples:
            groups.setdefault(label(t), []).append(tuple(t))
        classes = sorted(tuple(sorted(g)) for g in groups.values())
        return cls(arity, tuple(classes))

    @cached_property
    def _index(self) -> dict:
        return {t: i for i, cl in enumerate(self.classes) for t in cl}

    def class_of(self, t) -> int:
        return self._index[tuple(t)]

    def table(self, i: int) -> frozenset:
        return frozenset(self.classes[i])

    def tables(self) -> list[frozenset]:
        return [frozenset(cl) for cl in self.classes]

    def refines(self, other: "Partition") -> bool:
        return all(len({other.class_of(t) for t in cl}) == 1 for cl in self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)


def orbits(S: Structure, arity: int, strict: bool = False) -> Partition:
    check_limits(S, arity, strict=strict)
    group = automorphisms(S, strict=strict)
    assigned = set()
    classes = []
    for t in S.tuples(arity):
        if t in assigned:
            continue
        orbit = sorted({apply_perm(g, t) for g in group})
        assigned.update(orbit)
        classes.append(tuple(orbit))
    return Partition(arity, tuple(classes))


# -- rank-q types ----------------------------------------------------------

def split_pattern(t) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(pattern, core)``: the duplicate-free core in first-occurrence order,
    and for each position the index of its value inside the core."""
    where: dict = {}
    core, pattern = [], []
    for v in t:
        if v not in where:
            where[v] = len(core)
            core.append(v)
        pattern.append(where[v])
    return tuple(pattern), tuple(core)


class TypeLevels:
    """Rank-q type ids of duplicate-free tuples of every length ``1..n``.

    ``ids[q][j]`` maps each duplicate-free ``j``-tuple to an integer id; equal
    ids mean equal rank-q type. A tuple with repeated components has the type
    of its core together with its equality pattern. Refinement runs until no
    length splits any further (``fixpoint``), which happens by depth ``n - 1``.
    """

    def __init__(self, n: int, signature, interp):
        self.n = n
        self.signature = signature
        self.interp = interp
        self.tuples = {j: list(itertools.permutations(range(n), j)) for j in range(1, n + 1)}
        self.ids = [self._atomic()]
        while True:
            nxt = self._refine(self.ids[-1])
            if self._counts(nxt) == self._counts(self.ids[-1]):
                break
            self.ids.append(nxt)
            if len(self.ids) > n + 1:
                raise RuntimeError("type refinement did not stabilize by depth n")
        self.fixpoint = len(self.ids) - 1
        self._hints: dict = {}

    def _counts(self, level):
        return [len(set(level[j].values())) for j in range(1, self.n + 1)]

    def _atomic(self):
        rels = [(arity, rows) for (_, arity), rows in zip(self.signature, self.interp)]
        level = {0: {(): 0}}
        for j in range(1, self.n + 1):
            intern: dict = {}
            ids = {}
            last = j - 1
            positions = [
                [p for p in itertools.product(range(j), repeat=arity) if last in p]
                for arity, _ in rels
            ]
            for u in self.tuples[j]:
                facts = tuple(
                    tuple(tuple(u[i] for i in p) in rows for p in ps)
                    for (_, rows), ps in zip(rels, positions)
                )
                key = (level[j - 1][u[:-1]], facts)
                ids[u] = intern.setdefault(key, len(intern))
            level[j] = ids
        return level

    def _refine(self, prev):
        level = {0: {(): 0}}
        universe = range(self.n)
        for j in range(1, self.n + 1):
            intern: dict = {}
            ids = {}
            for u in self.tuples[j]:
                if j < self.n:
                    ext = sorted({prev[j + 1][u + (c,)] for c in universe if c not in u})
                    key = (prev[j][u], tuple(ext))
                else:
                    key = (prev[j][u],)
                ids[u] = intern.setdefault(key, len(intern))
            level[j] = ids
        return level

    def label(self, t, q: int):
        pattern, core = split_pattern(t)
        level = self.ids[min(q, self.fixpoint)]
        return pattern, level[len(core)][core]

    def partition(self, arity: int, q: int) -> Partition:
        tuples = itertools.product(range(self.n), repeat=arity)
        return Partition.from_labels(arity, tuples, lambda t: self.label(t, q))

    def stable_depth(self, arity: int) -> int:
        target = len(self.partition(arity, self.fixpoint))
        for q in range(self.fixpoint + 1):
            if len(self.partition(arity, q)) == target:
                return q
        return self.fixpoint

    def hintikka(self, t, q: int) -> Formula:
        t = tuple(t)
        key = (q, self.label(t, q))
        cached = self._hints.get(key)
        if cached is not None:
            return cached
        k = len(t)
        if q == 0:
            f = self._atomic_formula(t)
        else:
            reps: dict = {}
            for c in range(self.n):
                reps.setdefault(self.label(t + (c,), q - 1), c)
            subs = [self.hintikka(t + (c,), q - 1) for c in reps.values()]
            f = conjoin([Exists(k, s) for s in subs] + [Forall(k, disjoin(subs))])
        self._hints[key] = f
        return f

    def _atomic_formula(self, t) -> Formula:
        k = len(t)
        parts = []
        for i, j in itertools.combinations(range(k), 2):
            eq = Eq(i, j)
            parts.append(eq if t[i] == t[j] else Not(eq))
        for (name, arity), rows in zip(self.signature, self.interp):
            for p in itertools.product(range(k), repeat=arity):
                atom = Atom(name, p)
                parts.append(atom if tuple(t[i] for i in p) in rows else Not(atom))
        return conjoin(parts) if parts else TRUE


@functools.lru_cache(maxsize=256)
def _type_levels(key) -> TypeLevels:
    return TypeLevels(*key)


def type_levels(S: Structure) -> TypeLevels:
    return _type_levels(S.sigma_key)


def type_partition(S: Structure, arity: int, depth="stable", strict: bool = False):
    """Rank-``depth`` type partition of ``A^arity``; returns ``(partition, depth)``.

    With ``depth="stable"`` the returned depth is the least rank at which the
    partition of ``arity``-tuples reaches its final form.
    """
    check_limits(S, arity, strict=strict)
    levels = type_levels(S)
    if depth in ("stable", None):
        depth = levels.stable_depth(arity)
    elif depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    return levels.partition(arity, depth), depth


def stable_depth(S: Structure, arity: int) -> int:
    return type_levels(S).stable_depth(arity)


def hintikka_formula(S: Structure, t: Sequence[int], depth=None) -> Formula:
    """Formula in ``x0..x(k-1)`` of quantifier rank ``depth`` defining the rank-``depth``
    type class of ``t``. ``depth=None`` uses the stable depth for ``len(t)``."""
    levels = type_levels(S)
    if depth is None or depth == "stable":
        depth = levels.stable_depth(len(t))
    return levels.hintikka(tuple(t), depth)
