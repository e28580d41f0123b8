"""Truncated sequence space ``A^[0,K)`` and maps that almost preserve relations.

A sequence is a length-``K`` tuple of universe elements, a finite stand-in
for a function from the naturals into the universe. "Fails only finitely
often" has no absolute meaning at fixed ``K``, so everything here reports the
exact set of failing indices and leaves thresholds (``budget``) to the caller.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence as Seq, Union

import numpy as np

from .definability import (
    ORBIT_ATOMS,
    DefinableEnumeration,
    is_definable,
    witness_pair,
)
from .errors import ArityError, Definable, MapFormatError, UnboundVariableError
from .formula import (
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Top,
    free_vars,
    relation_array,
    render_formula,
    symbol_array,
    table_array,
)
from .structure import Structure


def const(c: int, length: int) -> tuple[int, ...]:
    return (int(c),) * length


@dataclass(frozen=True)
class IndexSet:
    """A subset of ``[0, length)``."""

    length: int
    members: frozenset = frozenset()

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        if any(not 0 <= i < self.length for i in members):
            raise ValueError(f"index out of [0, {self.length})")
        object.__setattr__(self, "members", members)

    @classmethod
    def full(cls, length):
        return cls(length, frozenset(range(length)))

    @classmethod
    def from_mask(cls, mask) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(len(mask), frozenset(int(i) for i in np.flatnonzero(mask)))

    def mask(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=bool)
        out[sorted(self.members)] = True
        return out

    def complement(self) -> "IndexSet":
        return IndexSet(self.length, frozenset(range(self.length)) - self.members)

    def _check(self, other):
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")

    def __and__(self, other):
        self._check(other)
        return IndexSet(self.length, self.members & other.members)

    def __or__(self, other):
        self._check(other)
        return IndexSet(self.length, self.members | other.members)

    def __xor__(self, other):
        self._check(other)
        return IndexSet(self.length, self.members ^ other.members)

    def almost_equal(self, other, budget: int) -> bool:
        """Equal up to at most ``budget`` positions (the truncated quotient by finite sets)."""
        return len(self ^ other) <= budget

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, i):
        return i in self.members

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __repr__(self):
        return f"IndexSet({self.length}, {self.sorted()})"


def almost_equal(f: Seq[int], g: Seq[int], budget: int):
    """``(|{i : f(i) != g(i)}| <= budget, difference set)``."""
    if len(f) != len(g):
        raise ValueError(f"length mismatch: {len(f)} vs {len(g)}")
    diff = IndexSet(len(f), frozenset(i for i, (x, y) in enumerate(zip(f, g)) if x != y))
    return len(diff) <= budget, diff


@dataclass(frozen=True)
class SequenceMap:
    """Finite injective partial map on sequences of a common length."""

    length: int
    domain: tuple = ()
    images: tuple = ()

    def __post_init__(self):
        domain = tuple(tuple(int(v) for v in f) for f in self.domain)
        images = tuple(tuple(int(v) for v in g) for g in self.images)
        if len(domain) != len(images):
            raise ValueError("domain and images differ in length")
        for s in domain + images:
            if len(s) != self.length:
                raise ValueError(f"sequence of length {len(s)} in a length-{self.length} map")
        if len(set(domain)) != len(domain):
            raise ValueError("repeated domain sequence")
        if len(set(images)) != len(images):
            raise ValueError("map is not injective")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "images", images)

    @classmethod
    def from_pairs(cls, pairs: Iterable, length: int | None = None) -> "SequenceMap":
        pairs = list(pairs)
        if length is None:
            if not pairs:
                raise ValueError("length is required for an empty map")
            length = len(pairs[0][0])
        return cls(length, tuple(f for f, _ in pairs), tuple(g for _, g in pairs))

    def __len__(self):
        return len(self.domain)

    def __contains__(self, f):
        return tuple(f) in self.domain

    def __getitem__(self, f):
        return self.images[self.domain.index(tuple(f))]

    def items(self):
        return list(zip(self.domain, self.images))

    def extended(self, f, g) -> "SequenceMap":
        return SequenceMap(self.length, self.domain + (tuple(f),), self.images + (tuple(g),))

    def domain_array(self) -> np.ndarray:
        return np.array(self.domain, dtype=np.intp).reshape(len(self), self.length)

    def image_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.intp).reshape(len(self), self.length)


def lift(S: Structure, p: Seq[int], fs: Iterable[Seq[int]]) -> SequenceMap:
    """Pointwise image map ``f -> (i -> p(f(i)))`` on the given sequences."""
    p = tuple(p)
    if sorted(p) != list(range(S.size)):
        raise ValueError(f"{p} is not a permutation of the universe")
    fs = list(dict.fromkeys(tuple(f) for f in fs))
    if not fs:
        return SequenceMap(0)
    length = len(fs[0])
    return SequenceMap(length, tuple(fs), tuple(tuple(p[v] for v in f) for f in fs))


# -- almost preservation ---------------------------------------------------

Relation = Union[str, Formula, frozenset, set]


def relation_data(S: Structure, relation: Relation, arity: int | None = None):
    """``(label, arity, boolean array)`` for a relation name, formula or tuple set."""
    if isinstance(relation, str):
        arr = symbol_array(S, relation)
        return relation, arr.ndim, arr
    if isinstance(relation, Formula):
        fv = free_vars(relation)
        r = arity if arity is not None else (max(fv) + 1 if fv else 0)
        return render_formula(relation), r, relation_array(S, relation, range(r))
    table = frozenset(relation)
    if arity is None:
        if not table:
            raise ValueError("arity is required for an empty table")
        arity = len(next(iter(table)))
    return "<table>", arity, table_array(S.size, table, arity)


def selection_exceptions(S, m: SequenceMap, relation: Relation, selection, arity=None) -> IndexSet:
    """Indices where ``relation`` is not transferred along one selection of domain entries."""
    _, r, arr = relation_data(S, relation, arity)
    if len(selection) != r:
        raise ArityError(f"selection of length {len(selection)} for an arity-{r} relation")
    return _selection_exceptions(arr, m, selection)


def _selection_exceptions(arr, m, selection):
    if not selection:
        return IndexSet(m.length)
    dom, img = m.domain_array(), m.image_array()
    sel = list(selection)
    before = arr[tuple(dom[sel])]
    after = arr[tuple(img[sel])]
    return IndexSet.from_mask(before != after)


@dataclass
class ExceptionReport:
    """Failure indices of one relation, per ordered selection of domain entries."""

    relation: str
    length: int
    selections: dict = field(default_factory=dict)

    @property
    def union(self) -> IndexSet:
        out = IndexSet(self.length)
        for s in self.selections.values():
            out = out | s
        return out

    @property
    def max_size(self) -> int:
        return max((len(s) for s in self.selections.values()), default=0)

    def holds(self, budget: int) -> bool:
        return self.max_size <= budget

    def nonempty(self) -> dict:
        return {sel: s for sel, s in self.selections.items() if len(s)}


def check_almost_preserves(
    S: Structure, m: SequenceMap, relation: Relation, budget: int, arity: int | None = None
):
    """Check every ordered selection (with repetition) of domain entries.

    Returns ``(ok, report)``; ``ok`` iff no selection fails on more than
    ``budget`` indices.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    label, r, arr = relation_data(S, relation, arity)
    report = ExceptionReport(label, m.length)
    if len(m) == 0:
        return True, report
    for sel in itertools.product(range(len(m)), repeat=r):
        report.selections[sel] = _selection_exceptions(arr, m, sel)
    return report.holds(budget), report


# -- the counterexample map ------------------------------------------------

def _level(E: DefinableEnumeration, k: int) -> int:
    # orbit-atoms is a complete basis: every finite prefix of the full
    # enumeration is already decided by all of it
    return len(E) if E.mode == ORBIT_ATOMS else min(k, len(E))


def witness_sequences(S: Structure, E: DefinableEnumeration, length: int):
    """Coordinate sequences ``a_1..a_r`` and ``b_1..b_r`` of the per-index witness pairs."""
    if length <= 0:
        raise ValueError("length must be positive")
    ok, cert = is_definable(S)
    if ok:
        raise Definable(cert)
    pairs = []
    for i in range(length):
        pair = witness_pair(S, _level(E, i), E, same_pattern=True)
        assert pair is not None, "non-definable target must have witnesses at every level"
        pairs.append(pair)
    r = S.target_arity
    a = [tuple(pairs[i][0][j] for i in range(length)) for j in range(r)]
    b = [tuple(pairs[i][1][j] for i in range(length)) for j in range(r)]
    return a, b


def build_counterexample_map(S: Structure, E: DefinableEnumeration, length: int) -> SequenceMap:
    """Map ``a_j -> b_j`` built from witness pairs, one pair per index.

    At index ``i`` the pair agrees on the first ``min(i, M)`` enumerated
    relations (all of them for ``orbit-atoms``) and disagrees on the target,
    so the target fails at every index while ``P_t`` can only fail below ``t``.
    """
    a, b = witness_sequences(S, E, length)
    pairs = list(dict.fromkeys(zip(a, b)))
    return SequenceMap.from_pairs(pairs, length)


def canonical_selection(m: SequenceMap, seqs: Seq) -> tuple[int, ...]:
    return tuple(m.domain.index(tuple(f)) for f in seqs)


# -- one-step extension ----------------------------------------------------

@dataclass(frozen=True)
class ExtensionTrace:
    """Per index ``k``: the realized level ``m_k``, the sign pattern of
    ``(f(k), a(k))`` up to the available level, and the chosen ``b(k)``."""

    levels: tuple[int, ...]
    patterns: tuple[tuple[int, ...], ...]
    values: tuple[int, ...]
    n0: int
    already_mapped: bool = False


def extend_map(S: Structure, m: SequenceMap, a: Seq[int], E: DefinableEnumeration):
    """Choose an image ``b`` for a new sequence ``a``; returns ``(b, trace)``.

    ``E`` enumerates ``(d+1)``-ary relations, read as ``P_i(f_1, .., f_d, y)``
    with the domain of ``m`` in stored order. At each index the image of
    ``a(k)`` is the least ``y`` matching the sign pattern of ``a(k)`` over the
    longest prefix that the images of ``f_1(k)..f_d(k)`` can still realize.
    """
    a = tuple(int(v) for v in a)
    if len(a) != m.length and len(m):
        raise ValueError(f"sequence of length {len(a)} for a length-{m.length} map")
    if a in m:
        return m[a], ExtensionTrace((), (), m[a], 0, already_mapped=True)
    d = len(m)
    if E.arity != d + 1:
        raise ArityError(f"enumeration arity {E.arity} != domain size + 1 = {d + 1}")
    if any(not 0 <= v < S.size for v in a):
        raise ValueError("sequence value out of range")
    n, M = S.size, len(E)
    length = len(a)
    member = E.membership.reshape((n,) * (d + 1) + (M,))
    dom = m.domain_array() if d else np.zeros((0, length), dtype=np.intp)
    img = m.image_array() if d else np.zeros((0, length), dtype=np.intp)

    levels, patterns, values = [], [], []
    n0 = 0
    for k in range(length):
        x = tuple(int(v) for v in dom[:, k])
        xp = tuple(int(v) for v in img[:, k])
        here, there = member[x], member[xp]  # shape (n, M): pattern of (x, y) for each y
        sigma = here[a[k]]
        top = _level(E, k)
        agree = there == sigma
        prefix = np.where(agree.all(axis=1), M, np.argmin(agree, axis=1))
        mk = min(top, int(prefix.max()))
        y = int(np.flatnonzero(prefix >= mk)[0])
        levels.append(mk)
        patterns.append(tuple(1 if s else -1 for s in sigma[:top]))
        values.append(y)
        # (Ey) P^sigma prefixes transfer at k iff both sides realize the same full patterns
        if {r.tobytes() for r in here} != {r.tobytes() for r in there}:
            n0 = k
    trace = ExtensionTrace(tuple(levels), tuple(patterns), tuple(values), n0)
    return tuple(values), trace


def extension_exceptions(
    S: Structure, m: SequenceMap, a: Seq[int], b: Seq[int], E: DefinableEnumeration
) -> list[IndexSet]:
    """For each ``P_j``: indices where ``P_j(f(k), a(k))`` and ``P_j(phi f(k), b(k))`` differ."""
    d = len(m)
    if E.arity != d + 1:
        raise ArityError(f"enumeration arity {E.arity} != domain size + 1 = {d + 1}")
    n, M = S.size, len(E)
    member = E.membership.reshape((n,) * (d + 1) + (M,))
    length = len(a)
    dom = m.domain_array() if d else np.zeros((0, length), dtype=np.intp)
    img = m.image_array() if d else np.zeros((0, length), dtype=np.intp)
    before = member[tuple(dom) + (np.asarray(a),)]  # (K, M)
    after = member[tuple(img) + (np.asarray(b),)]
    return [IndexSet.from_mask(before[:, j] != after[:, j]) for j in range(M)]


# -- Boolean-valued interpretation ------------------------------------------

def boolean_valuation(
    S: Structure, F: Formula, binding: Mapping[int, Seq[int]], length: int
) -> IndexSet:
    """The index set ``{i : S |= F[x := binding[x](i)]}``."""
    env = {}
    for v, seq in binding.items():
        if len(seq) != length:
            raise ValueError(f"x{v} is bound to a sequence of length {len(seq)}, expected {length}")
        env[v] = np.asarray(seq, dtype=np.intp)
    universe = [np.full(length, c, dtype=np.intp) for c in range(S.size)]

    def look(env, v):
        try:
            return env[v]
        except KeyError:
            raise UnboundVariableError(f"x{v} is unbound") from None

    def go(f, env):
        if isinstance(f, Top):
            return np.ones(length, dtype=bool)
        if isinstance(f, Bottom):
            return np.zeros(length, dtype=bool)
        if isinstance(f, Atom):
            return symbol_array(S, f.symbol)[tuple(look(env, v) for v in f.args)]
        if isinstance(f, Eq):
            return look(env, f.left) == look(env, f.right)
        if isinstance(f, Not):
            return ~go(f.sub, env)
        if isinstance(f, And):
            return go(f.left, env) & go(f.right, env)
        if isinstance(f, Or):
            return go(f.left, env) | go(f.right, env)
        if isinstance(f, Implies):
            return ~go(f.left, env) | go(f.right, env)
        if isinstance(f, (Exists, Forall)):
            parts = [go(f.body, {**env, f.var: c}) for c in universe]
            stacked = np.array(parts).reshape(S.size, length)
            return stacked.any(axis=0) if isinstance(f, Exists) else stacked.all(axis=0)
        raise TypeError(f"not a formula: {f!r}")

    return IndexSet.from_mask(go(F, env))


# -- file formats ------------------------------------------------------------

def parse_sequence(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError(f"bad sequence {text!r}")
    return tuple(int(p) for p in parts)


def _content_lines(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_map(text: str, size: int | None = None) -> SequenceMap:
    """Lines ``v0,..,v(K-1) -> w0,..,w(K-1)``; K is fixed by the first line."""
    pairs, length = [], None
    for lineno, line in _content_lines(text):
        if "->" not in line:
            raise MapFormatError("expected 'SEQ -> SEQ'", lineno)
        left, right = line.split("->", 1)
        try:
            f, g = parse_sequence(left), parse_sequence(right)
        except ValueError as e:
            raise MapFormatError(str(e), lineno) from None
        if length is None:
            length = len(f)
        if len(f) != length or len(g) != length:
            raise MapFormatError(f"expected sequences of length {length}", lineno)
        if size is not None and any(not 0 <= v < size for v in f + g):
            raise MapFormatError(f"element out of range [0, {size})", lineno)
        pairs.append((f, g))
    if not pairs:
        raise MapFormatError("empty map file")
    try:
        return SequenceMap.from_pairs(pairs, length)
    except ValueError as e:
        raise MapFormatError(str(e)) from None


def render_map(m: SequenceMap) -> str:
    return "".join(
        ",".join(map(str, f)) + " -> " + ",".join(map(str, g)) + "\n" for f, g in m.items()
    )


_BINDING = re.compile(r"x(\d+)\s*[=:]\s*(.+)\Z")


def parse_bindings(text: str, size: int | None = None) -> dict[int, tuple[int, ...]]:
    """Lines ``xN = v0,v1,...`` binding variables to sequences of one common length."""
    out, length = {}, None
    for lineno, line in _content_lines(text):
        mt = _BINDING.match(line)
        if mt is None:
            raise MapFormatError("expected 'xN = v0,v1,...'", lineno)
        try:
            seq = parse_sequence(mt.group(2))
        except ValueError as e:
            raise MapFormatError(str(e), lineno) from None
        if length is None:
            length = len(seq)
        if len(seq) != length:
            raise MapFormatError(f"expected a sequence of length {length}", lineno)
        if size is not None and any(not 0 <= v < size for v in seq):
            raise MapFormatError(f"element out of range [0, {size})", lineno)
        out[int(mt.group(1))] = seq
    if not out:
        raise MapFormatError("no bindings")
    return out
