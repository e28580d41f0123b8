import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from findef.definability import BY_RANK, ORBIT_ATOMS, enumerate_definables
from findef.errors import Definable, MapFormatError
from findef.formula import And, Exists, Not, evaluate, parse_formula
from findef.seqspace import (
    IndexSet,
    SequenceMap,
    almost_equal,
    boolean_valuation,
    build_counterexample_map,
    canonical_selection,
    check_almost_preserves,
    const,
    extend_map,
    extension_exceptions,
    lift,
    parse_bindings,
    parse_map,
    render_map,
    selection_exceptions,
    witness_sequences,
)
from findef.symmetry import automorphisms, compose

from helpers import brute_definable, random_formula, random_population

POP = random_population(60, seed=9, max_size=4)
NONDEF = [S for S in POP if not brute_definable(S)]


# -- index sets and almost-equality ----------------------------------------

def test_almost_equal_examples():
    assert almost_equal((0, 0, 0, 0), (0, 0, 0, 1), 1) == (True, IndexSet(4, frozenset({3})))
    assert almost_equal((2, 1), (2, 1), 0) == (True, IndexSet(2))
    ok, diff = almost_equal((0, 1, 0, 1), (1, 0, 1, 0), 1)
    assert not ok and diff.sorted() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        almost_equal((0,), (0, 1), 0)


def test_index_set_algebra():
    a = IndexSet(5, frozenset({0, 2}))
    b = IndexSet(5, frozenset({2, 3}))
    assert (a & b).sorted() == [2]
    assert (a | b).sorted() == [0, 2, 3]
    assert (a ^ b).sorted() == [0, 3]
    assert a.complement().sorted() == [1, 3, 4]
    assert a.almost_equal(b, 2) and not a.almost_equal(b, 1)
    assert IndexSet.from_mask(a.mask()) == a
    assert len(IndexSet.full(5)) == 5
    with pytest.raises(ValueError):
        IndexSet(3, frozenset({3}))
    with pytest.raises(ValueError):
        a & IndexSet(4)


# -- maps and lifting --------------------------------------------------------

def test_sequence_map_is_injective():
    with pytest.raises(ValueError):
        SequenceMap.from_pairs([((0, 0), (1, 1)), ((0, 0), (2, 2))])
    m = SequenceMap.from_pairs([((0, 0), (1, 1))])
    assert m[(0, 0)] == (1, 1) and (1, 1) not in m


def test_lift_examples(K2):
    m = lift(K2, (2, 3, 0, 1), [(0, 1, 0, 1)])
    assert m[(0, 1, 0, 1)] == (2, 3, 2, 3)
    ident = lift(K2, (0, 1, 2, 3), [(0, 1, 2, 3), (3, 3, 3, 3)])
    assert all(f == g for f, g in ident.items())


def test_lift_composition(K2):
    rng = random.Random(0)
    fs = [tuple(rng.randrange(4) for _ in range(6)) for _ in range(3)]
    group = automorphisms(K2)
    for p, q in itertools.product(group, repeat=2):
        inner = lift(K2, q, fs)
        outer = lift(K2, p, [inner[f] for f in fs])
        both = lift(K2, compose(p, q), fs)
        assert all(both[f] == outer[inner[f]] for f in fs)


def test_check_almost_preserves_examples(K2):
    m = lift(K2, (1, 0, 3, 2), [(0, 1, 2, 3), (1, 1, 2, 2), (3, 0, 3, 0)])
    ok, report = check_almost_preserves(K2, m, "E", 0)
    assert ok and not report.nonempty()
    bad = SequenceMap.from_pairs([(const(0, 4), const(2, 4))])
    ok, report = check_almost_preserves(K2, bad, "R", 3)
    assert not ok and report.union.sorted() == [0, 1, 2, 3]
    ok, report = check_almost_preserves(K2, SequenceMap(4, (), ()), "E", 0)
    assert ok


def test_almost_preserves_with_formula_and_table(K2):
    m = SequenceMap.from_pairs([(const(0, 3), const(2, 3)), (const(1, 3), const(3, 3))])
    ok, _ = check_almost_preserves(K2, m, parse_formula("E x2. (E(x0,x2) & E(x2,x1))", K2), 0)
    assert ok
    ok, _ = check_almost_preserves(K2, m, {(0,), (1,)}, 0)
    assert not ok
    sel = selection_exceptions(K2, m, "E", (0, 1))
    assert len(sel) == 0


def test_perturbation_stability(K2):
    # a lifted automorphism, then every domain image altered only at J
    rng = random.Random(4)
    K, J = 8, {1, 5}
    fs = [tuple(rng.randrange(4) for _ in range(K)) for _ in range(3)]
    base = lift(K2, (2, 3, 0, 1), fs)
    pairs = []
    for f in fs:
        g = list(base[f])
        for j in J:
            g[j] = rng.randrange(4)
        pairs.append((f, tuple(g)))
    m = SequenceMap.from_pairs(pairs)
    for rel in ("E",):
        _, report = check_almost_preserves(K2, m, rel, 0)
        assert set(report.union) <= J
    E = enumerate_definables(K2, 2)
    for table in E.tables():
        _, report = check_almost_preserves(K2, m, table, 0, arity=2)
        assert set(report.union) <= J


# -- counterexample maps --------------------------------------------------------

def test_counterexample_map_2K2(K2):
    E = enumerate_definables(K2, 1)
    m = build_counterexample_map(K2, E, 4)
    assert list(m.items()) == [(const(0, 4), const(2, 4))]
    ok, report = check_almost_preserves(K2, m, "R", 0)
    assert report.union.sorted() == [0, 1, 2, 3]
    for table in E.tables():
        assert len(check_almost_preserves(K2, m, table, 0, arity=1)[1].union) == 0


def test_counterexample_map_2K2_by_rank(K2):
    E = enumerate_definables(K2, 1, BY_RANK)
    m = build_counterexample_map(K2, E, 6)
    a, _ = witness_sequences(K2, E, 6)
    sel = canonical_selection(m, a)
    assert len(selection_exceptions(K2, m, "R", sel)) == 6
    for t, table in enumerate(E.tables(), start=1):
        assert all(i < t for i in selection_exceptions(K2, m, table, sel, arity=1))


def test_counterexample_on_definable_target(L3):
    with pytest.raises(Definable):
        build_counterexample_map(L3, enumerate_definables(L3, 1), 4)


@pytest.mark.parametrize("S", NONDEF)
@pytest.mark.parametrize("mode", [ORBIT_ATOMS, BY_RANK])
def test_counterexample_bounds(S, mode):
    K = 6
    E = enumerate_definables(S, S.target_arity, mode)
    m = build_counterexample_map(S, E, K)
    a, _ = witness_sequences(S, E, K)
    sel = canonical_selection(m, a)
    assert len(selection_exceptions(S, m, "R", sel)) == K
    for t, table in enumerate(E.tables(), start=1):
        exc = selection_exceptions(S, m, table, sel, arity=S.target_arity)
        assert all(i < t for i in exc)
    if mode == ORBIT_ATOMS:
        for table in E.tables():
            _, report = check_almost_preserves(S, m, table, 0, arity=S.target_arity)
            assert len(report.union) == 0


# -- extension ---------------------------------------------------------------------

def test_extend_2K2(K2):
    m = SequenceMap.from_pairs([(const(0, 5), const(2, 5))])
    E = enumerate_definables(K2, 2)
    b, trace = extend_map(K2, m, const(1, 5), E)
    assert b == const(3, 5)
    assert trace.n0 == 0
    assert trace.levels == (len(E),) * 5
    assert all(len(x) == 0 for x in extension_exceptions(K2, m, const(1, 5), b, E))


def test_extend_existing_entry(K2):
    m = SequenceMap.from_pairs([(const(0, 3), const(2, 3))])
    b, trace = extend_map(K2, m, const(0, 3), enumerate_definables(K2, 2))
    assert b == const(2, 3) and trace.already_mapped


def test_extend_empty_domain(K2):
    E = enumerate_definables(K2, 1)
    b, trace = extend_map(K2, SequenceMap(4, (), ()), (3, 1, 2, 0), E)
    assert b == const(0, 4)
    assert trace.n0 == 0


def _bound_violations(S, m, a, E):
    b, trace = extend_map(S, m, a, E)
    exc = extension_exceptions(S, m, a, b, E)
    return [
        (j, k)
        for j, s in enumerate(exc, start=1)
        for k in s
        if k > max(j, trace.n0)
    ]


@pytest.mark.parametrize("S", NONDEF)
@pytest.mark.parametrize("mode", [ORBIT_ATOMS, BY_RANK])
def test_extension_bound(S, mode):
    rng = random.Random(S.size)
    K = 8
    base = enumerate_definables(S, S.target_arity, mode)
    m = build_counterexample_map(S, base, K)
    E = enumerate_definables(S, len(m) + 1, mode)
    for _ in range(3):
        a = tuple(rng.randrange(S.size) for _ in range(K))
        assert _bound_violations(S, m, a, E) == []


# -- Boolean values --------------------------------------------------------------

def test_valuation_examples(K2):
    x0, x1 = (0, 1, 2, 3), (1, 0, 3, 2)
    F = parse_formula("E(x0,x1)", K2)
    assert boolean_valuation(K2, F, {0: x0, 1: x1}, 4).sorted() == [0, 1, 2, 3]
    assert len(boolean_valuation(K2, parse_formula("(x0 = x0)"), {0: x0}, 4)) == 4
    assert len(boolean_valuation(K2, parse_formula("(x0 = x1)"), {0: x0, 1: x1}, 4)) == 0


@st.composite
def valuation_case(draw):
    S = draw(st.sampled_from(POP))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    K = draw(st.integers(1, 16))
    F = random_formula(rng, S, [0, 1], 2, size=4)
    G = random_formula(rng, S, [0, 1], 2, size=4)
    binding = {v: tuple(rng.randrange(S.size) for _ in range(K)) for v in (0, 1)}
    return S, F, G, binding, K


@settings(max_examples=150, deadline=None)
@given(valuation_case())
def test_valuation_laws(case):
    S, F, G, binding, K = case
    psi = lambda H, b=binding: boolean_valuation(S, H, b, K)
    assert psi(And(F, G)) == psi(F) & psi(G)
    assert psi(Not(F)) == psi(F).complement()
    ex = psi(Exists(1, F))
    union = IndexSet(K)
    for c in range(S.size):
        union = union | psi(F, {**binding, 1: const(c, K)})
    assert ex == union
    for i in range(K):
        pointwise = any(evaluate(S, F, {0: binding[0][i], 1: c}) for c in range(S.size))
        assert (i in ex) == pointwise


@settings(max_examples=60, deadline=None)
@given(valuation_case(), st.integers(0, 4), st.integers(0, 4))
def test_constants_collapse_to_satisfaction(case, c0, c1):
    S, F, _, _, K = case
    env = {0: c0 % S.size, 1: c1 % S.size}
    full = boolean_valuation(S, F, {v: const(c, K) for v, c in env.items()}, K)
    assert (len(full) == K) == evaluate(S, F, env)
    assert len(full) in (0, K)


# -- file formats ------------------------------------------------------------------

def test_map_round_trip(K2):
    m = SequenceMap.from_pairs([((0, 1, 2), (2, 3, 0)), ((3, 3, 3), (1, 1, 1))])
    assert parse_map(render_map(m), 4) == m


@pytest.mark.parametrize(
    "text",
    ["", "0,1 2,3\n", "0,1 -> 2\n", "0,1 -> 2,9\n", "0,1 -> 2,3\n0,1 -> 3,3\n", "0,,1 -> 1,1,1\n"],
)
def test_map_errors(text):
    with pytest.raises(MapFormatError):
        parse_map(text, 4)


def test_bindings():
    assert parse_bindings("x0 = 0,1\n# note\nx3 = 2,2\n") == {0: (0, 1), 3: (2, 2)}
    with pytest.raises(MapFormatError):
        parse_bindings("x0 = 0,1\nx1 = 0\n")
    with pytest.raises(MapFormatError):
        parse_bindings("y = 1\n")
