import random

import pytest
from hypothesis import given, settings, strategies as st

from findef.errors import ArityError, FormulaSyntaxError, UnboundVariableError, UnknownSymbolError
from findef.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    SignedFormula,
    evaluate,
    free_vars,
    parse_formula,
    quantifier_rank,
    relation_table,
    relation_table_pointwise,
    render_formula,
    simplify,
)

from helpers import random_formula, random_population


def test_parse_examples(L3, K2):
    assert parse_formula("E x1. (x1 < x0)", L3) == Exists(1, Atom("<", (1, 0)))
    assert parse_formula("(x0 = x0)") == Eq(0, 0)
    with pytest.raises(ArityError):
        parse_formula("E(x0)", K2)


def test_parse_quantifier_vs_symbol_named_E(K2):
    f = parse_formula("E x2. (E(x0,x2) & A x3. !(E(x3,x3)))", K2)
    assert f == Exists(2, And(Atom("E", (0, 2)), Forall(3, Not(Atom("E", (3, 3))))))


def test_render_examples():
    assert render_formula(Exists(1, Atom("<", (1, 0)))) == "E x1. ((x1 < x0))"
    assert render_formula(Eq(0, 0)) == "(x0 = x0)"
    assert render_formula(Not(TRUE)) == "!(true)"
    assert render_formula(Atom("E", (0, 1))) == "E(x0,x1)"


@pytest.mark.parametrize(
    "text",
    ["", "(x0 = )", "E x0 (x0 = x0)", "(x0 = x0) extra", "(true & )", "x0", "!(", "(true ; false)"],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_unknown_symbol(K2):
    with pytest.raises(UnknownSymbolError):
        parse_formula("F(x0,x1)", K2)
    with pytest.raises(UnknownSymbolError):
        parse_formula("(x0 < x1)", K2)


def test_redundant_parentheses_and_chains(L3):
    assert parse_formula("((x0 < x1))", L3) == Atom("<", (0, 1))
    assert parse_formula("(true & false & true)") == And(And(TRUE, FALSE), TRUE)
    assert parse_formula("(true -> false)") == Implies(TRUE, FALSE)


def test_evaluate_examples(L3):
    f = parse_formula("E x1. (x1 < x0)", L3)
    # oracle: scan the three possible witnesses directly
    for a in range(3):
        expected = any((w, a) in L3.table("<") for w in range(3))
        assert evaluate(L3, f, {0: a}) == expected
    assert not evaluate(L3, f, {0: 0})
    assert evaluate(L3, f, {0: 2})
    assert evaluate(L3, parse_formula("(x0 = x0)"), {0: 1})


def test_unbound_variable(L3):
    with pytest.raises(UnboundVariableError):
        evaluate(L3, parse_formula("(x0 < x1)", L3), {0: 1})
    with pytest.raises(UnboundVariableError):
        relation_table(L3, parse_formula("(x0 < x1)", L3), [0])


def test_relation_table_examples(L3, K2):
    f = parse_formula("(E x1.(x1 < x0) & E x1.(x0 < x1))", L3)
    assert relation_table(L3, f, [0]) == {(1,)}
    assert relation_table(L3, TRUE, [0]) == {(0,), (1,), (2,)}
    assert relation_table(K2, parse_formula("E(x0,x1)", K2), [0, 1]) == K2.table("E")
    assert relation_table(L3, parse_formula("(x0 < x1)", L3), [1, 0]) == {(1, 0), (2, 0), (2, 1)}


def test_quantifier_rank_examples(L3):
    assert quantifier_rank(parse_formula("(x0 = x1)")) == 0
    assert quantifier_rank(parse_formula("E x1. (x0 < x1)", L3)) == 1
    assert quantifier_rank(parse_formula("E x1. A x2. (x1 < x2)", L3)) == 2


def test_signed_formula():
    assert SignedFormula(TRUE, -1).formula() == Not(TRUE)
    assert SignedFormula(TRUE).formula() == TRUE
    with pytest.raises(ValueError):
        SignedFormula(TRUE, 0)


def test_shadowing(L3):
    f = parse_formula("E x0. (E x0. (x0 < x0) | (x0 = x0))", L3)
    assert evaluate(L3, f, {})
    assert relation_table(L3, f, []) == {()}
    g = parse_formula("E x1. (E x1. (x1 < x0) & (x1 < x0))", L3)
    assert relation_table(L3, g, [0]) == relation_table_pointwise(L3, g, [0])


# -- property tests -------------------------------------------------------

POP = random_population(40, seed=11, max_size=4)


@st.composite
def structure_and_formula(draw, rank=2):
    S = draw(st.sampled_from(POP))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    f = random_formula(rng, S, [0, 1], rank, size=draw(st.integers(0, 6)))
    return S, f


@settings(max_examples=200, deadline=None)
@given(structure_and_formula())
def test_render_parse_round_trip(sf):
    S, f = sf
    assert parse_formula(render_formula(f), S) == f


@settings(max_examples=150, deadline=None)
@given(structure_and_formula(), st.integers(0, 3), st.integers(0, 3))
def test_connective_semantics(sf, a0, a1):
    S, f = sf
    g = Exists(1, f)
    env = {0: a0 % S.size, 1: a1 % S.size}
    v = evaluate(S, f, env)
    assert evaluate(S, Not(f), env) == (not v)
    assert evaluate(S, And(f, Eq(0, 1)), env) == (v and env[0] == env[1])
    assert evaluate(S, g, env) == any(evaluate(S, f, {**env, 1: c}) for c in range(S.size))
    assert evaluate(S, Forall(1, f), env) == all(
        evaluate(S, f, {**env, 1: c}) for c in range(S.size)
    )


@settings(max_examples=200, deadline=None)
@given(structure_and_formula())
def test_vectorized_table_matches_pointwise(sf):
    S, f = sf
    assert relation_table(S, f, [0, 1]) == relation_table_pointwise(S, f, [0, 1])
    assert relation_table(S, f, [1, 0]) == relation_table_pointwise(S, f, [1, 0])


@settings(max_examples=100, deadline=None)
@given(structure_and_formula())
def test_cylindrification(sf):
    S, f = sf
    base = relation_table(S, f, [0, 1])
    wide = relation_table(S, f, [0, 1, 7])
    assert wide == {t + (c,) for t in base for c in range(S.size)}


@settings(max_examples=200, deadline=None)
@given(structure_and_formula())
def test_simplify_is_extensional(sf):
    S, f = sf
    g = simplify(f)
    assert free_vars(g) <= free_vars(f)
    assert quantifier_rank(g) <= quantifier_rank(f)
    assert relation_table(S, g, [0, 1]) == relation_table(S, f, [0, 1])


def test_simplify_collapses_constants():
    a = Atom("P", (0,))
    assert simplify(And(a, TRUE)) == a
    assert simplify(Or(a, TRUE)) == TRUE
    assert simplify(And(a, And(a, a))) == a
    assert simplify(Not(Not(a))) == a
    assert simplify(Exists(3, FALSE)) == FALSE
    assert simplify(Implies(a, FALSE)) == Not(a)
    assert simplify(Not(a)) == Not(a)
