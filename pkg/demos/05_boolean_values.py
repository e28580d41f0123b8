"""Truth values of formulas on sequences are index sets.

Binding variables to sequences, a formula holds at some indices and fails at
others. Connectives act as set operations, and a quantifier is a pointwise
union over the (finite) universe.

Run: python3 demos/05_boolean_values.py
"""
from findef import load_fixture, parse_formula
from findef.seqspace import boolean_valuation, const

S = load_fixture("2K2")
K = 6
binding = {0: (0, 1, 2, 3, 0, 2), 1: (1, 0, 2, 2, 3, 3)}

for text in ["E(x0,x1)", "(x0 = x1)", "!(E(x0,x1))", "(E(x0,x1) | (x0 = x1))", "E x1. E(x0,x1)"]:
    F = parse_formula(text, S)
    print(f"{text:28} {boolean_valuation(S, F, binding, K).sorted()}")

# with constant sequences the value is all or nothing
F = parse_formula("E x2. (E(x0,x2) & E(x2,x1))", S)
print("constants 0,0:", boolean_valuation(S, F, {0: const(0, K), 1: const(0, K)}, K).sorted())
print("constants 0,1:", boolean_valuation(S, F, {0: const(0, K), 1: const(1, K)}, K).sorted())
