"""Is the target relation definable? Two small structures, two answers.

Run: python3 demos/01_definability.py
"""
from findef import enumerate_definables, is_definable, load_fixture, synthesize
from findef.formula import node_count, quantifier_rank, relation_table, render_formula
from findef.symmetry import cycle_notation


def brief(f):
    text = render_formula(f)
    if len(text) <= 160:
        return text
    return f"<{node_count(f)} nodes, quantifier rank {quantifier_rank(f)}>"


def show(name):
    S = load_fixture(name)
    print(f"== {name}: target {S.target_name} = {sorted(S.target)}")
    ok, cert = is_definable(S)
    if ok:
        print("definable by", brief(cert.formula))
        # the formula is a certificate: evaluate it and compare tables
        print("table check:", relation_table(S, cert.formula, range(S.target_arity)) == S.target)
        f, level = synthesize(S, enumerate_definables(S, S.target_arity))
        print(f"from sign patterns (level {level}):", brief(f))
    else:
        p = cert.permutation
        print(f"not definable: {cycle_notation(p)} is an automorphism sending {cert.a} to {cert.b},")
        print(f"but only one of them is in {S.target_name}")
    print()


# the middle of a three-element order is pinned down by the order itself
show("L3")
# in two disjoint edges, swapping the edges is a symmetry that moves the target
show("2K2")
# opposite corners of the 4-cycle are "distance two"
show("C4")
