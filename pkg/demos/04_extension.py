"""Extending a sequence map by one more sequence.

Given a map and a new sequence a, choose b index by index so that, as far as
the target side allows, (f(k), a(k)) and (image(k), b(k)) satisfy the same
enumerated definable relations. The trace shows the level reached at each
index and the threshold n0 past which nothing can go wrong.

Run: python3 demos/04_extension.py
"""
from findef import enumerate_definables, load_fixture
from findef.seqspace import SequenceMap, const, extend_map, extension_exceptions

S = load_fixture("2K2")
K = 6
m = SequenceMap.from_pairs([(const(0, K), const(2, K))])
E = enumerate_definables(S, 2)

for a in [const(1, K), (1, 2, 3, 0, 1, 0)]:
    b, trace = extend_map(S, m, a, E)
    print("a =", a, "-> b =", b)
    print("  levels m_k:", trace.levels, " n0:", trace.n0)
    for j, exc in enumerate(extension_exceptions(S, m, a, b, E), start=1):
        print(f"  P{j} exceptions:", exc.sorted())
