"""A map on sequences that nearly preserves everything definable but breaks the target.

When the target is not definable, pick at each index a pair of tuples that no
enumerated definable relation (up to some level) separates, but the target
does. Stacking the pairs gives a map between sequences. The target fails at
every index; the t-th enumerated relation only fails early on.

Run: python3 demos/03_counterexample_map.py
"""
from findef import BY_RANK, Structure, enumerate_definables, is_definable
from findef.seqspace import (
    build_counterexample_map,
    canonical_selection,
    render_map,
    selection_exceptions,
    witness_sequences,
)

K = 8

# a path 0-1-2-3-4; the target is one end and its neighbour, which the
# reflection of the path moves
edges = {(i, i + 1) for i in range(4)} | {(i + 1, i) for i in range(4)}
S = Structure.build(5, {"E": (2, edges)}, ("R", 1, [(0,), (1,)]))
print("definable?", is_definable(S)[0])

E = enumerate_definables(S, 1, BY_RANK)
print(f"{len(E)} enumerated definable relations (by rank):", [sorted(t) for t in E.tables()])
m = build_counterexample_map(S, E, K)
print(render_map(m), end="")

a, _ = witness_sequences(S, E, K)
sel = canonical_selection(m, a)
print("target exceptions:", selection_exceptions(S, m, "R", sel).sorted())
for t, table in enumerate(E.tables(), start=1):
    print(f"P{t} exceptions:", selection_exceptions(S, m, table, sel, arity=1).sorted())
