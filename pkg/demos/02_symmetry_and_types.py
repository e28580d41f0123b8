"""Orbits of the automorphism group versus first-order types.

On a finite structure both partitions agree once types are taken deep enough.
The interesting part is how deep: a triangle next to a hexagon looks uniform
to quantifier-free and one-quantifier formulas.

Run: python3 demos/02_symmetry_and_types.py
"""
from findef import Structure, automorphisms, orbits, type_partition
from findef.symmetry import type_levels


def cycle(n, offset=0):
    return {((i + offset), (i + 1) % n + offset) for i in range(n)} | {
        ((i + 1) % n + offset, i + offset) for i in range(n)
    }


S = Structure.build(9, {"E": (2, cycle(3) | cycle(6, 3))}, ("R", 1, []))
print("automorphisms:", len(automorphisms(S)))
print("orbits on points:", [[t[0] for t in cl] for cl in orbits(S, 1)])

levels = type_levels(S)
for q in range(levels.fixpoint + 1):
    part = levels.partition(1, q)
    print(f"rank {q} types on points:", [[t[0] for t in cl] for cl in part])

part, depth = type_partition(S, 1)
print("stable at depth", depth)
print("types == orbits:", set(part) == set(orbits(S, 1)))
