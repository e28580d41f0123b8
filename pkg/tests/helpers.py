"""Independent oracles and structure generators for the test-suite.

Nothing here calls into the symmetry or definability modules.
"""
import itertools
import random

from findef.formula import And, Atom, Eq, Exists, Forall, Implies, Not, Or, TRUE, FALSE
from findef.structure import Structure


def all_permutations(n):
    return list(itertools.permutations(range(n)))


def preserves(p, table, arity, n):
    return all(
        (t in table) == (tuple(p[v] for v in t) in table)
        for t in itertools.product(range(n), repeat=arity)
    )


def brute_automorphisms(S):
    """Every permutation of the universe, filtered by preservation of Sigma."""
    return [
        p
        for p in all_permutations(S.size)
        if all(preserves(p, rows, arity, S.size) for (_, arity), rows in zip(S.signature, S.interp))
    ]


def brute_orbits(S, arity, group=None):
    group = brute_automorphisms(S) if group is None else group
    seen, classes = set(), []
    for t in itertools.product(range(S.size), repeat=arity):
        if t in seen:
            continue
        orbit = sorted({tuple(g[v] for v in t) for g in group})
        seen.update(orbit)
        classes.append(tuple(orbit))
    return tuple(classes)


def brute_definable(S, group=None):
    """Definable iff every automorphism preserves the target."""
    group = brute_automorphisms(S) if group is None else group
    return all(preserves(p, S.target, S.target_arity, S.size) for p in group)


def all_tables(n, arity):
    tuples = list(itertools.product(range(n), repeat=arity))
    for bits in range(2 ** len(tuples)):
        yield frozenset(t for i, t in enumerate(tuples) if bits >> i & 1)


def exhaustive_population(max_size=3):
    """All structures with one binary relation E and a unary target, n <= max_size."""
    for n in range(1, max_size + 1):
        for rows in all_tables(n, 2):
            base = Structure.build(n, {"E": (2, rows)}, ("R", 1, ()))
            for target in all_tables(n, 1):
                yield base.with_target(target)


def random_table(rng, n, arity, density=None):
    density = rng.random() if density is None else density
    return [t for t in itertools.product(range(n), repeat=arity) if rng.random() < density]


def random_structure(rng, max_size=5, symmetric_bias=0.5):
    """One or two relations of arity <= 2 and a target of arity <= 2.

    With probability ``symmetric_bias`` the relations are closed under a random
    permutation so the structure has nontrivial automorphisms; the target is
    sometimes made a union of brute-force orbits so both verdicts occur.
    """
    n = rng.randint(1, max_size)
    rels = {}
    sym = rng.random() < symmetric_bias
    g = list(range(n))
    rng.shuffle(g)
    for name in ["P", "Q"][: rng.randint(1, 2)]:
        arity = rng.randint(1, 2)
        rows = set(random_table(rng, n, arity))
        if sym:
            closure = set(rows)
            frontier = list(rows)
            while frontier:
                t = frontier.pop()
                u = tuple(g[v] for v in t)
                if u not in closure:
                    closure.add(u)
                    frontier.append(u)
            rows = closure
        rels[name] = (arity, rows)
    k = rng.randint(1, 2)
    S = Structure.build(n, rels, ("R", k, random_table(rng, n, k)))
    if rng.random() < 0.35:
        classes = brute_orbits(S, k)
        chosen = [t for cl in classes if rng.random() < 0.5 for t in cl]
        S = S.with_target(chosen)
    return S


def random_population(count, seed, max_size=5):
    rng = random.Random(seed)
    return [random_structure(rng, max_size) for _ in range(count)]


def random_formula(rng, S, free, rank, size=4):
    """Random formula over ``S``'s signature with free variables among ``free``
    and quantifier rank at most ``rank``."""
    free = list(free)
    if size <= 0 or rng.random() < 0.25:
        choice = rng.random()
        if choice < 0.05:
            return rng.choice([TRUE, FALSE])
        if choice < 0.3 or not len(S.signature):
            return Eq(rng.choice(free), rng.choice(free))
        name, arity = rng.choice(S.signature.symbols)
        return Atom(name, tuple(rng.choice(free) for _ in range(arity)))
    kind = rng.random()
    if kind < 0.15:
        return Not(random_formula(rng, S, free, rank, size - 1))
    if kind < 0.6 or rank == 0:
        cls = rng.choice([And, Or, Implies])
        return cls(
            random_formula(rng, S, free, rank, size - 1),
            random_formula(rng, S, free, rank, size - 1),
        )
    v = max(free) + 1 if rng.random() < 0.8 else rng.choice(free)
    cls = rng.choice([Exists, Forall])
    inner = sorted(set(free) | {v})
    return cls(v, random_formula(rng, S, inner, rank - 1, size - 1))
