"""Exhaustive and random families of modules and morphisms for property checks."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Optional

from sympy import factorint
from sympy.utilities.iterables import partitions

from .fpmod import MOD_PRIME_POWER, ZZ, FpModule, FpMorphism, HomSpace, Ring
from .linalg import IntMatrix


def _partitions(e: int) -> list[list[int]]:
    out = []
    for P in partitions(e):
        out.append(sorted((k for k, m in P.items() for _ in range(m)), reverse=True))
    return out


def abelian_invariants(order: int) -> list[tuple[int, ...]]:
    """Invariant factors d1 | d2 | ... of every abelian group of the given order."""
    if order == 1:
        return [()]
    choices = []
    for p, e in sorted(factorint(order).items()):
        choices.append([(p, part) for part in _partitions(e)])
    out = []
    for combo in itertools.product(*choices):
        width = max(len(part) for _, part in combo)
        factors = [1] * width
        for p, part in combo:
            # largest prime powers go into the last invariant factor
            for i, k in enumerate(part):
                factors[width - 1 - i] *= p ** k
        out.append(tuple(factors))
    return sorted(out)


def finite_modules(max_order: int, ring: Ring = ZZ) -> list[FpModule]:
    """One module per isomorphism class of finite modules of order <= max_order."""
    out = []
    for order in range(1, max_order + 1):
        for inv in abelian_invariants(order):
            if ring.kind == MOD_PRIME_POWER and any(ring.characteristic % d for d in inv):
                continue
            out.append(FpModule.from_invariants(inv, ring=ring))
    return out


def p_groups(p: int, max_order: int, max_exponent: Optional[int] = None, ring: Ring = ZZ) -> list[FpModule]:
    out = []
    e = 0
    while p ** e <= max_order:
        for part in _partitions(e) if e else [[]]:
            if max_exponent is not None and part and part[0] > max_exponent:
                continue
            out.append(FpModule.from_invariants([p ** k for k in sorted(part)], ring=ring))
        e += 1
    return out


def random_unimodular(rng: random.Random, n: int, steps: int = 6, bound: int = 3) -> IntMatrix:
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix.from_rows(rows, n)


def scrambled(rng: random.Random, M: FpModule, extra: int = 1) -> FpModule:
    """An isomorphic copy of M with a non-diagonal presentation.

    Generators are changed by a random unimodular matrix, and ``extra``
    redundant relations (combinations of the old ones) are appended.
    """
    g = M.generators
    if g == 0:
        return M
    U = random_unimodular(rng, g)
    R = U @ M.relations
    cols = R.to_columns()
    for _ in range(extra if cols else 0):
        coeffs = [rng.randint(-2, 2) for _ in cols]
        cols.append([sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(g)])
    return FpModule(M.ring, g, IntMatrix.from_columns(cols, g))


def random_module(rng: random.Random, ring: Ring = ZZ, max_gens: int = 3, max_rels: int = 3,
                  max_entry: int = 12) -> FpModule:
    """A random presentation; may have free part."""
    g = rng.randint(0, max_gens)
    r = rng.randint(0, max_rels)
    cols = [[rng.randint(-max_entry, max_entry) for _ in range(g)] for _ in range(r)]
    return FpModule(ring, g, IntMatrix.from_columns(cols, g))


def random_finite_module(rng: random.Random, ring: Ring = ZZ, max_gens: int = 3, max_order: Optional[int] = None,
                         max_entry: int = 12) -> FpModule:
    """A random finite module, rejection-sampled on the order."""
    while True:
        g = rng.randint(0, max_gens)
        diag = [rng.randint(1, max_entry) for _ in range(g)]
        cols = [[d if i == j else 0 for i in range(g)] for j, d in enumerate(diag)]
        for _ in range(rng.randint(0, 2)):
            cols.append([rng.randint(-max_entry, max_entry) for _ in range(g)])
        U = random_unimodular(rng, g) if g else IntMatrix.identity(0)
        rel = U @ IntMatrix.from_columns(cols, g)
        M = FpModule(ring, g, rel)
        if max_order is None or M.order <= max_order:
            return M


def random_p_group(rng: random.Random, p: int, max_exponent: int, max_gens: int = 3,
                   ring: Ring = ZZ, scramble: bool = True) -> FpModule:
    g = rng.randint(0, max_gens)
    M = FpModule.from_invariants(sorted(p ** rng.randint(0, max_exponent) for _ in range(g)), ring=ring)
    return scrambled(rng, M) if scramble else M


def random_morphism(rng: random.Random, M: FpModule, N: FpModule, bound: int = 6) -> FpMorphism:
    """A random element of Hom(M, N)."""
    H = HomSpace(M, N)
    st = H.module._structure
    coords = [rng.randrange(d) if d else rng.randint(-bound, bound) for d in (st.moduli[i] for i in st.nontrivial)]
    return H.to_morphism(H.module.from_coordinates(coords))


def all_morphisms(modules: list[FpModule]) -> Iterator[FpMorphism]:
    for M in modules:
        for N in modules:
            yield from HomSpace(M, N).enumerate()
