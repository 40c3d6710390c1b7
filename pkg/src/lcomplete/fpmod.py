"""Finitely presented modules over Z, Z/p^N and (symbolically) Z_p.

A module is a presentation ``<g generators | relation columns>`` over a base
ring.  Every computation is reduced to integer lattices: each module carries an
*effective relation lattice* ``L`` in ``Z^g`` such that an integer vector is zero
in the module exactly when it lies in ``L``.

* over Z, ``L`` is spanned by the relation columns;
* over Z/p^N, the columns ``p^N e_i`` are added (they are never stored);
* over Z_p, ``L`` is the set of integer vectors in the Z_p-span of the
  relations, i.e. the Smith form with every diagonal entry replaced by its
  p-part.  Since Z_p is flat over Z, kernels computed on these lattices are
  the Z_p-kernels.

Morphisms are integer matrices (target generators x source generators) and are
compared modulo the target lattice, never entrywise.
"""

from __future__ import annotations

import itertools
from operator import mul
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

from sympy import isprime

from .errors import ContractViolation, InvariantViolation, MalformedInput, UnsupportedInput
from .linalg import (
    IntMatrix,
    column_span_basis,
    kernel_basis,
    smith_normal_form,
    solve_integer,
)

INTEGERS = "Z"
MOD_PRIME_POWER = "Z/p^N"
PADIC = "Zp"


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class Ring:
    kind: str
    p: Optional[int] = None
    N: Optional[int] = None

    def __post_init__(self):
        if self.kind == INTEGERS:
            if self.p is not None or self.N is not None:
                raise MalformedInput("Z takes no parameters")
        elif self.kind == MOD_PRIME_POWER:
            if not (isinstance(self.p, int) and isprime(self.p)):
                raise MalformedInput(f"{self.p!r} is not prime")
            if not (isinstance(self.N, int) and self.N >= 1):
                raise MalformedInput(f"exponent must be a positive integer, got {self.N!r}")
        elif self.kind == PADIC:
            if not (isinstance(self.p, int) and isprime(self.p)):
                raise MalformedInput(f"{self.p!r} is not prime")
            if self.N is not None:
                raise MalformedInput("Z_p takes no exponent")
        else:
            raise MalformedInput(f"unknown ring kind {self.kind!r}")

    @classmethod
    def integers(cls) -> "Ring":
        return cls(INTEGERS)

    @classmethod
    def mod_prime_power(cls, p: int, N: int) -> "Ring":
        return cls(MOD_PRIME_POWER, p, N)

    @classmethod
    def padic(cls, p: int) -> "Ring":
        return cls(PADIC, p)

    @property
    def characteristic(self) -> int:
        return self.p ** self.N if self.kind == MOD_PRIME_POWER else 0

    def __str__(self):
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == MOD_PRIME_POWER:
            return f"Z/{self.p}^{self.N}"
        return f"Z_{self.p}"


ZZ = Ring.integers()


@dataclass(frozen=True)
class NormalForm:
    free_rank: int
    invariant_factors: tuple[int, ...]

    @property
    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class _Structure:
    # x in Z^g  <->  coordinates (U x)_i mod moduli[i]; modulus 0 means a free coordinate
    U: IntMatrix
    U_inv: IntMatrix
    moduli: tuple[int, ...]

    @cached_property
    def nontrivial(self) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.moduli) if d != 1)

    @cached_property
    def coordinate_rows(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        return tuple((self.U.row(i), self.moduli[i]) for i in self.nontrivial)


@dataclass(frozen=True)
class FpModule:
    ring: Ring
    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise MalformedInput(
                f"relation matrix has {self.relations.rows} rows for {self.generators} generators"
            )

    @classmethod
    def free(cls, rank: int, ring: Ring = ZZ) -> "FpModule":
        return cls(ring, rank, IntMatrix.zeros(rank, 0))

    @classmethod
    def zero(cls, ring: Ring = ZZ) -> "FpModule":
        return cls(ring, 0, IntMatrix.zeros(0, 0))

    @classmethod
    def cyclic(cls, order: int, ring: Ring = ZZ) -> "FpModule":
        return cls(ring, 1, IntMatrix(1, 1, (order,)))

    @classmethod
    def from_invariants(cls, factors: Sequence[int], free_rank: int = 0, ring: Ring = ZZ) -> "FpModule":
        g = len(factors) + free_rank
        return cls(ring, g, IntMatrix.diagonal(list(factors), g, len(factors)))

    def over(self, ring: Ring) -> "FpModule":
        """Same presentation read over another ring."""
        return FpModule(ring, self.generators, self.relations)

    # -- lattice data -------------------------------------------------------

    @cached_property
    def effective_relations(self) -> IntMatrix:
        g = self.generators
        if self.ring.kind == INTEGERS:
            return self.relations
        if self.ring.kind == MOD_PRIME_POWER:
            return self.relations.hstack(IntMatrix.identity(g).scale(self.ring.characteristic))
        p = self.ring.p
        snf = smith_normal_form(self.relations)
        shadow = [p ** p_valuation(d, p) for d in snf.diagonal if d]
        return snf.U_inv @ IntMatrix.diagonal(shadow, g, len(shadow))

    @cached_property
    def _structure(self) -> _Structure:
        g = self.generators
        snf = smith_normal_form(self.effective_relations)
        moduli = list(snf.diagonal[:g]) + [0] * (g - len(snf.diagonal))
        return _Structure(snf.U, snf.U_inv, tuple(moduli))

    @cached_property
    def normal_form(self) -> NormalForm:
        moduli = self._structure.moduli
        return NormalForm(
            free_rank=sum(1 for d in moduli if d == 0),
            invariant_factors=tuple(d for d in moduli if d > 1),
        )

    @property
    def order(self) -> Optional[int]:
        return self.normal_form.order

    @property
    def is_finite(self) -> bool:
        return self.normal_form.free_rank == 0

    @property
    def is_zero_module(self) -> bool:
        nf = self.normal_form
        return nf.free_rank == 0 and not nf.invariant_factors

    # -- elements -----------------------------------------------------------

    def coordinates(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of an element; equal iff the elements are equal."""
        if len(vec) != self.generators:
            raise MalformedInput(f"element of length {len(vec)} in a module on {self.generators} generators")
        out = []
        for row, d in self._structure.coordinate_rows:
            x = sum(map(mul, row, vec))
            out.append(x % d if d else x)
        return tuple(out)

    def is_zero(self, vec: Sequence[int]) -> bool:
        return not any(self.coordinates(vec))

    def from_coordinates(self, coords: Sequence[int]) -> tuple[int, ...]:
        st = self._structure
        full = [0] * self.generators
        for i, c in zip(st.nontrivial, coords):
            full[i] = c
        return st.U_inv.apply(full)

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Small canonical representative of an element."""
        return self.from_coordinates(self.coordinates(vec))

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.is_finite:
            raise UnsupportedInput("cannot enumerate an infinite module")
        st = self._structure
        ranges = [range(st.moduli[i]) for i in st.nontrivial]
        for coords in itertools.product(*ranges):
            yield self.from_coordinates(coords)

    def in_span(self, vec: Sequence[int]) -> bool:
        return self.is_zero(vec)

    def __str__(self):
        return f"<{self.generators} | {self.relations.to_columns()}> over {self.ring}"


def normal_form(M: FpModule) -> NormalForm:
    return M.normal_form


def is_isomorphic(M: FpModule, N: FpModule) -> bool:
    return M.normal_form == N.normal_form


def _rings_compatible(source: FpModule, target: FpModule) -> bool:
    a, b = source.ring, target.ring
    if a == b:
        return True
    # restriction of scalars along Z -> Z_p
    if a.kind == INTEGERS and b.kind == PADIC:
        return True
    # a torsion Z_p-module is a finite p-group, so integer matrices out of it are meaningful
    if a.kind == PADIC and b.kind == INTEGERS and source.is_finite:
        return True
    return False


@dataclass(frozen=True)
class FpMorphism:
    source: FpModule
    target: FpModule
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.generators, self.source.generators):
            raise MalformedInput(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.generators}x{self.source.generators}"
            )
        if not _rings_compatible(self.source, self.target):
            raise MalformedInput(f"ring mismatch: {self.source.ring} -> {self.target.ring}")
        for col in self.source.effective_relations.to_columns():
            if not self.target.is_zero(self.matrix.apply(col)):
                raise ContractViolation("matrix does not send relations to relations")

    @classmethod
    def _unchecked(cls, source: FpModule, target: FpModule, matrix: IntMatrix) -> "FpMorphism":
        obj = object.__new__(cls)
        object.__setattr__(obj, "source", source)
        object.__setattr__(obj, "target", target)
        object.__setattr__(obj, "matrix", matrix)
        return obj

    @classmethod
    def identity(cls, M: FpModule) -> "FpMorphism":
        return cls._unchecked(M, M, IntMatrix.identity(M.generators))

    @classmethod
    def zero(cls, M: FpModule, N: FpModule) -> "FpMorphism":
        return cls(M, N, IntMatrix.zeros(N.generators, M.generators))

    @classmethod
    def scalar(cls, M: FpModule, c: int) -> "FpMorphism":
        return cls._unchecked(M, M, IntMatrix.identity(M.generators).scale(c))

    def __matmul__(self, other: "FpMorphism") -> "FpMorphism":
        """self after other."""
        if other.target != self.source:
            raise MalformedInput("composing morphisms with mismatched endpoints")
        return FpMorphism._unchecked(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "FpMorphism") -> "FpMorphism":
        self._same_hom(other)
        return FpMorphism._unchecked(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "FpMorphism") -> "FpMorphism":
        self._same_hom(other)
        return FpMorphism._unchecked(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> "FpMorphism":
        return FpMorphism._unchecked(self.source, self.target, -self.matrix)

    def _same_hom(self, other: "FpMorphism"):
        if self.source != other.source or self.target != other.target:
            raise MalformedInput("morphisms live in different hom-sets")

    def __call__(self, vec: Sequence[int]) -> tuple[int, ...]:
        return self.matrix.apply(vec)

    def is_zero(self) -> bool:
        return all(self.target.is_zero(c) for c in self.matrix.to_columns())

    def equals(self, other: "FpMorphism") -> bool:
        """Equality modulo the target relations."""
        if self.source != other.source or self.target != other.target:
            return False
        return (self - other).is_zero()

    def reduced(self) -> "FpMorphism":
        cols = [self.target.reduce(c) for c in self.matrix.to_columns()]
        return FpMorphism._unchecked(
            self.source, self.target, IntMatrix.from_columns(cols, self.target.generators)
        )

    def key(self) -> tuple:
        """Hashable canonical form (for sets of morphisms)."""
        return tuple(self.target.coordinates(c) for c in self.matrix.to_columns())


# -- solving --------------------------------------------------------------


def preimage(f: FpMorphism, y: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Some x with f(x) = y in the target, or None."""
    A = f.matrix.hstack(f.target.effective_relations)
    sol = solve_integer(A, y)
    if sol is None:
        return None
    return tuple(sol[: f.source.generators])


def _preimages(f: FpMorphism, ys: Sequence[Sequence[int]]) -> list[Optional[tuple[int, ...]]]:
    A = f.matrix.hstack(f.target.effective_relations)
    snf = smith_normal_form(A)
    m = f.source.generators
    out = []
    for y in ys:
        sol = solve_integer(A, y, snf)
        out.append(None if sol is None else tuple(sol[:m]))
    return out


def simplify(M: FpModule) -> tuple[FpModule, FpMorphism, FpMorphism]:
    """Diagonal presentation S of M with mutually inverse isos S -> M and M -> S.

    Generators of S are the nontrivial Smith coordinates of M in order; its
    relations are the diagonal moduli (Z/p^N characteristics stay implicit).
    """
    st = M._structure
    idx = st.nontrivial
    mods = [st.moduli[i] for i in idx]
    implicit = M.ring.characteristic
    rel_cols = []
    for k, d in enumerate(mods):
        if d == 0 or d == implicit:
            continue
        col = [0] * len(idx)
        col[k] = d
        rel_cols.append(col)
    S = FpModule(M.ring, len(idx), IntMatrix.from_columns(rel_cols, len(idx)))
    to_M = FpMorphism._unchecked(S, M, st.U_inv.select_columns(idx))
    from_M = FpMorphism._unchecked(M, S, st.U.select_rows(idx))
    return S, to_M, from_M


# -- kernels, cokernels, images -------------------------------------------


def kernel(f: FpMorphism) -> tuple[FpModule, FpMorphism]:
    M, N = f.source, f.target
    m = M.generators
    A = f.matrix.hstack(-N.effective_relations)
    ker = kernel_basis(A)
    top = ker.select_rows(range(m))
    B = column_span_basis(top)
    snfB = smith_normal_form(B)
    rel_cols = []
    for col in M.effective_relations.to_columns():
        z = solve_integer(B, col, snfB)
        if z is None:
            raise ContractViolation("morphism is not well defined (relations outside kernel)")
        rel_cols.append(z)
    K0 = FpModule(M.ring, B.cols, IntMatrix.from_columns(rel_cols, B.cols))
    K, to_K0, _ = simplify(K0)
    iota = FpMorphism._unchecked(K, M, B @ to_K0.matrix)
    return K, iota


def cokernel(f: FpMorphism) -> tuple[FpModule, FpMorphism]:
    N = f.target
    if f.source.ring.kind == INTEGERS and N.ring.kind == PADIC and not N.is_finite:
        raise UnsupportedInput("cokernel of Z-module into a non-torsion Z_p-module is not finitely generated")
    Q0 = FpModule(N.ring, N.generators, N.relations.hstack(f.matrix))
    Q, _, from_Q0 = simplify(Q0)
    pi = FpMorphism._unchecked(N, Q, from_Q0.matrix)
    return Q, pi


def is_monic(f: FpMorphism) -> bool:
    return kernel(f)[0].generators == 0


def is_epic(f: FpMorphism) -> bool:
    if f.source.ring.kind == INTEGERS and f.target.ring.kind == PADIC and not f.target.is_finite:
        # the image of a finitely generated group is countable, Z_p^r is not
        return False
    return cokernel(f)[0].generators == 0


def is_isomorphism(f: FpMorphism) -> bool:
    return is_monic(f) and is_epic(f)


def inverse(f: FpMorphism) -> FpMorphism:
    if not is_isomorphism(f):
        raise ContractViolation("inverting a morphism that is not an isomorphism")
    N = f.target
    cols = _preimages(f, IntMatrix.identity(N.generators).to_columns())
    return FpMorphism(N, f.source, IntMatrix.from_columns(cols, f.source.generators))


def factor_through_epi(e: FpMorphism, h: FpMorphism) -> FpMorphism:
    """The k with k @ e == h, for e epic and h vanishing on ker e."""
    if e.source != h.source:
        raise MalformedInput("factor_through_epi needs a common source")
    Q = e.target
    pre = _preimages(e, IntMatrix.identity(Q.generators).to_columns())
    if any(x is None for x in pre):
        raise ContractViolation("factor_through_epi: map is not epic")
    cols = [h.matrix.apply(x) for x in pre]
    try:
        k = FpMorphism(Q, h.target, IntMatrix.from_columns(cols, h.target.generators))
    except ContractViolation:
        raise ContractViolation("map does not vanish on the kernel of the epimorphism") from None
    if not (k @ e).equals(h):
        raise ContractViolation("map does not factor through the epimorphism")
    return k


def lift_through_mono(m: FpMorphism, h: FpMorphism) -> FpMorphism:
    """The k with m @ k == h, for m monic and im h inside im m."""
    if m.target != h.target:
        raise MalformedInput("lift_through_mono needs a common target")
    pre = _preimages(m, h.matrix.to_columns())
    if any(x is None for x in pre):
        raise ContractViolation("image of the map is not contained in the subobject")
    return FpMorphism(h.source, m.source, IntMatrix.from_columns(pre, m.source.generators))


@dataclass(frozen=True)
class ImageCoimage:
    image: FpModule
    coimage: FpModule
    comparison: FpMorphism
    image_inclusion: FpMorphism
    coimage_projection: FpMorphism


def image_coimage(f: FpMorphism) -> ImageCoimage:
    _, pi = cokernel(f)
    image, iota_im = kernel(pi)
    _, iota_ker = kernel(f)
    coimage, pi_co = cokernel(iota_ker)
    onto_image = lift_through_mono(iota_im, f)
    comparison = factor_through_epi(pi_co, onto_image)
    if not is_isomorphism(comparison):
        raise InvariantViolation("coimage -> image is not an isomorphism")
    return ImageCoimage(image, coimage, comparison, iota_im, pi_co)


# -- biproducts and tensor products ---------------------------------------


@dataclass(frozen=True)
class Biproduct:
    module: FpModule
    inclusions: tuple[FpMorphism, ...]
    projections: tuple[FpMorphism, ...]


def _same_ring(*mods: FpModule) -> Ring:
    rings = {M.ring for M in mods}
    if len(rings) > 1:
        raise MalformedInput(f"ring mismatch: {sorted(map(str, rings))}")
    return mods[0].ring


def direct_sum(mods: Sequence[FpModule], ring: Optional[Ring] = None) -> Biproduct:
    if not mods:
        Z = FpModule.zero(ring or ZZ)
        return Biproduct(Z, (), ())
    ring = _same_ring(*mods)
    rel = IntMatrix.zeros(0, 0)
    for M in mods:
        rel = rel.block_diag(M.relations)
    S = FpModule(ring, rel.rows, rel)
    total = S.generators
    inc, proj = [], []
    offset = 0
    for M in mods:
        g = M.generators
        I = IntMatrix.identity(g)
        above, below = IntMatrix.zeros(offset, g), IntMatrix.zeros(total - offset - g, g)
        i_mat = above.vstack(I, below)
        inc.append(FpMorphism._unchecked(M, S, i_mat))
        proj.append(FpMorphism._unchecked(S, M, i_mat.T))
        offset += g
    return Biproduct(S, tuple(inc), tuple(proj))


def biproduct(M: FpModule, N: FpModule) -> Biproduct:
    return direct_sum([M, N])


def tensor(M: FpModule, N: FpModule) -> FpModule:
    ring = _same_ring(M, N)
    gM, gN = M.generators, N.generators
    rel = M.relations.kron(IntMatrix.identity(gN)).hstack(IntMatrix.identity(gM).kron(N.relations))
    return FpModule(ring, gM * gN, rel)


def tensor_morphisms(f: FpMorphism, g: FpMorphism) -> FpMorphism:
    return FpMorphism._unchecked(
        tensor(f.source, g.source), tensor(f.target, g.target), f.matrix.kron(g.matrix)
    )


def swap_matrix(gX: int, gY: int) -> IntMatrix:
    """Generator permutation X(x)Y -> Y(x)X, (i, j) -> (j, i)."""
    out = [[0] * (gX * gY) for _ in range(gX * gY)]
    for i in range(gX):
        for j in range(gY):
            out[j * gX + i][i * gY + j] = 1
    return IntMatrix.from_rows(out, gX * gY)


def braiding(M: FpModule, N: FpModule) -> FpMorphism:
    return FpMorphism._unchecked(tensor(M, N), tensor(N, M), swap_matrix(M.generators, N.generators))


def associator(X: FpModule, Y: FpModule, Z: FpModule) -> FpMorphism:
    # ((i, j), k) and (i, (j, k)) have the same flat index
    return FpMorphism._unchecked(
        tensor(tensor(X, Y), Z), tensor(X, tensor(Y, Z)), IntMatrix.identity(X.generators * Y.generators * Z.generators)
    )


def unit(ring: Ring) -> FpModule:
    return FpModule.free(1, ring)


def right_unitor(X: FpModule) -> FpMorphism:
    return FpMorphism._unchecked(tensor(X, unit(X.ring)), X, IntMatrix.identity(X.generators))


def left_unitor(X: FpModule) -> FpMorphism:
    return FpMorphism._unchecked(tensor(unit(X.ring), X), X, IntMatrix.identity(X.generators))


# -- hom ------------------------------------------------------------------


class HomSpace:
    """Hom(M, N) presented as a module, with conversions to and from morphisms.

    With M simplified to a sum of cyclics Z/d_k, Hom(M, N) is the sum of the
    d_k-torsion submodules N[d_k] (N itself for free summands).
    """

    def __init__(self, M: FpModule, N: FpModule):
        if not _rings_compatible(M, N):
            raise MalformedInput(f"ring mismatch: {M.ring} -> {N.ring}")
        self.source, self.target = M, N
        S, to_M, from_M = simplify(M)
        self._from_M = from_M
        self._to_M = to_M
        st = M._structure
        self._orders = [st.moduli[i] for i in st.nontrivial]
        self._pieces = []
        for d in self._orders:
            if d == 0:
                self._pieces.append(FpMorphism.identity(N))
            else:
                self._pieces.append(kernel(FpMorphism.scalar(N, d))[1])
        summed = direct_sum([iota.source for iota in self._pieces], ring=N.ring)
        self.module = summed.module
        self._offsets = []
        off = 0
        for iota in self._pieces:
            self._offsets.append(off)
            off += iota.source.generators

    def to_morphism(self, h: Sequence[int]) -> FpMorphism:
        N = self.target
        cols = []
        for iota, off in zip(self._pieces, self._offsets):
            block = h[off: off + iota.source.generators]
            cols.append(iota.matrix.apply(block))
        onS = IntMatrix.from_columns(cols, N.generators)
        return FpMorphism._unchecked(self.source, N, onS @ self._from_M.matrix)

    def from_morphism(self, phi: FpMorphism) -> tuple[int, ...]:
        if phi.source != self.source or phi.target != self.target:
            raise MalformedInput("morphism is not in this hom-set")
        onS = phi.matrix @ self._to_M.matrix
        out: list[int] = []
        for k, iota in enumerate(self._pieces):
            x = preimage(iota, onS.column(k))
            if x is None:
                raise InvariantViolation("generator image escapes its torsion submodule")
            out.extend(x)
        return tuple(out)

    def enumerate(self) -> list[FpMorphism]:
        if not self.module.is_finite:
            raise UnsupportedInput("hom-set is infinite")
        return [self.to_morphism(h) for h in self.module.elements()]


def hom_module(M: FpModule, N: FpModule) -> FpModule:
    return HomSpace(M, N).module


def hom_enumerate(M: FpModule, N: FpModule) -> list[FpMorphism]:
    return HomSpace(M, N).enumerate()


def hom_map(f: FpMorphism, g: FpMorphism, source: Optional[HomSpace] = None,
            target: Optional[HomSpace] = None) -> FpMorphism:
    """Hom(f, g): Hom(M, N) -> Hom(M', N'), phi |-> g @ phi @ f, for f: M' -> M, g: N -> N'."""
    H = source or HomSpace(f.target, g.source)
    H2 = target or HomSpace(f.source, g.target)
    cols = []
    for e in IntMatrix.identity(H.module.generators).to_columns():
        phi = H.to_morphism(e)
        cols.append(H2.from_morphism(g @ phi @ f))
    return FpMorphism(H.module, H2.module, IntMatrix.from_columns(cols, H2.module.generators))


# -- completion of finitely generated modules ------------------------------


def complete_fg(M: FpModule, p: int) -> FpModule:
    """p-adic completion of a finitely generated abelian group, in normal form."""
    if M.ring.kind != INTEGERS:
        raise UnsupportedInput("complete_fg expects a module over Z")
    return simplify(M.over(Ring.padic(p)))[0]
