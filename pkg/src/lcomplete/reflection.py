"""Idempotent functors with a unit, their zeroth left derived functor, and the
full subcategory D of L0F-complete modules.

L0F(M) is computed from the canonical free presentation P1 --d--> P0 --> M as
coker(F d).  The three built-in functors act on presentations without changing
generators, so F(P0) -> L0F(M) is just a cokernel projection and every unit map
is an identity matrix followed by that projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Union

from .errors import ContractViolation, InvariantViolation, PreconditionError, UnsupportedInput
from .fpmod import (
    MOD_PRIME_POWER,
    PADIC,
    FpModule,
    FpMorphism,
    Ring,
    biproduct,
    cokernel,
    factor_through_epi,
    hom_enumerate,
    inverse,
    is_epic,
    is_isomorphic,
    is_isomorphism,
    kernel,
    p_valuation,
    preimage,
    _preimages,
)
from .linalg import IntMatrix


class Reflector:
    """Additive endofunctor F with a unit eta: id -> F.

    Subclasses implement ``on_object``, ``on_morphism`` and ``eta``.
    """

    name = "F"

    def on_object(self, M: FpModule) -> FpModule:
        raise NotImplementedError

    def on_morphism(self, f: FpMorphism) -> FpMorphism:
        raise NotImplementedError

    def eta(self, M: FpModule) -> FpMorphism:
        raise NotImplementedError

    def morphism_matrix(self, f: FpMorphism) -> IntMatrix:
        """Matrix of F(f); the built-in functors keep the matrix unchanged."""
        return self.on_morphism(f).matrix

    def check_domain(self, M: FpModule) -> None:
        pass

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ModReduction(Reflector):
    """F(M) = M / p^N M."""

    p: int
    N: int

    @property
    def name(self):
        return f"mod:{self.p}:{self.N}"

    def on_object(self, M: FpModule) -> FpModule:
        g = M.generators
        return FpModule(M.ring, g, M.relations.hstack(IntMatrix.identity(g).scale(self.p ** self.N)))

    def on_morphism(self, f: FpMorphism) -> FpMorphism:
        return FpMorphism._unchecked(self.on_object(f.source), self.on_object(f.target), f.matrix)

    def eta(self, M: FpModule) -> FpMorphism:
        return FpMorphism._unchecked(M, self.on_object(M), IntMatrix.identity(M.generators))

    def morphism_matrix(self, f: FpMorphism) -> IntMatrix:
        return f.matrix


@dataclass(frozen=True)
class TorsionFreeQuotient(Reflector):
    """F(M) = M modulo its p-power torsion."""

    p: int

    @property
    def name(self):
        return f"tfq:{self.p}"

    def on_object(self, M: FpModule) -> FpModule:
        st = M._structure
        g = M.generators
        cols = []
        for i, d in enumerate(st.moduli):
            if d == 0:
                continue
            stripped = d // self.p ** p_valuation(d, self.p)
            cols.append([stripped * x for x in st.U_inv.column(i)])
        return FpModule(M.ring, g, IntMatrix.from_columns(cols, g))

    def on_morphism(self, f: FpMorphism) -> FpMorphism:
        return FpMorphism._unchecked(self.on_object(f.source), self.on_object(f.target), f.matrix)

    def eta(self, M: FpModule) -> FpMorphism:
        return FpMorphism._unchecked(M, self.on_object(M), IntMatrix.identity(M.generators))

    def morphism_matrix(self, f: FpMorphism) -> IntMatrix:
        return f.matrix


@dataclass(frozen=True)
class CompleteFg(Reflector):
    """p-adic completion of finitely generated abelian groups.

    F(M) is the same presentation read over Z_p; on Z_p-modules F is the identity.
    """

    p: int

    @property
    def name(self):
        return f"complete:{self.p}"

    def check_domain(self, M: FpModule) -> None:
        if M.ring.kind == MOD_PRIME_POWER:
            raise UnsupportedInput("complete:p acts on modules over Z or Z_p")
        if M.ring.kind == PADIC and M.ring.p != self.p:
            raise UnsupportedInput("completing a Z_q-module at a different prime")

    def on_object(self, M: FpModule) -> FpModule:
        self.check_domain(M)
        return M if M.ring.kind == PADIC else M.over(Ring.padic(self.p))

    def on_morphism(self, f: FpMorphism) -> FpMorphism:
        return FpMorphism._unchecked(self.on_object(f.source), self.on_object(f.target), f.matrix)

    def eta(self, M: FpModule) -> FpMorphism:
        return FpMorphism._unchecked(M, self.on_object(M), IntMatrix.identity(M.generators))

    def morphism_matrix(self, f: FpMorphism) -> IntMatrix:
        return f.matrix


@dataclass(frozen=True)
class Composite(Reflector):
    """outer after inner; unit is eta_outer(inner M) after eta_inner(M)."""

    outer: Reflector
    inner: Reflector

    @property
    def name(self):
        return f"{self.outer.name}.{self.inner.name}"

    def check_domain(self, M: FpModule) -> None:
        self.inner.check_domain(M)

    def on_object(self, M: FpModule) -> FpModule:
        return self.outer.on_object(self.inner.on_object(M))

    def on_morphism(self, f: FpMorphism) -> FpMorphism:
        return self.outer.on_morphism(self.inner.on_morphism(f))

    def eta(self, M: FpModule) -> FpMorphism:
        first = self.inner.eta(M)
        return self.outer.eta(first.target) @ first


BUILTIN_REFLECTORS = ("mod", "tfq", "complete")


def parse_reflector(text: str) -> Reflector:
    """``mod:p:N``, ``tfq:p`` or ``complete:p``."""
    from .errors import MalformedInput
    from sympy import isprime

    parts = text.split(":")
    try:
        args = [int(x) for x in parts[1:]]
    except ValueError:
        raise MalformedInput(f"bad functor description {text!r}") from None
    if args and not isprime(args[0]):
        raise MalformedInput(f"{args[0]} is not prime")
    if parts[0] == "mod" and len(args) == 2 and args[1] >= 1:
        return ModReduction(*args)
    if parts[0] == "tfq" and len(args) == 1:
        return TorsionFreeQuotient(*args)
    if parts[0] == "complete" and len(args) == 1:
        return CompleteFg(*args)
    raise MalformedInput(f"bad functor description {text!r}")


# -- presentations and L0F ----------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    P1: FpModule
    P0: FpModule
    d: FpMorphism
    augmentation: FpMorphism


def canonical_presentation(M: FpModule) -> Presentation:
    """Free modules on the generators and relations of M, over M's own ring."""
    P0 = FpModule.free(M.generators, M.ring)
    P1 = FpModule.free(M.relations.cols, M.ring)
    d = FpMorphism._unchecked(P1, P0, M.relations)
    aug = FpMorphism._unchecked(P0, M, IntMatrix.identity(M.generators))
    return Presentation(P1, P0, d, aug)


@dataclass(frozen=True)
class _L0Data:
    module: FpModule
    projection: FpMorphism  # F(P0) -> L0F(M)
    unit: FpMorphism        # M -> L0F(M)
    section: IntMatrix      # generators of L0F(M) lifted to F(P0)
    presentation: Presentation


@lru_cache(maxsize=8192)
def _l0_data(F: Reflector, M: FpModule) -> _L0Data:
    F.check_domain(M)
    pres = canonical_presentation(M)
    L, pi = cokernel(F.on_morphism(pres.d))
    unit = FpMorphism(M, L, pi.matrix @ F.eta(pres.P0).matrix)
    lifts = _preimages(pi, IntMatrix.identity(L.generators).to_columns())
    if any(x is None for x in lifts):
        raise InvariantViolation("cokernel projection is not surjective")
    section = IntMatrix.from_columns(lifts, pres.P0.generators)
    return _L0Data(L, pi, unit, section, pres)


def l0(F: Reflector, M: FpModule) -> FpModule:
    return _l0_data(F, M).module


def l0_unit(F: Reflector, M: FpModule) -> FpMorphism:
    """The natural map M -> L0F(M)."""
    return _l0_data(F, M).unit


def presentation_lift(f: FpMorphism) -> tuple[FpMorphism, FpMorphism]:
    """(f0, f1) between canonical presentations with d_N f1 = f0 d_M."""
    PM, PN = canonical_presentation(f.source), canonical_presentation(f.target)
    f0 = FpMorphism._unchecked(PM.P0, PN.P0, f.matrix)
    cols = []
    for col in (f0 @ PM.d).matrix.to_columns():
        z = preimage(PN.d, col)
        if z is None:
            raise InvariantViolation("relation image has no preimage in the presentation of the target")
        cols.append(z)
    f1 = FpMorphism._unchecked(PM.P1, PN.P1, IntMatrix.from_columns(cols, PN.P1.generators))
    return f0, f1


def l0_on_morphism(F: Reflector, f: FpMorphism, lift: Optional[IntMatrix] = None) -> FpMorphism:
    """L0F(f), computed from a lift P0(M) -> P0(N) of f (default: f's own matrix)."""
    dM, dN = _l0_data(F, f.source), _l0_data(F, f.target)
    matrix = f.matrix if lift is None else lift
    f0 = FpMorphism._unchecked(dM.presentation.P0, dN.presentation.P0, matrix)
    if lift is None:
        # F(P0) -> L0F(M) is onto, so composing with a section gives the induced map
        h = dN.projection.matrix @ F.morphism_matrix(f0) @ dM.section
        return FpMorphism._unchecked(dM.module, dN.module, h).reduced()
    if not (dN.presentation.augmentation @ f0).equals(f @ dM.presentation.augmentation):
        raise ContractViolation("supplied matrix does not lift the morphism")
    try:
        return factor_through_epi(dM.projection, dN.projection @ F.on_morphism(f0))
    except ContractViolation as exc:
        raise InvariantViolation(f"lift did not descend to L0F: {exc}") from None


def is_f_complete(F: Reflector, M: FpModule) -> bool:
    return is_isomorphism(F.eta(M))


def is_l0_complete(F: Reflector, M: FpModule) -> bool:
    return _l0_complete(F, M)


@lru_cache(maxsize=8192)
def _l0_complete(F: Reflector, M: FpModule) -> bool:
    return is_isomorphism(l0_unit(F, M))


@lru_cache(maxsize=8192)
def _kernel(f: FpMorphism) -> tuple[FpModule, FpMorphism]:
    return kernel(f)


def _require_in_D(F: Reflector, *mods: FpModule) -> None:
    for M in mods:
        if not is_l0_complete(F, M):
            raise PreconditionError(f"{M} is not L0{F.name}-complete")


# -- transported limits and colimits ------------------------------------------


def kernel_in_D(F: Reflector, f: FpMorphism) -> tuple[FpModule, FpMorphism]:
    _require_in_D(F, f.source, f.target)
    return kernel(f)


def cokernel_in_D(F: Reflector, f: FpMorphism) -> tuple[FpModule, FpMorphism]:
    _require_in_D(F, f.source, f.target)
    C, pi = cokernel(f)
    return l0(F, C), l0_unit(F, C) @ pi


@dataclass(frozen=True)
class CriterionVerdict:
    morphism: FpMorphism
    comparison_map: FpMorphism
    is_monic: bool
    witness: Optional[tuple[int, ...]]


def criterion_check(F: Reflector, f: FpMorphism, use_l0: bool = True) -> CriterionVerdict:
    """Is coker f -> R(coker f) monic?  R is L0F by default, or F itself.

    With ``use_l0=False`` the subcategory under test is F-complete objects and
    the reflector is F; this is how a non-abelian reflective subcategory shows up.
    """
    if use_l0:
        _require_in_D(F, f.source, f.target)
    else:
        for M in (f.source, f.target):
            if not is_f_complete(F, M):
                raise PreconditionError(f"{M} is not {F.name}-complete")
    C, _ = cokernel(f)
    comparison = l0_unit(F, C) if use_l0 else F.eta(C)
    K, iota = _kernel(comparison)
    if K.generators == 0:
        return CriterionVerdict(f, comparison, True, None)
    return CriterionVerdict(f, comparison, False, iota.matrix.column(0))


@dataclass(frozen=True)
class Coequalizer:
    f: FpMorphism
    g: FpMorphism


@dataclass(frozen=True)
class Pushout:
    """Colimit of B <-f- A -g-> C."""

    f: FpMorphism
    g: FpMorphism


@dataclass(frozen=True)
class Equalizer:
    f: FpMorphism
    g: FpMorphism


@dataclass(frozen=True)
class Pullback:
    """Limit of B -f-> D <-g- C."""

    f: FpMorphism
    g: FpMorphism


def _colimit_in_C(diagram) -> tuple[FpModule, tuple[FpMorphism, ...]]:
    if isinstance(diagram, Coequalizer):
        C, pi = cokernel(diagram.f - diagram.g)
        return C, (pi,)
    if isinstance(diagram, Pushout):
        f, g = diagram.f, diagram.g
        if f.source != g.source:
            raise ContractViolation("pushout legs need a common source")
        S = biproduct(f.target, g.target)
        i1, i2 = S.inclusions
        C, pi = cokernel(i1 @ f - i2 @ g)
        return C, (pi @ i1, pi @ i2)
    raise UnsupportedInput(f"unsupported colimit shape {type(diagram).__name__}")


def colimit_in_D(F: Reflector, diagram: Union[Coequalizer, Pushout]) -> tuple[FpModule, tuple[FpMorphism, ...]]:
    """L0F of the colimit in C, with the cocone legs."""
    for h in (diagram.f, diagram.g):
        _require_in_D(F, h.source, h.target)
    C, legs = _colimit_in_C(diagram)
    u = l0_unit(F, C)
    return l0(F, C), tuple(u @ leg for leg in legs)


def limit_in_D(F: Reflector, diagram: Union[Equalizer, Pullback]) -> tuple[FpModule, tuple[FpMorphism, ...]]:
    """Finite limits are computed in C."""
    for h in (diagram.f, diagram.g):
        _require_in_D(F, h.source, h.target)
    if isinstance(diagram, Equalizer):
        K, iota = kernel(diagram.f - diagram.g)
        return K, (iota,)
    if isinstance(diagram, Pullback):
        f, g = diagram.f, diagram.g
        if f.target != g.target:
            raise ContractViolation("pullback legs need a common target")
        S = biproduct(f.source, g.source)
        p1, p2 = S.projections
        K, iota = kernel(f @ p1 - g @ p2)
        return K, (p1 @ iota, p2 @ iota)
    raise UnsupportedInput(f"unsupported limit shape {type(diagram).__name__}")


# -- the adjunction and its consequences --------------------------------------


def adjunction_maps(F: Reflector, X: FpModule, Y: FpModule):
    """(alpha, beta) between Hom_C(X, Y) and Hom_D(L0F X, Y), for Y in D."""
    _require_in_D(F, Y)
    dX, dY = _l0_data(F, X), _l0_data(F, Y)
    eta_X = dX.unit
    # eta_Y^-1 after L0F(f) is  eta_Y^-1 . pi_Y . F(f) . s_X ; the outer factors are fixed
    left = inverse(dY.unit).matrix @ dY.projection.matrix
    P0X, P0Y = dX.presentation.P0, dY.presentation.P0

    def alpha(f: FpMorphism) -> FpMorphism:
        Ff = F.morphism_matrix(FpMorphism._unchecked(P0X, P0Y, f.matrix))
        return FpMorphism._unchecked(dX.module, Y, left @ Ff @ dX.section)

    def beta(g: FpMorphism) -> FpMorphism:
        return FpMorphism._unchecked(X, Y, g.matrix @ eta_X.matrix)

    return alpha, beta


def adjunction_roundtrip(F: Reflector, X: FpModule, Y: FpModule) -> bool:
    if not (X.is_finite and Y.is_finite):
        raise UnsupportedInput("adjunction roundtrip enumerates hom-sets of finite modules")
    alpha, beta = adjunction_maps(F, X, Y)
    hom_C = hom_enumerate(X, Y)
    hom_D = hom_enumerate(l0(F, X), Y)
    if len(hom_C) != len(hom_D):
        return False
    return (all(beta(alpha(f)).key() == f.key() for f in hom_C)
            and all(alpha(beta(g)).key() == g.key() for g in hom_D))


def eta_factorization_check(F: Reflector, M: FpModule) -> bool:
    """eta_M == (L0F M -> F M) after (M -> L0F M)."""
    data = _l0_data(F, M)
    F_aug = F.on_morphism(data.presentation.augmentation)
    to_F = factor_through_epi(data.projection, F_aug)
    return (to_F @ data.unit).equals(F.eta(M))


def derived_idempotence_check(F: Reflector, M: FpModule) -> bool:
    return is_isomorphic(l0(Composite(F, F), M), l0(F, M))


def projective_check(F: Reflector, P_free: FpModule, epis: Iterable[FpMorphism]) -> bool:
    """L0F(P) lifts against every sampled epi of D, and every sampled D-object is a quotient of some L0F(free)."""
    if P_free.relations.cols:
        raise PreconditionError("projective_check needs a free module")
    LP = l0(F, P_free)
    objects = []
    for e in epis:
        _require_in_D(F, e.source, e.target)
        if not is_epic(e):
            raise PreconditionError("sampled map is not an epimorphism")
        objects.extend([e.source, e.target])
        if e.source.ring != LP.ring and e.source.is_finite and e.target.is_finite:
            # complete objects that are finite p-groups carry a unique Z_p-module structure
            e = FpMorphism(e.source.over(LP.ring), e.target.over(LP.ring), e.matrix)
        reached = {(e @ h).key() for h in hom_enumerate(LP, e.source)}
        if any(g.key() not in reached for g in hom_enumerate(LP, e.target)):
            return False
    for X in objects:
        P = FpModule.free(X.generators, X.ring)
        aug = FpMorphism._unchecked(P, X, IntMatrix.identity(X.generators))
        cover = inverse(l0_unit(F, X)) @ l0_on_morphism(F, aug)
        if not is_epic(cover):
            return False
    return True


def best_approx_membership(F: Reflector, E: Reflector, M: FpModule) -> bool:
    """Is L0F(M) complete for the reflector E (i.e. D_F contained in D_E at M)?"""
    return is_l0_complete(E, l0(F, M))
