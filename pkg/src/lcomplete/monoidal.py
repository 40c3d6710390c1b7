"""Symmetric monoidal closed structure on D carried over from modules.

X (x)_D Y = L0F(X (x) Y).  Every structure map of D is built as a composite of
L0F applied to the structure map of C, with the comparison isomorphisms
L0F(n (x) id) and L0F(id (x) n) inverted where needed (n is the unit
X (x) Y -> X (x)_D Y).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvariantViolation, PreconditionError, UnsupportedInput
from .fpmod import (
    ZZ,
    FpModule,
    FpMorphism,
    HomSpace,
    Ring,
    associator,
    braiding,
    hom_enumerate,
    hom_module,
    inverse,
    left_unitor,
    right_unitor,
    tensor,
    tensor_morphisms,
    unit,
)
from .linalg import IntMatrix
from .reflection import CompleteFg, Reflector, is_l0_complete, l0, l0_on_morphism, l0_unit

COHERENCE_KINDS = {"pentagon": 4, "triangle": 2, "hexagon1": 3, "hexagon2": 3, "symmetry": 2}


class CoherenceFailure(InvariantViolation):
    """Both sides of a coherence diagram disagree; ``counterexample`` is JSON-ready."""

    def __init__(self, kind: str, counterexample: dict):
        super().__init__(f"{kind} diagram does not commute")
        self.kind = kind
        self.counterexample = counterexample


@lru_cache(maxsize=8192)
def _inverse(f: FpMorphism) -> FpMorphism:
    return inverse(f)


@lru_cache(maxsize=8192)
def _in_D(F: Reflector, M: FpModule) -> bool:
    return is_l0_complete(F, M)


@dataclass(frozen=True)
class MonoidalContext:
    F: Reflector
    ring: Ring = ZZ

    def __post_init__(self):
        if isinstance(self.F, CompleteFg):
            raise UnsupportedInput("tensor products of completed modules leave the finitely presented setting")
        if not _in_D(self.F, self.unit_D):
            raise InvariantViolation("unit object is not L0F-complete")

    @property
    def unit_C(self) -> FpModule:
        return unit(self.ring)

    @property
    def unit_D(self) -> FpModule:
        return l0(self.F, unit(self.ring))

    def require(self, *mods: FpModule) -> None:
        for M in mods:
            if M.ring != self.ring:
                raise PreconditionError(f"{M} is not over {self.ring}")
            if not _in_D(self.F, M):
                raise PreconditionError(f"{M} is not L0{self.F.name}-complete")


def tensor_D(ctx: MonoidalContext, X: FpModule, Y: FpModule) -> FpModule:
    ctx.require(X, Y)
    return l0(ctx.F, tensor(X, Y))


def tensor_unit(ctx: MonoidalContext, X: FpModule, Y: FpModule) -> FpMorphism:
    """n: X (x) Y -> X (x)_D Y."""
    return l0_unit(ctx.F, tensor(X, Y))


def tensor_D_morphisms(ctx: MonoidalContext, f: FpMorphism, g: FpMorphism) -> FpMorphism:
    ctx.require(f.source, f.target, g.source, g.target)
    return l0_on_morphism(ctx.F, tensor_morphisms(f, g))


def associator_D(ctx: MonoidalContext, X: FpModule, Y: FpModule, Z: FpModule) -> FpMorphism:
    """(X (x)_D Y) (x)_D Z -> X (x)_D (Y (x)_D Z)."""
    ctx.require(X, Y, Z)
    F = ctx.F
    n_xy, n_yz = tensor_unit(ctx, X, Y), tensor_unit(ctx, Y, Z)
    left = l0_on_morphism(F, tensor_morphisms(n_xy, FpMorphism.identity(Z)))
    middle = l0_on_morphism(F, associator(X, Y, Z))
    right = l0_on_morphism(F, tensor_morphisms(FpMorphism.identity(X), n_yz))
    return right @ middle @ _inverse(left)


def right_unitor_D(ctx: MonoidalContext, X: FpModule) -> FpMorphism:
    """X (x)_D 1_D -> X."""
    ctx.require(X)
    F = ctx.F
    n_1 = l0_unit(F, ctx.unit_C)
    compare = l0_on_morphism(F, tensor_morphisms(FpMorphism.identity(X), n_1))
    rho = l0_on_morphism(F, right_unitor(X))
    return _inverse(l0_unit(F, X)) @ rho @ _inverse(compare)


def left_unitor_D(ctx: MonoidalContext, X: FpModule) -> FpMorphism:
    """1_D (x)_D X -> X, built as the mirror image of the right unitor."""
    ctx.require(X)
    F = ctx.F
    n_1 = l0_unit(F, ctx.unit_C)
    compare = l0_on_morphism(F, tensor_morphisms(n_1, FpMorphism.identity(X)))
    lam = l0_on_morphism(F, left_unitor(X))
    return _inverse(l0_unit(F, X)) @ lam @ _inverse(compare)


def unitors_D(ctx: MonoidalContext, X: FpModule) -> tuple[FpMorphism, FpMorphism]:
    return right_unitor_D(ctx, X), left_unitor_D(ctx, X)


def braiding_D(ctx: MonoidalContext, X: FpModule, Y: FpModule) -> FpMorphism:
    ctx.require(X, Y)
    return l0_on_morphism(ctx.F, braiding(X, Y))


def _identity(M: FpModule) -> FpMorphism:
    return FpMorphism.identity(M)


def coherence_paths(ctx: MonoidalContext, kind: str, objects) -> tuple[FpMorphism, FpMorphism]:
    """The two composites of a coherence diagram, as maps between the same objects."""
    if kind not in COHERENCE_KINDS:
        raise UnsupportedInput(f"unknown coherence diagram {kind!r}")
    if len(objects) != COHERENCE_KINDS[kind]:
        raise PreconditionError(f"{kind} takes {COHERENCE_KINDS[kind]} objects")
    ctx.require(*objects)
    T = lambda A, B: tensor_D(ctx, A, B)  # noqa: E731
    a = lambda A, B, C: associator_D(ctx, A, B, C)  # noqa: E731
    x = lambda A, B: braiding_D(ctx, A, B)  # noqa: E731
    tm = lambda f, g: tensor_D_morphisms(ctx, f, g)  # noqa: E731
    I = _identity

    if kind == "pentagon":
        W, X, Y, Z = objects
        one = a(W, X, T(Y, Z)) @ a(T(W, X), Y, Z)
        two = tm(I(W), a(X, Y, Z)) @ a(W, T(X, Y), Z) @ tm(a(W, X, Y), I(Z))
        return one, two
    if kind == "triangle":
        X, Y = objects
        one = tm(I(X), left_unitor_D(ctx, Y)) @ a(X, ctx.unit_D, Y)
        two = tm(right_unitor_D(ctx, X), I(Y))
        return one, two
    if kind == "hexagon1":
        X, Y, Z = objects
        one = a(Y, Z, X) @ x(X, T(Y, Z)) @ a(X, Y, Z)
        two = tm(I(Y), x(X, Z)) @ a(Y, X, Z) @ tm(x(X, Y), I(Z))
        return one, two
    if kind == "hexagon2":
        X, Y, Z = objects
        inv = lambda A, B, C: _inverse(a(A, B, C))  # noqa: E731
        one = inv(Z, X, Y) @ x(T(X, Y), Z) @ inv(X, Y, Z)
        two = tm(x(X, Z), I(Y)) @ inv(X, Z, Y) @ tm(I(X), x(Y, Z))
        return one, two
    X, Y = objects
    return x(Y, X) @ x(X, Y), I(T(X, Y))


def coherence_check(ctx: MonoidalContext, kind: str, objects) -> bool:
    one, two = coherence_paths(ctx, kind, objects)
    return one.equals(two)


def require_coherence(ctx: MonoidalContext, kind: str, objects) -> None:
    """Raise CoherenceFailure with both path matrices when the diagram fails."""
    from .report import module_to_json, morphism_to_json

    one, two = coherence_paths(ctx, kind, objects)
    if not one.equals(two):
        raise CoherenceFailure(kind, {
            "kind": kind,
            "functor": ctx.F.name,
            "objects": [module_to_json(M) for M in objects],
            "path_one": morphism_to_json(one),
            "path_two": morphism_to_json(two),
        })


def internal_hom_D(ctx: MonoidalContext, X: FpModule, Y: FpModule) -> FpModule:
    ctx.require(X, Y)
    H = hom_module(X, Y)
    if not _in_D(ctx.F, H):
        raise InvariantViolation(f"[{X}, {Y}] is not L0{ctx.F.name}-complete")
    return H


def closedness_check(ctx: MonoidalContext, X: FpModule, Y: FpModule, Z: FpModule) -> bool:
    """Currying is a bijection Hom_D(Y (x)_D X, Z) -> Hom_D(Y, [X, Z])."""
    ctx.require(X, Y, Z)
    if not all(M.is_finite for M in (X, Y, Z)):
        raise UnsupportedInput("closedness check enumerates finite hom-sets")
    F = ctx.F
    H = HomSpace(X, Z)
    I = H.module
    internal_hom_D(ctx, X, Z)
    T = tensor_D(ctx, Y, X)
    n = tensor_unit(ctx, Y, X)
    gY, gX = Y.generators, X.generators
    eps_Z_inv = _inverse(l0_unit(F, Z))

    def curry(phi: FpMorphism) -> FpMorphism:
        flat = phi @ n
        cols = []
        for i in range(gY):
            block = IntMatrix.from_columns([flat.matrix.column(i * gX + j) for j in range(gX)], Z.generators)
            cols.append(H.from_morphism(FpMorphism._unchecked(X, Z, block)))
        return FpMorphism(Y, I, IntMatrix.from_columns(cols, I.generators))

    def uncurry(psi: FpMorphism) -> FpMorphism:
        cols = []
        for i in range(gY):
            cols.extend(H.to_morphism(psi.matrix.column(i)).matrix.to_columns())
        flat = FpMorphism(tensor(Y, X), Z, IntMatrix.from_columns(cols, Z.generators))
        return eps_Z_inv @ l0_on_morphism(F, flat)

    left = hom_enumerate(T, Z)
    right = hom_enumerate(Y, I)
    if len(left) != len(right):
        return False
    if not all(uncurry(curry(phi)).equals(phi) for phi in left):
        return False
    return all(curry(uncurry(psi)).equals(psi) for psi in right)
