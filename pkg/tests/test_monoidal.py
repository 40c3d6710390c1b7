from __future__ import annotations

import itertools
import random

import pytest

from lcomplete.errors import PreconditionError, UnsupportedInput
from lcomplete.fpmod import FpModule, FpMorphism, Ring, is_isomorphic, is_isomorphism, tensor
from lcomplete.monoidal import (
    COHERENCE_KINDS,
    CoherenceFailure,
    MonoidalContext,
    associator_D,
    braiding_D,
    closedness_check,
    coherence_check,
    internal_hom_D,
    require_coherence,
    tensor_D,
    tensor_D_morphisms,
    unitors_D,
)
from lcomplete.reflection import CompleteFg, ModReduction, TorsionFreeQuotient, is_l0_complete
from lcomplete.samples import random_morphism, random_p_group

CTX = MonoidalContext(ModReduction(2, 2))


def nf(M):
    return (M.normal_form.free_rank, M.normal_form.invariant_factors)


def cyc(n):
    return FpModule.cyclic(n)


def test_tensor_examples():
    assert nf(tensor_D(CTX, cyc(4), cyc(4))) == (0, (4,))
    for X in (cyc(2), cyc(4), FpModule.from_invariants([2, 4])):
        assert is_isomorphic(tensor_D(CTX, CTX.unit_D, X), X)
        assert tensor_D(CTX, X, FpModule.zero()).is_zero_module
    with pytest.raises(PreconditionError):
        tensor_D(CTX, cyc(8), cyc(2))


def test_structure_maps_are_isomorphisms():
    objs = [cyc(2), cyc(4), FpModule.from_invariants([2, 2]), CTX.unit_D]
    for X, Y, Z in itertools.product(objs, repeat=3):
        assert is_isomorphism(associator_D(CTX, X, Y, Z))
    for X, Y in itertools.product(objs, repeat=2):
        assert is_isomorphism(braiding_D(CTX, X, Y))
    for X in objs:
        rho, lam = unitors_D(CTX, X)
        assert is_isomorphism(rho) and is_isomorphism(lam)


def test_structure_map_examples():
    ctx1 = MonoidalContext(ModReduction(2, 1))
    b = braiding_D(ctx1, cyc(2), cyc(2))
    assert b.equals(FpMorphism.identity(b.source))
    rho, lam = unitors_D(CTX, CTX.unit_D)
    assert rho.equals(lam)
    assert coherence_check(CTX, "triangle", (CTX.unit_D, cyc(4)))
    assert coherence_check(CTX, "symmetry", (cyc(4), cyc(2)))
    assert coherence_check(CTX, "pentagon", (CTX.unit_D,) * 4)


@pytest.mark.parametrize("kind", sorted(COHERENCE_KINDS))
@pytest.mark.parametrize("F", [ModReduction(2, 2), ModReduction(3, 1), TorsionFreeQuotient(2)],
                         ids=lambda F: F.name)
def test_coherence_exhaustive_small(kind, F):
    ctx = MonoidalContext(F)
    p = F.p
    objs = [M for M in (cyc(p), cyc(p * p), cyc(p ** 3)) if is_l0_complete(F, M)] + [ctx.unit_D]
    for tup in itertools.product(objs, repeat=COHERENCE_KINDS[kind]):
        require_coherence(ctx, kind, tup)


def test_naturality_of_braiding_and_associator():
    rng = random.Random(30)
    for _ in range(60):
        X, Y, Z, X2, Y2, Z2 = (random_p_group(rng, 2, 2, max_gens=2) for _ in range(6))
        f, g, h = random_morphism(rng, X, X2), random_morphism(rng, Y, Y2), random_morphism(rng, Z, Z2)
        fg = tensor_D_morphisms(CTX, f, g)
        assert (braiding_D(CTX, X2, Y2) @ fg).equals(tensor_D_morphisms(CTX, g, f) @ braiding_D(CTX, X, Y))
        left = tensor_D_morphisms(CTX, fg, h)
        right = tensor_D_morphisms(CTX, f, tensor_D_morphisms(CTX, g, h))
        assert (associator_D(CTX, X2, Y2, Z2) @ left).equals(right @ associator_D(CTX, X, Y, Z))


def test_tensor_matches_native_ring():
    rng = random.Random(31)
    R = Ring.mod_prime_power(2, 3)
    ctx = MonoidalContext(ModReduction(2, 3))
    for _ in range(100):
        X, Y = random_p_group(rng, 2, 3), random_p_group(rng, 2, 3)
        assert nf(tensor_D(ctx, X, Y)) == nf(tensor(X.over(R), Y.over(R)))


def test_internal_hom():
    assert nf(internal_hom_D(CTX, cyc(2), cyc(4))) == (0, (2,))
    for Y in (cyc(2), cyc(4), FpModule.from_invariants([2, 4])):
        assert is_isomorphic(internal_hom_D(CTX, CTX.unit_D, Y), Y)
    rng = random.Random(32)
    for _ in range(100):
        X, Y = random_p_group(rng, 2, 2), random_p_group(rng, 2, 2)
        assert is_l0_complete(CTX.F, internal_hom_D(CTX, X, Y))


def test_closedness():
    assert closedness_check(CTX, cyc(2), cyc(2), cyc(4))
    objs = [cyc(2), cyc(4), CTX.unit_D]
    for X, Y, Z in itertools.product(objs, repeat=3):
        assert closedness_check(CTX, X, Y, Z)
    with pytest.raises(UnsupportedInput):
        closedness_check(MonoidalContext(TorsionFreeQuotient(2)), FpModule.free(1), cyc(2), cyc(2))


def test_coherence_failure_carries_counterexample(monkeypatch):
    import lcomplete.monoidal as mon

    real = mon.braiding_D
    # a negated braiding still squares to the identity but breaks the hexagon
    monkeypatch.setattr(mon, "braiding_D", lambda ctx, X, Y: -real(ctx, X, Y))
    assert coherence_check(CTX, "symmetry", (cyc(4), cyc(4)))
    with pytest.raises(CoherenceFailure) as info:
        require_coherence(CTX, "hexagon1", (cyc(4), cyc(4), cyc(4)))
    ce = info.value.counterexample
    assert ce["kind"] == "hexagon1" and ce["functor"] == "mod:2:2" and len(ce["objects"]) == 3
    assert ce["path_one"]["matrix"] != ce["path_two"]["matrix"]


def test_completion_context_unsupported():
    with pytest.raises(UnsupportedInput):
        MonoidalContext(CompleteFg(2))
    with pytest.raises(UnsupportedInput):
        coherence_check(CTX, "heptagon", ())
    with pytest.raises(PreconditionError):
        coherence_check(CTX, "pentagon", (cyc(2),))
