from __future__ import annotations

import copy
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcomplete.errors import MalformedInput, UnsupportedInput
from lcomplete.towers import (
    CYCLIC,
    FREE,
    IDEMPOTENCE_HOLDS,
    MIDDLE_EXACTNESS_FAILURE,
    ML_FAILURE,
    ML_STABILIZED,
    ExpRule,
    GradedModule,
    Segment,
    SymbolicElement,
    TransitionRule,
    brute_null_test,
    completion_tower,
    derive_hom_transition_rule,
    hom_tower,
    hom_transition_table,
    idempotence_check_completion,
    l0_vs_completion_report,
    middle_exactness_witness,
    ml_certificate,
    null_test,
    torsion_level,
    truncate,
    verify_bundle,
    verify_certificate,
)

PRIMES = [2, 3, 5]


def random_rule(rng, capped=None):
    a = Fraction(rng.randint(0, 3), rng.randint(1, 3))
    b = Fraction(rng.randint(0, 4), rng.randint(1, 2))
    use_cap = rng.random() < 0.5 if capped is None else capped
    cap = rng.randint(0, 6) if use_cap else None
    return ExpRule(a, b, cap)


def random_graded(rng, p=None):
    p = p or rng.choice(PRIMES)
    segs, start = [], 1
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.2:
            segs.append(Segment(start, FREE))
        else:
            segs.append(Segment(start, CYCLIC, random_rule(rng)))
        start += rng.randint(1, 5)
    return GradedModule(p, tuple(segs))


rules = st.builds(
    ExpRule,
    st.fractions(min_value=0, max_value=3, max_denominator=4),
    st.fractions(min_value=0, max_value=5, max_denominator=3),
    st.one_of(st.none(), st.integers(0, 8)),
)


# -- rules ---------------------------------------------------------------------


def test_rule_normalization():
    assert ExpRule(1, 0, 1) == ExpRule(0, 1)
    assert ExpRule(0, 5, 3) == ExpRule(0, 3)
    assert ExpRule(Fraction(1, 2), 0)(3) == 2
    assert ExpRule(2, 0, 5).stable_from() == 3
    with pytest.raises(MalformedInput):
        ExpRule(-1, 0)
    with pytest.raises(MalformedInput):
        ExpRule(0.5, 0)
    with pytest.raises(UnsupportedInput):
        ExpRule(1, 0).stable_from()


@settings(max_examples=300, deadline=None)
@given(rules)
def test_rule_semantics(r):
    vals = [r(n) for n in range(1, 60)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    if r.bounded:
        s = r.stable_from()
        assert all(r(n) == r.eventual for n in range(s, s + 40))
        assert s == 1 or r(s - 1) != r.eventual
    assert ExpRule.from_json(json.loads(json.dumps(r.to_json()))) == r


@settings(max_examples=300, deadline=None)
@given(rules, st.integers(0, 9), st.integers(0, 9))
def test_truncate_composes(r, N1, N2):
    M = GradedModule(2, (Segment(1, CYCLIC, r), Segment(4, FREE), Segment(7, CYCLIC, ExpRule(1, 1))))
    assert truncate(truncate(M, N1), N2) == truncate(M, min(N1, N2))
    T = truncate(M, N1)
    for n in range(1, 30):
        e = M.exponent(n)
        assert T.exponent(n) == (N1 if e is None else min(e, N1))


def test_truncate_examples():
    M = GradedModule.cyclic(2, ExpRule(1, 0))
    assert [truncate(M, 3).exponent(n) for n in range(1, 7)] == [1, 2, 3, 3, 3, 3]
    assert all(truncate(GradedModule.free(3), 2).exponent(n) == 2 for n in range(1, 10))
    C = GradedModule.cyclic(5, ExpRule(0, 2))
    assert truncate(C, 5) == C


def test_graded_json_roundtrip():
    rng = random.Random(40)
    for _ in range(100):
        M = random_graded(rng)
        assert GradedModule.from_json(json.loads(json.dumps(M.to_json()))) == M
    with pytest.raises(MalformedInput):
        GradedModule(4, (Segment(1, FREE),))
    with pytest.raises(MalformedInput):
        GradedModule(2, (Segment(2, FREE),))
    with pytest.raises(MalformedInput):
        Segment(1, CYCLIC)


def test_tower_levels():
    M = GradedModule.cyclic(2, ExpRule(1, 0))
    T = completion_tower(M)
    for k in range(1, 6):
        assert [T.level(k).exponent(n) for n in range(1, 9)] == [min(n, k) for n in range(1, 9)]
    bounded = GradedModule.cyclic(3, ExpRule(1, 0, 4))
    assert completion_tower(bounded).level(4) == completion_tower(bounded).level(9)
    assert completion_tower(GradedModule.free(2)).level(3) == GradedModule.cyclic(2, ExpRule(0, 3))
    assert torsion_level(GradedModule.free(2), 5) == GradedModule.cyclic(2, ExpRule(0, 0))


# -- symbolic elements ------------------------------------------------------------


def test_null_test_examples():
    for p in PRIMES:
        free = GradedModule.free(p)
        assert null_test(SymbolicElement(free, ExpRule(1, 0)))
        assert not null_test(SymbolicElement(free, ExpRule(0, 0)))
        cyc = GradedModule.cyclic(p, ExpRule(1, 0))
        x = SymbolicElement(cyc, ExpRule(Fraction(1, 2), 0))
        assert null_test(x) and brute_null_test(x)


def test_null_test_against_brute_force():
    rng = random.Random(41)
    for _ in range(200):
        M = random_graded(rng)
        if rng.random() < 0.3:
            x = SymbolicElement(M, values=tuple(rng.randint(-9, 9) for _ in range(rng.randint(0, 8))))
        else:
            unit = rng.choice([u for u in range(1, 12) if u % M.p])
            x = SymbolicElement(M, random_rule(rng), unit)
        assert null_test(x) == brute_null_test(x), (M, x)


# -- transition rule and certificates -----------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_hom_transition_rule_is_derived(p):
    rule, table = derive_hom_transition_rule(p)
    assert rule == TransitionRule(1, 0)
    rows = hom_transition_table(p)
    assert len(rows) == 36
    for r in rows:
        assert r["hom_exponent"] == min(r["k"], r["e"])
        assert r["t"] == min(rule(r["k"], r["e"]), r["hom_exponent"])


@pytest.mark.parametrize("p", PRIMES)
def test_ml_failure_for_hom_tower(p):
    cert = ml_certificate(hom_tower(GradedModule.cyclic(p, ExpRule(1, 0))), 10)
    assert cert.kind == ML_FAILURE
    assert verify_certificate(cert)
    assert verify_certificate(json.loads(json.dumps(cert.to_json())))
    assert "Gray" in cert.witness["annotation"]


def test_ml_stabilized_cases():
    M = GradedModule.cyclic(2, ExpRule(0, 3))
    cert = ml_certificate(completion_tower(M), 8)
    assert cert.kind == ML_STABILIZED and verify_certificate(cert)
    rng = random.Random(42)
    for _ in range(40):
        G = random_graded(rng)
        assert ml_certificate(completion_tower(G), 6).kind == ML_STABILIZED
        c = ml_certificate(hom_tower(G), 6)
        assert verify_certificate(c), G
        unbounded = G.tail.kind == CYCLIC and not G.tail.rule.bounded
        assert (c.kind == ML_FAILURE) == unbounded


def test_tampered_certificates_fail():
    cert = ml_certificate(hom_tower(GradedModule.cyclic(2, ExpRule(1, 0))), 6).to_json()
    bad = copy.deepcopy(cert)
    bad["verifier"]["data"]["transition_rule"]["c"] = 1
    assert not verify_certificate(bad)
    bad = copy.deepcopy(cert)
    bad["verifier"]["data"]["chain"][2]["exponent"] += 1
    assert not verify_certificate(bad)
    bad = copy.deepcopy(cert)
    bad["verifier"]["data"]["derivation_table"][0]["t"] = 5
    assert not verify_certificate(bad)
    bad = copy.deepcopy(cert)
    bad["verifier"]["procedure"] = ML_STABILIZED
    assert not verify_certificate(bad)
    mid = middle_exactness_witness(2).to_json()
    bad = copy.deepcopy(mid)
    bad["verifier"]["data"]["preimage_valuation"] = 1
    assert not verify_certificate(bad)
    stab = ml_certificate(hom_tower(GradedModule.cyclic(2, ExpRule(1, 0, 4))), 6).to_json()
    bad = copy.deepcopy(stab)
    bad["verifier"]["data"]["levels"][0]["stabilization"] += 1
    assert not verify_certificate(bad)


@pytest.mark.parametrize("p", PRIMES)
def test_middle_exactness(p):
    cert = middle_exactness_witness(p)
    assert cert.kind == MIDDLE_EXACTNESS_FAILURE
    assert cert.witness["x"]["valuation"]["a"] == 1
    assert cert.witness["preimage_valuation"] == 0
    assert cert.witness["levels"] == 12
    assert verify_certificate(cert)
    assert middle_exactness_witness(p, diag_rule=ExpRule(0, 1)) is None


def test_middle_exactness_bad_inputs():
    with pytest.raises(MalformedInput):
        middle_exactness_witness(2, x_rule=ExpRule(0, 3))
    with pytest.raises(UnsupportedInput):
        middle_exactness_witness(2, diag_rule=ExpRule(1, 0, 4))


def test_idempotence():
    for M in (GradedModule.cyclic(2, ExpRule(1, 0)), GradedModule.free(3), GradedModule.cyclic(5, ExpRule(0, 2))):
        cert = idempotence_check_completion(M, 10)
        assert cert.kind == IDEMPOTENCE_HOLDS and verify_certificate(cert)
    cert = idempotence_check_completion(GradedModule.cyclic(2, ExpRule(1, 0)), 4).to_json()
    cert["verifier"]["data"]["stages"].pop()
    assert not verify_certificate(cert)


@pytest.mark.parametrize("p", [2, 3])
def test_report_bundle(p):
    bundle = l0_vs_completion_report(p)
    kinds = sorted(c["kind"] for c in bundle["certificates"])
    assert kinds == sorted([MIDDLE_EXACTNESS_FAILURE, ML_FAILURE])
    assert verify_bundle(bundle)
    layer = {(r["functor"], r["module"]): r for r in bundle["finitely_generated_layer"]}
    z = layer[(f"tfq:{p}", f"Z/{p}^2")]
    assert z["l0_complete"] and not z["f_complete"]
    assert not layer[(f"complete:{p}", "Z")]["l0_complete"]
