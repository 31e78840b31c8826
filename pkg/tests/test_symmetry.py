import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bellcone.cone import membership
from bellcone.scenario import (all_ones_box, bell_cone, bell_facets, deterministic_boxes,
                               ns_cone, ns_extreme_rays, pr_box)
from bellcone.symmetry import (Involution, SymmetryElement, act, canonical_vector,
                               classify_orbits, format_spec, global_setting_swap,
                               group_elements, group_order, induced, involutions,
                               orbit_canonical_form, outcome_flip, parse_exchange_notation,
                               parse_spec)
from bellcone.tensor import (CorrelationTensor, DimensionMismatch, FunctionalTensor, lower,
                             pair, raise_)

G2 = list(group_elements(2))
G3 = list(group_elements(3))


def elements(group):
    return st.sampled_from(group)


def tensors(cls, n):
    vals = st.fractions(-4, 4, max_denominator=5)
    return st.lists(vals, min_size=3**n, max_size=3**n).map(lambda e: cls(n, tuple(e)))


def test_group_orders():
    for n in (1, 2, 3):
        els = list(group_elements(n))
        assert len(els) == len(set(els)) == group_order(n)
    assert group_order(2) == 128 and group_order(3) == 3072


def test_group_closed_under_composition():
    s = set(G2)
    for a in G2[::7]:
        for b in G2[::5]:
            assert a @ b in s


def test_act_examples():
    full_flip = outcome_flip(2, [0, 1])
    flipped = act(full_flip, pr_box())
    for w, v in pr_box().items():
        # each nonzero letter picks up one sign
        assert flipped[w] == v * (-1) ** sum(1 for s in w if s != 0)
    swap_parties = SymmetryElement((1, 0), (False, False), ((False, False),) * 2)
    assert act(swap_parties, pr_box()) == pr_box()
    x = CorrelationTensor.from_dict(2, {(-1, 0): 3, (1, 0): 7})
    y = act(parse_spec("swap(1)", 2), x)
    assert y[(-1, 0)] == 7 and y[(1, 0)] == 3


def test_act_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        act(SymmetryElement.identity(3), pr_box())


def test_zero_letter_fixed():
    for el in G2:
        perm, sign = el.signed_permutation()
        assert perm[4] == 4 and sign[4] == 1


@settings(max_examples=60)
@given(elements(G3), elements(G3), tensors(CorrelationTensor, 3))
def test_action_is_homomorphism(a, b, x):
    assert act(a @ b, x) == act(a, act(b, x))


@given(elements(G2), tensors(FunctionalTensor, 2), tensors(CorrelationTensor, 2))
def test_pairing_invariant(el, f, x):
    assert pair(act(el, f), act(el, x)) == pair(f, x)


def test_inverse():
    for el in G2:
        assert (el.inverse() @ el).is_identity()


def test_cones_preserved_exhaustively_at_two_parties():
    ns_rays = set(ns_extreme_rays(2).generators)
    b_gens = set(bell_cone(2).generators)
    for el in G2:
        for r in ns_rays:
            assert act(el, CorrelationTensor(2, r)).ray() in ns_rays
        for g in b_gens:
            assert act(el, CorrelationTensor(2, g)).ray() in b_gens


def test_cones_preserved_sampled_at_three_parties():
    rng = random.Random(4)
    from bellcone.scenario import box40
    for el in rng.sample(G3, 40):
        assert membership(ns_cone(3), act(el, box40()).entries)
        d = rng.choice(deterministic_boxes(3))
        assert act(el, d).entries in bell_cone(3).generators


@settings(max_examples=40)
@given(elements(G3), tensors(FunctionalTensor, 3))
def test_induced_action_transports_through_raise(el, f):
    assert raise_(act(el, f)) == act(induced(el), raise_(f))


def test_induced_per_party_rules():
    # a setting swap becomes a flip of the +1 observable, a full flip stays a full flip
    assert induced(parse_spec("swap(1)", 1)) == parse_spec("flip(1,+1)", 1)
    assert induced(parse_spec("flip(1,+1)", 1)) == parse_spec("swap(1)", 1)
    full = parse_spec("flip(1,-1),flip(1,+1)", 1)
    assert induced(full) == full


def test_canonical_form_examples():
    canon_ones, stab = orbit_canonical_form(all_ones_box(2))
    for d in deterministic_boxes(2):
        c, s = orbit_canonical_form(d)
        assert c == canon_ones and s == stab
    assert stab == 128 // 16
    anti = act(outcome_flip(2, [0]), pr_box())
    assert anti != pr_box()
    assert orbit_canonical_form(anti)[0] == orbit_canonical_form(pr_box())[0]
    with pytest.raises(ValueError):
        orbit_canonical_form(CorrelationTensor.zeros(2))


@settings(max_examples=30)
@given(elements(G2), tensors(CorrelationTensor, 2))
def test_canonical_form_invariant_and_idempotent(el, x):
    if x.is_zero():
        return
    c, s = orbit_canonical_form(x)
    assert orbit_canonical_form(act(el, x)) == (c, s)
    assert orbit_canonical_form(c)[0] == c
    assert group_order(2) % s == 0


def test_canonical_scaling_invariant():
    assert canonical_vector(pr_box().ray(), 2) == canonical_vector((pr_box() * 3).ray(), 2)


def test_classify_two_party():
    ns = classify_orbits(ns_extreme_rays(2), 2)
    assert sorted(o.size for o in ns) == [8, 16]
    assert sum(o.size for o in ns) == 24
    b = classify_orbits(bell_facets(2), 2)
    assert sorted(o.size for o in b) == [8, 16]
    assert len(ns) == len(b)
    assert [o.representative for o in ns] == sorted(o.representative for o in ns)
    with pytest.raises(DimensionMismatch):
        classify_orbits([(1, 2, 3)], 2)


def test_involution_checked():
    assert Involution(global_setting_swap(3))
    # a swap followed by a flip of the -1 slot has order four
    el = parse_spec("swap(1),flip(1,-1)", 1)
    with pytest.raises(ValueError):
        Involution(el)
    assert len(involutions(2)) == len([e for e in G2 if (e @ e).is_identity()])


def test_spec_language():
    el = parse_spec("flip(2,+1), swap(1), exchange(1,2)", 2)
    assert parse_spec(format_spec(el), 2) == el
    assert parse_spec("id", 3).is_identity()
    assert parse_spec("flip(1,-1),flip(1,-1)", 1).is_identity()
    for bad in ["", "swap(3)", "flip(1)", "flip(1,0)", "spin(1)", "swap(1) swap(2)", "id(1)"]:
        with pytest.raises(ValueError):
            parse_spec(bad, 2)


def test_spec_language_round_trip_over_group():
    for el in G2:
        assert parse_spec(format_spec(el), 2) == el


def test_exchange_notation():
    # letters name the parties; subscript 0 is setting -1 and 1 is setting +1
    assert parse_exchange_notation("C1 <-> -C1", "AC") == parse_spec("flip(2,+1)", 2)
    assert parse_exchange_notation("A0<->A1", "AB") == parse_spec("swap(1)", 2)
    el = parse_exchange_notation("B0 <-> C0, B1 <-> -C1", "BC")
    x = CorrelationTensor.from_dict(2, {(-1, 0): 1})
    assert act(el, x) == CorrelationTensor.from_dict(2, {(0, -1): 1})
    y = CorrelationTensor.from_dict(2, {(1, 0): 1})
    assert act(el, y) == CorrelationTensor.from_dict(2, {(0, 1): -1})
    assert parse_exchange_notation("id", "AB").is_identity()
    with pytest.raises(ValueError):
        parse_exchange_notation("A0 <-> B2", "AB")
    with pytest.raises(ValueError):
        parse_exchange_notation("A0 <-> A0, A0 <-> -A0", "AB")
