import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bellcone.cone import (ConeHRep, ConeVRep, contract_first, dual_vrep_to_hrep, dumps_cone,
                           enumerate_rays, hrep_as_vrep, is_extreme_ray, loads_cone,
                           max_membership_via_slices, max_tensor_product, membership,
                           min_tensor_product, remove_redundant, tight_rank)
from bellcone.linalg import nullspace, rank
from bellcone.scenario import (all_ones_box, bell_cone, chsh_functional, deterministic_boxes,
                               ns_cone, pr_box, square_cone)
from bellcone.tensor import DimensionMismatch, FormatError, primitive


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def brute_force_rays(c: ConeHRep):
    """Extreme rays of a pointed cone via all (d-1)-subsets of constraints."""
    d = c.ambient_dim
    rows = c.facet_functionals
    found = set()
    for sub in itertools.combinations(rows, d - 1):
        if rank(sub) != d - 1:
            continue
        (v,) = nullspace(sub, d)
        for cand in (v, tuple(-a for a in v)):
            if all(_dot(g, cand) >= 0 for g in rows):
                found.add(cand)
    return found


def test_dual_of_square_cone():
    sq_v, sq_h = square_cone()
    dual = enumerate_rays(dual_vrep_to_hrep(sq_v))
    assert set(dual.generators) == set(sq_h.facet_functionals)


def test_dual_of_single_generator():
    h = dual_vrep_to_hrep(ConeVRep(2, [(1, 0)]))
    assert h.facet_functionals == ((1, 0),)


def test_bell_two_party_facets():
    facets = enumerate_rays(dual_vrep_to_hrep(bell_cone(2)))
    assert len(facets) == 24
    positivity = set(ns_cone(2).facet_functionals)
    assert len(positivity & set(facets.generators)) == 16
    assert chsh_functional().ray() in facets.generators


def test_enumerate_examples():
    sq_v, sq_h = square_cone()
    assert enumerate_rays(sq_h).generators == sq_v.generators
    orthant = ConeHRep(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert set(enumerate_rays(orthant).generators) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    ns2 = enumerate_rays(ns_cone(2))
    assert len(ns2) == 24
    assert set(ns2.generators) == brute_force_rays(ns_cone(2))


def test_enumerate_with_lineality():
    # half-space x >= 0 in dim 2: lineality along y, one ray e1
    res = enumerate_rays(ConeHRep(2, [(1, 0)]))
    assert res.lineality == ((0, 1),)
    assert res.generators == ((1, 0),)
    # a subspace: x = 0 from two opposite inequalities, no rays at all
    sub = enumerate_rays(ConeHRep(2, [(1, 0), (-1, 0)]))
    assert sub.generators == ()
    assert sub.lineality == ((0, 1),)


def test_heuristics_agree():
    a = enumerate_rays(ns_cone(2), heuristic="violations")
    b = enumerate_rays(ns_cone(2), heuristic="index")
    assert a == b
    with pytest.raises(ValueError):
        enumerate_rays(ns_cone(2), heuristic="magic")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=6))
def test_enumerate_matches_brute_force(extra):
    # the orthant keeps the cone pointed; extra rows cut it further
    rows = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)] + [tuple(r) for r in extra]
    c = ConeHRep(4, rows)
    got = enumerate_rays(c)
    assert set(got.generators) == brute_force_rays(c)


def test_membership_examples():
    ns2 = ns_cone(2)
    assert membership(ns2, all_ones_box(2).entries)
    assert membership(ns2, pr_box().entries)
    m = membership(bell_cone(2), pr_box().entries)
    assert not m
    cert = m.certificate
    flipped = tuple(-v if i != 4 else v for i, v in enumerate(chsh_functional().entries))
    assert cert == primitive(flipped)
    # normalized so that x^{00} has coefficient 1, the pairing is -1
    assert Fraction(_dot(cert, pr_box().entries), cert[4]) == -1
    with pytest.raises(DimensionMismatch):
        membership(ns2, (0,) * 8)


def test_membership_coefficients_reconstruct():
    b2 = bell_cone(2)
    x = [sum(Fraction(k + 1) * g[j] for k, g in enumerate(b2.generators[:3])) for j in range(9)]
    m = membership(b2, x)
    assert m.member
    recon = [sum(c * g[j] for c, g in zip(m.coefficients, b2.generators)) for j in range(9)]
    assert recon == x and all(c >= 0 for c in m.coefficients)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(-2, 2, max_denominator=4), min_size=9, max_size=9))
def test_vrep_and_hrep_membership_agree(x):
    # B_2 as V-rep and as H-rep (its 24 facets) must decide identically
    b2v = bell_cone(2)
    b2h = ConeHRep(9, enumerate_rays(dual_vrep_to_hrep(b2v)).generators)
    mv, mh = membership(b2v, x), membership(b2h, x)
    assert mv.member == mh.member
    if not mv.member:
        assert all(_dot(mv.certificate, g) >= 0 for g in b2v.generators)
        assert _dot(mv.certificate, x) < 0


def test_nonmember_certificate_is_facet():
    b2v = bell_cone(2)
    facets = set(enumerate_rays(dual_vrep_to_hrep(b2v)).generators)
    rng = random.Random(3)
    for _ in range(20):
        x = [Fraction(rng.randint(-4, 4), 2) for _ in range(9)]
        m = membership(b2v, x)
        if not m.member:
            assert m.certificate in facets


def test_is_extreme_ray_examples():
    ns2 = ns_cone(2)
    assert is_extreme_ray(ns2, pr_box().entries)
    assert tight_rank(ns2, pr_box().entries) == 8
    d1, d2 = deterministic_boxes(2)[:2]
    assert not is_extreme_ray(ns2, (d1 + d2).entries)
    assert not is_extreme_ray(ns2, (0,) * 9)
    with pytest.raises(ValueError):
        is_extreme_ray(ns2, (0, 0, 0, 0, -1, 0, 0, 0, 0))


def test_is_extreme_ray_rejects_cones_with_lines():
    assert not is_extreme_ray(ConeHRep(2, [(1, 0)]), (1, 0))


def test_tensor_products_give_scenario_cones():
    sq_v, sq_h = square_cone()
    assert min_tensor_product([sq_v, sq_v]) == bell_cone(2)
    assert len(min_tensor_product([sq_v] * 3)) == 64
    assert min_tensor_product([sq_v]) == sq_v
    assert max_tensor_product([sq_h, sq_h]) == ns_cone(2)
    assert max_tensor_product([sq_h]) == sq_h


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(-2, 2, max_denominator=3), min_size=9, max_size=9))
def test_max_membership_criterion(z):
    sq_v, sq_h = square_cone()
    direct = membership(max_tensor_product([sq_h, sq_h]), z).member
    assert max_membership_via_slices(z, sq_h, sq_h) == direct


def test_contract_first():
    z = list(range(9))
    assert contract_first(z, (1, 0, 0), (3, 3)) == (0, 1, 2)
    assert contract_first(z, (0, 1, 1), (3, 3)) == (9, 11, 13)


def test_remove_redundant():
    c = ConeHRep(2, [(1, 0), (0, 1), (1, 1)])
    assert remove_redundant(c).facet_functionals == ((0, 1), (1, 0))


def test_canonical_storage():
    c = ConeVRep(2, [(2, 4), (1, 2), (Fraction(1, 3), 0), (0, 0)])
    assert c.generators == ((1, 0), (1, 2))
    assert hrep_as_vrep(ConeHRep(2, [(3, 0)])).generators == ((1, 0),)
    with pytest.raises(DimensionMismatch):
        ConeVRep(2, [(1, 2, 3)])


def test_cone_text_round_trip():
    for c in (bell_cone(2), ns_cone(2), enumerate_rays(ConeHRep(2, [(1, 0)]))):
        back = loads_cone(dumps_cone(c))
        assert (back.generators if isinstance(c, ConeVRep) else back.facet_functionals) == \
            (c.generators if isinstance(c, ConeVRep) else c.facet_functionals)
    text = dumps_cone(ns_cone(1))
    assert text.splitlines()[0] == "bellcone-cone v1; dim=3; rep=H; count=4"


@pytest.mark.parametrize("text", [
    "",
    "bellcone-cone v1; dim=2; rep=X; count=1\n1 0\n",
    "bellcone-cone v1; dim=2; rep=V; count=2\n1 0\n",
    "bellcone-cone v1; dim=2; rep=V; count=1\n1 0 0\n",
    "bellcone-cone v1; dim=2; rep=V; count=1\n1 q\n",
])
def test_cone_text_errors(text):
    with pytest.raises(FormatError):
        loads_cone(text)
