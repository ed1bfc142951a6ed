import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

import tetravib.burnside as bu
from tetravib.grouprep import CHARACTER_TABLE

from _golden import DEGREE_TABLES, as_class_set, lookup


@pytest.fixture(scope="module")
def u1():
    return bu.universe_for_modes([1])


@pytest.fixture(scope="module")
def u12():
    return bu.universe_for_modes([1, 2])


# ---------------------------------------------------------------------------
# S4 subgroup lattice, against an independent in-test enumeration

def _compose(p, q):
    return tuple(p[q[i]] for i in range(4))


def _closure(gens):
    identity = (0, 1, 2, 3)
    group = {identity}
    frontier = set(gens)
    while frontier:
        group |= frontier
        frontier = {_compose(a, b) for a in group for b in group} - group
    return frozenset(group)


def _all_subgroups_oracle():
    perms = list(itertools.permutations(range(4)))
    subs = set()
    for a in perms:
        for b in perms:
            subs.add(_closure([a, b]))
    return subs


def test_subgroup_census_against_closure_oracle():
    oracle = _all_subgroups_oracle()
    assert len(oracle) == 30
    by_order = {}
    for h in oracle:
        by_order[len(h)] = by_order.get(len(h), 0) + 1
    assert by_order == {1: 1, 2: 9, 3: 4, 4: 7, 6: 4, 8: 3, 12: 1, 24: 1}

    classes = bu.enumerate_s4_subgroups()
    assert len(classes) == 11
    counts = {c.label: len(c.members) for c in classes}
    assert counts == {"Z1": 1, "D1": 6, "Z2": 3, "Z3": 4, "D2": 3,
                      "V4": 1, "Z4": 3, "D3": 4, "D4": 3, "A4": 1, "S4": 1}
    # same subgroups as the oracle, translated through the S4 index table
    listed = {frozenset(h) for c in classes for h in c.members}
    oracle_idx = {frozenset(bu.S4.index(p) for p in h) for h in oracle}
    assert listed == oracle_idx


def test_order_two_labels_distinguish_transpositions():
    transposition = bu.S4.index((1, 0, 2, 3))
    double = bu.S4.index((1, 0, 3, 2))
    assert bu.s4_subgroup_label(frozenset([bu.ID_PERM, transposition])) == "D1"
    assert bu.s4_subgroup_label(frozenset([bu.ID_PERM, double])) == "Z2"


# ---------------------------------------------------------------------------
# universe basics

def test_universe_orders_and_unit(u1):
    assert u1.N == 12                       # lcm of dihedral orders 1..4
    unit = u1.unit
    assert unit.printed_form() == "(S4 x O2)"
    assert u1.weyl(unit) == (True, 1)


def test_name_round_trip_every_class(u12):
    for kl in u12.all_classes():
        assert u12.parse_class(kl.canonical_form()) is kl
        assert u12.parse_class(kl.printed_form()) is kl
    with pytest.raises(KeyError):
        u12.parse_class("(S9 x D1)")


def test_weyl_orders(u12):
    for l in (1, 2, 3, 4):
        kl = lookup(u12, "S4", "S4", None, "Z1", l)
        assert u12.weyl(kl) == (True, 2)
    cyclic = u12.find_class("S4", l_label="Z1", k_order=1, kind="cyclic")
    finite, order = u12.weyl(cyclic)
    assert not finite and order is None
    assert not cyclic.in_phi0


def test_weyl_of_half_continuous_classes(u1):
    # index-2 subgroups of the full product are normal, so their Weyl
    # group is the whole quotient of order 2
    for name in ("(S4^A4 x_Z2 O2)", "(S4 x SO2)"):
        kl = u1.parse_class(name)
        assert u1.weyl(kl) == (True, 2)
    assert u1.weyl(u1.parse_class("(A4 x O2)")) == (True, 2)


def test_products_close_over_continuous_classes(u1):
    cont = [kl for kl in u1.phi0_classes() if not kl.is_finite]
    assert len(cont) > 20
    rng = random.Random(7)
    finite = [kl for kl in u1.phi0_classes() if kl.is_finite]
    pairs = list(itertools.combinations_with_replacement(cont, 2))
    pairs += [(a, rng.choice(finite)) for a in cont]
    for a, b in pairs:
        ea = bu.BurnsideElement(u1, {a.index: 1})
        eb = bu.BurnsideElement(u1, {b.index: 1})
        prod = ea * eb            # exact-division check runs internally
        for kl, coeff in prod.terms():
            assert kl.in_phi0 and coeff == int(coeff)


def test_three_epimorphism_kernels_give_distinct_classes(u12):
    kls = [u12.find_class("D4", z_label=z, l_label="Z2", k_order=2)
           for z in ("D2", "Z4", "V4")]
    assert len({kl.index for kl in kls}) == 3
    forms = {kl.printed_form() for kl in kls}
    assert forms == {"(D4^D2 x_Z2 D2)", "(D4^Z4 x_Z2 D2)", "(D4^V4 x_Z2 D2)"}


# ---------------------------------------------------------------------------
# counting coefficients and the partial order

def test_n_count_reflexive_and_unit(u1):
    unit = u1.unit
    sample = [kl for kl in u1.phi0_classes() if kl.is_finite][::7]
    for kl in sample:
        assert u1.n_count(kl, kl) == 1
        assert u1.n_count(kl, unit) == 1


def test_n_count_d1_inside_d3(u1):
    low = lookup(u1, "D1", "D1", None, "Z1", 1)       # <(12)> x D1
    high = lookup(u1, "D3", "D3", None, "Z1", 1)      # S3 copies x D1
    assert u1.n_count(low, high) == 2


def test_leq_antisymmetric_on_equal_order_classes(u1):
    finite = [kl for kl in u1.phi0_classes() if kl.is_finite]
    by_order = {}
    for kl in finite:
        by_order.setdefault(kl.order, []).append(kl)
    for group in by_order.values():
        for a, b in itertools.combinations(group, 2):
            assert not (u1.leq(a, b) and u1.leq(b, a))


# ---------------------------------------------------------------------------
# ring structure

def _random_element(u, rng, classes):
    coeffs = {}
    for kl in rng.sample(classes, 2):
        coeffs[kl.index] = rng.choice([-3, -2, -1, 1, 2, 3])
    return bu.BurnsideElement(u, coeffs)


def test_ring_axioms_on_random_elements(u1):
    rng = random.Random(20240817)
    classes = list(u1.phi0_classes())
    unit = bu.BurnsideElement.unit(u1)
    for _ in range(10):
        a = _random_element(u1, rng, classes)
        b = _random_element(u1, rng, classes)
        c = _random_element(u1, rng, classes)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a * unit == a
        assert a - a == bu.BurnsideElement(u1, {})
    for _ in range(2):
        a = _random_element(u1, rng, classes)
        b = _random_element(u1, rng, classes)
        c = _random_element(u1, rng, classes)
        assert (a * b) * c == a * (b * c)


def test_integer_scalar_multiple(u1):
    d = u1.basic_degree(0, 1)
    assert 2 * d == d + d
    assert -1 * d == -d


# ---------------------------------------------------------------------------
# basic degrees: golden tables and the involution property

def test_basic_degree_tables_l1_l2(u12):
    for j, table in DEGREE_TABLES.items():
        for l in (1, 2):
            deg = u12.basic_degree(j, l)
            expected = as_class_set(u12, table, scale=l)
            expected[u12.unit] = 1
            got = dict(deg.terms())
            assert got == expected, "degree table j=%d l=%d" % (j, l)


def test_degree_squares_to_unit(u12):
    unit = bu.BurnsideElement.unit(u12)
    for j in range(5):
        for l in (1, 2):
            d = u12.basic_degree(j, l)
            assert d * d == unit, (j, l)


def test_degree_display_order_matches_reference(u12):
    text = str(u12.basic_degree(1, 1))
    assert text.startswith("(S4 x O2) - (D4^Z1 x_D4 D4) - (D4^D2 x_Z2 D2)")
    assert text.endswith("- (Z2^Z1 x_D1 D1) - (Z1 x D1)")


# ---------------------------------------------------------------------------
# fixed point dimensions

def _manual_fixdim(u, codes, j, l):
    total = 0.0
    for e in codes:
        p, kind, k = u.split(e)
        if kind == 0:
            chi = int(CHARACTER_TABLE[j][bu.PERM_CLASS[p]])
            total += chi * 2.0 * math.cos(2.0 * math.pi * l * k / u.N)
    return total / len(codes)


def test_fixed_point_dim_matches_character_average(u1):
    for kl in u1.phi0_classes():
        if not kl.is_finite:
            continue
        for j, l in ((0, 1), (1, 1), (2, 1)):
            manual = _manual_fixdim(u1, kl.codes, j, l)
            assert abs(manual - round(manual)) < 1e-9
            assert u1.fixed_point_dim(j, l, kl) == round(manual)


def test_fixed_point_dim_constant_on_conjugates(u1):
    for name in ("(S4 x D1)", "(D2^D1 x_Z2 D2)", "(D3^Z1 x_D3 D3)"):
        kl = u1.parse_class(name)
        base = u1.fixed_point_dim(1, 1, kl)
        for codes in u1.conjugates_of(kl)[:6]:
            assert abs(_manual_fixdim(u1, codes, 1, 1) - base) < 1e-9


def test_fixed_point_dim_examples(u12):
    for l in (1, 2):
        full = lookup(u12, "S4", "S4", None, "Z1", l)
        assert u12.fixed_point_dim(0, l, full) == 1
        cyclic = u12.find_class("S4", l_label="Z1", k_order=l, kind="cyclic")
        assert u12.fixed_point_dim(0, l, cyclic) == 2
    assert u12.fixed_point_dim(0, 1, u12.unit) == 0
    # a mode the breathing class does not touch
    assert u12.fixed_point_dim(1, 1, lookup(u12, "S4", "S4", None, "Z1", 1)) == 0


# ---------------------------------------------------------------------------
# truncation and covers

def test_pi0_drops_cyclic_classes(u12):
    dihedral = lookup(u12, "S4", "S4", None, "Z1", 1)
    cyclic = u12.find_class("S4", l_label="Z1", k_order=1, kind="cyclic")
    out = bu.pi0(u12, [(dihedral, 3), (cyclic, 5)])
    assert out.coefficient(dihedral) == 3
    assert len(out.terms()) == 1


def test_fold_cover_doubles_the_k_part(u12):
    d1 = lookup(u12, "S4", "S4", None, "Z1", 1)
    d2 = lookup(u12, "S4", "S4", None, "Z1", 2)
    assert u12.fold_cover(d1, 2) is d2
    wave = lookup(u12, "D3", "Z1", None, "D3", 3)
    doubled = u12.fold_cover(wave, 2)
    assert doubled.K_order == 6 and doubled.H_label == "D3"
    assert len(doubled.codes) == 2 * len(wave.codes)


# ---------------------------------------------------------------------------
# concrete elements

def test_element_lists_and_time_reflection(u1):
    breathing = u1.parse_class("(S4 x D1)")
    elems = breathing.elements()
    assert len(elems) == 48
    assert breathing.contains_time_reflection()
    wave = u1.parse_class("(D4^Z1 x_D4 D4)")
    kinds = {(p, kind) for p, kind, _ in wave.elements()}
    assert ((0, 1, 2, 3), "refl") not in kinds
    assert any(kind == "refl" for _, kind in kinds)
    angles = {ang for p, kind, ang in wave.elements() if kind == "rot"}
    assert Fraction(1, 4) in angles


def test_elements_form_a_closed_group(u1):
    kl = u1.parse_class("(D2^D1 x_Z2 D2)")
    codes = kl.codes
    assert len(codes) == kl.order
    for a in codes:
        assert u1.inv(a) in codes
        for b in codes:
            assert u1.mul(a, b) in codes
