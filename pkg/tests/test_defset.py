import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomata.defset import (
    DefRel,
    DefSet,
    Element,
    QuotientSet,
    Variant,
    combine,
    compare,
    complement,
    count_orbits,
    difference,
    equal,
    identity,
    intersect,
    is_empty,
    is_function,
    is_subset,
    member,
    product,
    quotient,
    quotient_orbits,
    relate,
    union,
    witness,
)
from atomata.errors import EvaluationError, NotAnEquivalence, ShapeError, TheoryError
from atomata.theory import DENSE_ORDER, EQUALITY, Kind, parse_formula
from oracles import BruteEvaluator, random_formula

EQ1 = EQUALITY.with_constants(["1"])
ORD1 = DENSE_ORDER.with_constants([Fraction(0), Fraction(1)])


def one(cfg, arity, text, tag="v"):
    return DefSet([Variant(tag, arity, parse_formula(text, cfg))], cfg)


def rel(cfg, text, n=1):
    v = DefSet.full(cfg, {"v": n})
    return DefRel.of(v, v, {("v", "v"): parse_formula(text, cfg)})


def el(*atoms, tag="v"):
    return Element(tag, tuple(atoms))


# -- membership


def test_member_examples():
    assert member(one(EQUALITY, 2, "(!= x1 x2)"), el("1", "2"))
    s = one(ORD1, 2, "(and (or (< @0 x1) (= @0 x1)) (or (< x1 x2) (= x1 x2)) (or (< x2 @1) (= x2 @1)))")
    assert member(s, el(Fraction(1, 3), Fraction(1, 2)))
    assert not member(s, el(Fraction(1, 2), Fraction(1, 3)))


def test_member_errors():
    s = one(EQUALITY, 2, "true")
    with pytest.raises(EvaluationError):
        member(s, el("1", tag="w"))
    with pytest.raises(EvaluationError):
        member(s, el("1"))


def test_variant_rejects_stray_variables():
    with pytest.raises(ShapeError):
        Variant("v", 1, parse_formula("(= x1 x2)", EQUALITY))


def test_duplicate_tags_rejected():
    with pytest.raises(ShapeError):
        DefSet([Variant("v", 0, parse_formula("true", EQUALITY))] * 2, EQUALITY)


# -- Boolean operations


def test_complement_of_disequality():
    s = one(EQUALITY, 2, "(!= x1 x2)")
    assert equal(complement(s), one(EQUALITY, 2, "(= x1 x2)"))


def test_intersect_with_complement_is_empty():
    s = one(ORD1, 2, "(and (< x1 x2) (< x2 @1))")
    assert is_empty(intersect(s, complement(s)))


def test_product_of_full_lines():
    a = one(EQUALITY, 1, "true", "a")
    b = one(EQUALITY, 1, "true", "b")
    p = product(a, b)
    assert p.tags == (("a", "b"),)
    assert p.arity(("a", "b")) == 2
    assert member(p, el("1", "1", tag=("a", "b")))


def test_union_arity_conflict():
    with pytest.raises(ShapeError):
        union(one(EQUALITY, 1, "true"), one(EQUALITY, 2, "true"))


def test_theory_mismatch():
    with pytest.raises(TheoryError):
        union(one(EQUALITY, 1, "true"), one(DENSE_ORDER, 1, "true"))


def test_union_keeps_tags_of_both_sides():
    s = union(one(EQUALITY, 1, "true", "a"), one(EQUALITY, 0, "true", "b"))
    assert set(s.tags) == {"a", "b"}
    assert count_orbits(s) == 2


def test_difference():
    s = difference(one(EQUALITY, 2, "true"), one(EQUALITY, 2, "(= x1 x2)"))
    assert equal(s, one(EQUALITY, 2, "(!= x1 x2)"))


# -- comparison


def test_compare_examples():
    assert compare("empty", one(EQUALITY, 1, "(!= x1 x1)"))
    s = one(ORD1, 2, "(and (< x1 x2) (< x2 @1))")
    assert compare("subset", s, one(ORD1, 2, "(< x1 @1)"))
    assert compare("equal", s, union(s, s))


def test_subset_shape_mismatch():
    with pytest.raises(ShapeError):
        is_subset(one(EQUALITY, 1, "true"), one(EQUALITY, 2, "true"))


def test_witness_is_member():
    s = one(ORD1, 2, "(and (< @0 x1) (< x1 x2) (< x2 @1))")
    w = witness(s)
    assert w is not None and member(s, w)
    assert witness(one(EQUALITY, 1, "false")) is None


# -- random Boolean laws


def random_set(seed, cfg):
    rng = random.Random(seed)
    f = random_formula(rng, cfg.kind, free=("x1", "x2"), depth=1, consts=sorted(cfg.declared_constants))
    return DefSet([Variant("v", 2, f)], cfg)


@pytest.mark.parametrize("cfg", [EQ1, ORD1], ids=["eq", "ord"])
@settings(max_examples=25, deadline=None)
@given(a=st.integers(0, 10**9), b=st.integers(0, 10**9), c=st.integers(0, 10**9))
def test_boolean_laws(cfg, a, b, c):
    s, t, u = random_set(a, cfg), random_set(b, cfg), random_set(c, cfg)
    assert equal(union(s, t), union(t, s))
    assert equal(intersect(s, intersect(t, u)), intersect(intersect(s, t), u))
    assert equal(complement(union(s, t)), intersect(complement(s), complement(t)))
    assert equal(complement(complement(s)), s)


@pytest.mark.parametrize("cfg", [EQ1, ORD1], ids=["eq", "ord"])
@settings(max_examples=25, deadline=None)
@given(a=st.integers(0, 10**9), b=st.integers(0, 10**9))
def test_subset_agrees_with_membership(cfg, a, b):
    s, t = random_set(a, cfg), random_set(b, cfg)
    sub = is_subset(s, t)
    atoms = ["1", "2", "3"] if cfg.kind is Kind.EQUALITY else [Fraction(k, 2) for k in range(-1, 4)]
    for tup in itertools.product(atoms, repeat=2):
        e = el(*tup)
        if sub and member(s, e):
            assert member(t, e)


# -- relations


def test_image_example():
    r = rel(EQ1, "(!= x1 x2)")
    img = relate("image", r, one(EQ1, 1, "(= x1 @1)"))
    assert equal(img, one(EQ1, 1, "(!= x1 @1)"))


def test_compose_disequality_is_full():
    r = rel(EQUALITY, "(!= x1 x2)")
    rr = relate("compose", r, r)
    assert equal(rr.carrier, DefSet.full(EQUALITY, {("v", "v"): 2}))


def test_preimage_of_empty():
    r = rel(EQUALITY, "(= x1 x2)")
    assert is_empty(relate("preimage", r, one(EQUALITY, 1, "false")))


def test_relate_shape_mismatch():
    r = rel(EQUALITY, "(= x1 x2)")
    with pytest.raises(ShapeError):
        relate("image", r, one(EQUALITY, 2, "true"))


@pytest.mark.parametrize("cfg", [EQ1, ORD1], ids=["eq", "ord"])
@settings(max_examples=25, deadline=None)
@given(a=st.integers(0, 10**9), b=st.integers(0, 10**9))
def test_image_empty_iff_restricted_relation_empty(cfg, a, b):
    r = random_set(a, cfg)
    f = r.variants[0].constraint
    r = DefRel.of(DefSet.full(cfg, {"v": 1}), DefSet.full(cfg, {"v": 1}), {("v", "v"): f})
    g = random_formula(random.Random(b), cfg.kind, free=("x1",), depth=1, consts=sorted(cfg.declared_constants))
    s = DefSet([Variant("v", 1, g)], cfg)
    restricted = intersect(r.carrier, product(s, DefSet.full(cfg, {"v": 1})))
    assert is_empty(relate("image", r, s)) == is_empty(restricted)
    # brute force over a sample holding every orbit of pairs over the constants:
    # two fresh atoms, or two points in each interval the constants cut out
    if cfg.kind is Kind.EQUALITY:
        atoms = ["1", "2", "3", "4"]
    else:
        cuts = sorted(cfg.declared_constants)
        atoms = [cuts[0] - 2, cuts[0] - 1, cuts[-1] + 1, cuts[-1] + 2] + cuts
        atoms += [lo + (hi - lo) * k / 3 for lo, hi in zip(cuts, cuts[1:]) for k in (1, 2)]
    brute = BruteEvaluator(cfg.kind, atoms, sorted(cfg.declared_constants))
    hit = any(brute(g, {"x1": x}) and brute(f, {"x1": x, "x2": y}) for x in atoms for y in atoms)
    assert hit == (not is_empty(restricted))


def test_is_function_examples():
    line = DefSet.full(EQ1, {"v": 1})
    assert is_function(identity(line))
    assert not is_function(rel(EQ1, "(!= x1 x2)"))
    assert is_function(rel(EQ1, "(= x2 @1)"))


def test_inverse_round_trip():
    r = rel(ORD1, "(< x1 x2)")
    assert equal(r.inverse().inverse().carrier, r.carrier)
    assert equal(r.inverse().carrier, rel(ORD1, "(< x2 x1)").carrier)


# -- quotients


def test_quotient_same_first_coordinate():
    base = DefSet.full(EQUALITY, {"v": 2})
    eq = DefRel.of(base, base, {("v", "v"): parse_formula("(= x1 x3)", EQUALITY)})
    q = quotient(QuotientSet(base, eq))
    assert q.class_equal(el("1", "5"), el("1", "7"))
    assert not q.class_equal(el("1", "5"), el("2", "5"))
    assert quotient_orbits(base, eq) == 1


def test_quotient_full_and_identity():
    base = DefSet.full(EQUALITY, {"v": 2})
    full = DefRel.of(base, base, {("v", "v"): parse_formula("true", EQUALITY)})
    assert quotient(QuotientSet(base, full)).class_equal(el("1", "2"), el("3", "3"))
    q = quotient(QuotientSet(base, identity(base)))
    assert q.class_equal(el("1", "2"), el("1", "2"))
    assert not q.class_equal(el("1", "2"), el("2", "1"))


@pytest.mark.parametrize("text,law", [("(< x1 x2)", "reflexivity"),
                                      ("(or (= x1 x2) (< x1 x2))", "symmetry")])
def test_non_equivalence_reports_law(text, law):
    base = DefSet.full(DENSE_ORDER, {"v": 1})
    r = DefRel.of(base, base, {("v", "v"): parse_formula(text, DENSE_ORDER)})
    with pytest.raises(NotAnEquivalence) as info:
        quotient(QuotientSet(base, r))
    assert info.value.law == law


def test_quotient_laws_on_samples():
    base = DefSet.full(EQUALITY, {"v": 2})
    eq = DefRel.of(base, base, {("v", "v"): parse_formula("(= x2 x4)", EQUALITY)})
    q = quotient(QuotientSet(base, eq))
    pts = [el(*t) for t in itertools.product(["1", "2", "3"], repeat=2)]
    for e in pts:
        assert q.class_equal(e, e)
        for f in pts:
            assert q.class_equal(e, f) == q.class_equal(f, e)
            for g in pts:
                if q.class_equal(e, f) and q.class_equal(f, g):
                    assert q.class_equal(e, g)


# -- orbits


def test_orbit_examples():
    assert count_orbits(DefSet.full(EQUALITY, {"v": 2})) == 2
    assert count_orbits(one(EQUALITY, 2, "(!= x1 x2)")) == 1
    assert count_orbits(DefSet.empty(EQUALITY, {"v": 2})) == 0
    assert count_orbits(DefSet.full(DENSE_ORDER, {"v": 3})) == 13


def test_orbits_with_constants():
    s = one(EQ1, 1, "true")
    assert count_orbits(s) == 1
    assert count_orbits(s, with_constants=True) == 2


def test_orbits_add_over_variants():
    a = one(DENSE_ORDER, 2, "(< x1 x2)", "a")
    b = one(DENSE_ORDER, 3, "(or (< x1 x2) (= x2 x3))", "b")
    both = union(a, b)
    assert count_orbits(both) == count_orbits(a) + count_orbits(b)


def test_combine_accepts_names():
    s = one(EQUALITY, 1, "true")
    assert equal(combine("union", s, s), s)
