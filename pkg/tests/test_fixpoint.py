import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomata.defset import DefRel, DefSet, Element, Variant, compose, equal, is_subset, member, rel_subset
from atomata.errors import CapExceeded, ShapeError
from atomata.fixpoint import LfpSpec, lfp, reachable, reflexive_transitive_closure, transitive_closure
from atomata.formula import Pred, Var
from atomata.textio import parse_lfp
from atomata.theory import DENSE_ORDER, EQUALITY, Kind, parse_formula
from oracles import BruteEvaluator, _order_witnesses, brute_reachable, random_formula

ORD1 = DENSE_ORDER.with_constants([Fraction(1)])


def rel(cfg, text):
    v = DefSet.full(cfg, {"v": 1})
    return DefRel.of(v, v, {("v", "v"): parse_formula(text, cfg)})


def pt(a):
    return Element("v", (a,))


def pairs(cfg, text):
    return DefSet([Variant(("v", "v"), 2, parse_formula(text, cfg))], cfg)


# -- transitive closure


def test_closure_of_disequality_is_full():
    t, n = transitive_closure(rel(EQUALITY, "(!= x1 x2)"))
    assert equal(t.carrier, pairs(EQUALITY, "true"))
    assert n == 2


def test_closure_of_order_is_itself():
    t, n = transitive_closure(rel(DENSE_ORDER, "(< x1 x2)"))
    assert equal(t.carrier, pairs(DENSE_ORDER, "(< x1 x2)"))
    assert n == 1


def test_closure_below_constant():
    # already transitive: x < y < 1 and y < z < 1 give x < z < 1
    r = rel(ORD1, "(and (< x1 x2) (< x2 @1))")
    t, n = transitive_closure(r)
    assert equal(t.carrier, r.carrier)
    assert n == 1


def test_closure_needs_several_powers():
    # successor-like steps on one side of a constant reach everything below it
    r = rel(ORD1, "(or (and (< x1 x2) (< x2 @1)) (and (= x2 @1) (< x1 @1)))")
    t, n = transitive_closure(r)
    assert equal(t.carrier, pairs(ORD1, "(and (< x1 x2) (or (< x2 @1) (= x2 @1)))"))


def test_closure_cap():
    with pytest.raises(CapExceeded) as info:
        transitive_closure(rel(EQUALITY, "(!= x1 x2)"), cap=1)
    assert info.value.iterations == 1


def test_closure_shape():
    a = DefSet.full(EQUALITY, {"v": 1})
    b = DefSet.full(EQUALITY, {"w": 2})
    with pytest.raises(ShapeError):
        transitive_closure(DefRel.of(a, b, {}))


def random_rel(seed, cfg):
    rng = random.Random(seed)
    f = random_formula(rng, cfg.kind, free=("x1", "x2"), depth=1, consts=sorted(cfg.declared_constants))
    return DefRel.of(DefSet.full(cfg, {"v": 1}), DefSet.full(cfg, {"v": 1}), {("v", "v"): f})


@pytest.mark.parametrize("cfg", [EQUALITY.with_constants(["1"]), ORD1], ids=["eq", "ord"])
@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_closure_is_least_transitive(cfg, seed):
    r = random_rel(seed, cfg)
    t, _ = transitive_closure(r)
    assert rel_subset(r, t)
    assert rel_subset(compose(t, t), t)
    again, n = transitive_closure(t)
    assert equal(again.carrier, t.carrier) and n == 1


@pytest.mark.parametrize("cfg", [EQUALITY.with_constants(["1"]), ORD1], ids=["eq", "ord"])
@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_closure_matches_brute_force_paths(cfg, seed):
    r = random_rel(seed, cfg)
    t, _ = transitive_closure(r)
    f = r.carrier.variants[0].constraint
    if cfg.kind is Kind.EQUALITY:
        atoms = ["1", "2", "3", "4"]
    else:
        atoms = [Fraction(k, 2) for k in range(-1, 5)]
    consts = sorted(cfg.declared_constants)
    brute = BruteEvaluator(cfg.kind, atoms, consts)
    for a in atoms:
        for b in atoms:
            # one point per 1-type over a, b and the constants carries every shortest path
            via = atoms if cfg.kind is Kind.EQUALITY else _order_witnesses([a, b] + consts)
            hit = any(brute(f, {"x1": a, "x2": c}) and brute_reachable(f, c, b, via, brute) for c in via)
            assert member(t.carrier, Element(("v", "v"), (a, b))) == hit


# -- reachability


def test_reach_examples():
    neq = rel(EQUALITY, "(!= x1 x2)")
    assert reachable(neq, pt("1"), pt("1"))
    assert reachable(neq, pt("1"), pt("2"))
    assert not reachable(rel(EQUALITY, "false"), pt("1"), pt("2"))


def test_reach_along_order_only_upwards():
    lt = rel(DENSE_ORDER, "(< x1 x2)")
    assert reachable(lt, pt(Fraction(1)), pt(Fraction(2)))
    assert not reachable(lt, pt(Fraction(2)), pt(Fraction(1)))


def test_reach_shape_errors():
    with pytest.raises(ShapeError):
        reachable(rel(EQUALITY, "true"), Element("w", ("1",)), pt("1"))


@pytest.mark.parametrize("cfg", [EQUALITY.with_constants(["1"]), ORD1], ids=["eq", "ord"])
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_reach_equals_closure_membership(cfg, seed):
    rng = random.Random(seed)
    r = random_rel(seed, cfg)
    star, _ = reflexive_transitive_closure(r)
    pool = ["1", "2", "3"] if cfg.kind is Kind.EQUALITY else [Fraction(k, 2) for k in range(0, 5)]
    a, b = rng.choice(pool), rng.choice(pool)
    assert reachable(r, pt(a), pt(b)) == member(star.carrier, Element(("v", "v"), (a, b)))


# -- least fixed points

CLOSURE = "(mu X (y1 y2) (or (= y1 y2) (exists (z) (and (E y1 z) (X z y2)))))"


def test_lfp_reflexive_closure_of_order():
    spec = parse_lfp(CLOSURE, DENSE_ORDER, {"E": 2})
    e = DefSet([Variant("E", 2, parse_formula("(< x1 x2)", DENSE_ORDER))], DENSE_ORDER)
    out, trace = lfp(spec, DENSE_ORDER, {"E": e})
    expected = DefSet([Variant("X", 2, parse_formula("(or (< x1 x2) (= x1 x2))", DENSE_ORDER))], DENSE_ORDER)
    assert equal(out, expected)
    assert trace.stabilized_at == 2
    for s, t in zip(trace.stages, trace.stages[1:]):
        assert is_subset(s, t)


def test_lfp_with_empty_edges():
    spec = parse_lfp(CLOSURE, EQUALITY, {"E": 2})
    e = DefSet([Variant("E", 2, parse_formula("false", EQUALITY))], EQUALITY)
    out, _ = lfp(spec, EQUALITY, {"E": e})
    assert equal(out, DefSet([Variant("X", 2, parse_formula("(= x1 x2)", EQUALITY))], EQUALITY))


def test_lfp_cap_zero():
    spec = parse_lfp(CLOSURE, EQUALITY, {"E": 2})
    e = DefSet([Variant("E", 2, parse_formula("(!= x1 x2)", EQUALITY))], EQUALITY)
    with pytest.raises(CapExceeded):
        lfp(spec, EQUALITY, {"E": e}, cap=0)


def test_lfp_rejects_negative_occurrence():
    body = parse_formula("(not (X y1))", EQUALITY, {"X": 1})
    with pytest.raises(ShapeError):
        LfpSpec("X", ("y1",), body)


def test_lfp_rigid_parameter():
    # points reachable from a fixed start p along <
    spec = parse_lfp("(mu X (y) (or (= y p) (exists (z) (and (X z) (< z y)))))", DENSE_ORDER)
    assert spec.rigid() == ("p",)
    out, _ = lfp(spec, DENSE_ORDER)
    expected = parse_formula("(or (= x1 x2) (< x2 x1))", DENSE_ORDER)
    assert equal(out, DefSet([Variant("X", 2, expected)], DENSE_ORDER))


def test_lfp_unbound_relation():
    spec = LfpSpec("X", ("y",), Pred("E", (Var("y"),)))
    with pytest.raises(ShapeError):
        lfp(spec, EQUALITY)
