import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomata import automata as A
from atomata.defset import DefSet, Variant, equal, is_empty, member
from atomata.errors import EvaluationError, InvalidAutomaton, ShapeError, TheoryError
from atomata.formula import TRUE
from atomata.theory import EQUALITY, parse_formula
from fixtures import (
    ALL_ACCEPTING,
    ALL_REJECTING,
    DUPLICATE_SINKS,
    EVEN_LENGTH,
    FRESH_AFTER_FIRST,
    INCREASING,
    all_words,
    atoms_for,
    first_back_dfa,
    repeat_nfa,
    order_word,
    parse,
    random_automaton,
    sym_word,
    ten_nfas,
)
from oracles import simulate


@pytest.fixture(scope="module")
def nfa():
    return repeat_nfa()


@pytest.fixture(scope="module")
def dfa():
    return first_back_dfa()


# -- validation


def test_validate_examples(nfa, dfa):
    r = A.validate(nfa)
    assert r.ok and not r.deterministic
    r = A.validate(dfa)
    assert r.ok and r.deterministic and r.total


def test_nfa_declared_deterministic_is_refuted(nfa):
    lying = nfa.replace(deterministic=True)
    r = A.validate(lying)
    assert not r.ok
    assert "deterministic" in r.issues[0]


def test_final_escaping_states(dfa):
    bad_final = DefSet([Variant("n", 1, parse_formula("true", EQUALITY)), Variant("zz", 0, TRUE)], EQUALITY)
    r = A.validate(dfa.replace(final=bad_final))
    assert not r.ok


def test_final_outside_state_constraint():
    states = DefSet([Variant("q", 1, parse_formula("(= x1 @1)", EQUALITY))], EQUALITY)
    final = DefSet([Variant("q", 1, TRUE)], EQUALITY)
    sig = DefSet.full(EQUALITY, {"sym": 1})
    a = A.build(sig, states, final, final, {})
    r = A.validate(a)
    assert not r.ok and r.witness is not None
    with pytest.raises(InvalidAutomaton):
        A.accepts(a, [])


# -- runs


def test_repeat_nfa_runs(nfa):
    assert A.accepts(nfa, sym_word(1, 2, 1))
    assert A.accepts(nfa, sym_word(1, 1))
    assert not A.accepts(nfa, sym_word(1, 2, 3))
    assert not A.accepts(nfa, [])


def test_first_back_dfa_runs(dfa):
    assert A.accepts(dfa, sym_word(2, 1, 2))
    assert not A.accepts(dfa, sym_word(2, 1, 1))


def test_letter_outside_alphabet(dfa):
    with pytest.raises(EvaluationError):
        A.accepts(dfa, [sym_word(1)[0].__class__("other", ("1",))])


@pytest.mark.parametrize("name", sorted(ten_nfas()))
def test_accepts_matches_finite_simulation(name):
    a = ten_nfas()[name]
    atoms = atoms_for(a.theory.kind, 3)
    domain = atoms_for(a.theory.kind, 5)
    for w in all_words(a, atoms, 3):
        assert A.accepts(a, w) == simulate(a, w, domain), w


@settings(max_examples=40, deadline=None)
@given(word=st.lists(st.integers(1, 4), max_size=5))
def test_nfa_accepts_sampled_words(word):
    a = repeat_nfa()
    w = sym_word(*word)
    assert A.accepts(a, w) == simulate(a, w, atoms_for(a.theory.kind, 6))


def test_increasing_words():
    a = parse(INCREASING)
    assert A.accepts(a, order_word(1, 2, 5))
    assert not A.accepts(a, order_word(1, 2, 2))


# -- emptiness


def test_repeat_nonempty_with_witness(nfa):
    assert not A.is_empty(nfa)
    w = A.find_word(nfa)
    assert w is not None and A.accepts(nfa, w)
    assert len(w) <= A.orbit_count(nfa)


def test_empty_final_is_empty():
    assert A.is_empty(parse(ALL_REJECTING))
    assert A.find_word(parse(ALL_REJECTING)) is None


@pytest.mark.parametrize("name", sorted(ten_nfas()))
def test_witness_words_are_accepted(name):
    a = ten_nfas()[name]
    w = A.find_word(a)
    assert (w is None) == A.is_empty(a)
    if w is not None:
        assert A.accepts(a, w)
        assert len(w) <= A.orbit_count(a)


# -- products and equivalence


def test_xor_with_itself_is_empty(dfa):
    assert A.is_empty(A.combine_automata("xor", dfa, dfa))


def test_and_with_all_accepting(dfa):
    both = A.combine_automata(A.AutOp.PRODUCT_AND, dfa, parse(ALL_ACCEPTING))
    for w in all_words(dfa, ["1", "2", "3"], 4):
        assert A.accepts(both, w) == A.accepts(dfa, w)


def test_equiv_examples(dfa):
    assert A.language_equiv(dfa, dfa)
    assert A.language_equiv(dfa, A.minimize(dfa).automaton)
    rejecting = parse(ALL_REJECTING)
    assert not A.language_equiv(dfa, rejecting)
    w = A.distinguishing_word(dfa, rejecting)
    assert w is not None and A.accepts(dfa, w) and len(w) == 2


def test_products_need_deterministic_inputs(nfa, dfa):
    with pytest.raises(InvalidAutomaton):
        A.combine_automata("and", nfa, dfa)


def test_products_need_same_alphabet(dfa):
    with pytest.raises(ShapeError):
        A.combine_automata("and", dfa, parse(EVEN_LENGTH.replace("variant sym", "variant tok")))
    with pytest.raises(TheoryError):
        A.combine_automata("and", dfa, parse(INCREASING))


def test_totalize_adds_sink():
    a = parse(FRESH_AFTER_FIRST)
    assert not A.validate(a).total
    t = A.totalize(a)
    assert A.validate(t).total
    for w in all_words(a, ["1", "2", "3"], 3):
        assert A.accepts(t, w) == A.accepts(a, w)


# -- minimization


def test_minimize_first_back(dfa):
    m = A.minimize(dfa)
    assert m.orbits == 3
    assert A.language_equiv(dfa, m.automaton)
    assert A.orbit_count(m.automaton) == 3


def test_minimize_merges_duplicate_sinks():
    a = parse(DUPLICATE_SINKS)
    m = A.minimize(a)
    assert m.reachable_orbits == 4
    assert m.orbits == 3
    assert A.language_equiv(a, m.automaton)


def test_minimize_all_rejecting():
    assert A.minimize(parse(ALL_REJECTING)).orbits == 1


def test_minimize_even_length():
    m = A.minimize(parse(EVEN_LENGTH))
    assert m.orbits == 2


@pytest.mark.parametrize("text", [ALL_ACCEPTING, DUPLICATE_SINKS, EVEN_LENGTH, FRESH_AFTER_FIRST, INCREASING])
def test_minimize_is_stable(text):
    a = parse(text)
    m = A.minimize(a)
    assert m.orbits <= m.reachable_orbits
    again = A.minimize(m.automaton)
    assert again.orbits == m.orbits
    assert A.language_equiv(m.automaton, again.automaton)


def test_minimize_rejects_nfa(nfa):
    with pytest.raises(InvalidAutomaton):
        A.minimize(nfa)


# -- graded languages


def words_set(text):
    return DefSet([Variant(("sym", "sym", "sym"), 3, parse_formula(text, EQUALITY))], EQUALITY)


def test_words_of_length_three(dfa):
    got = A.accepted_words_of_length(dfa, 3)
    assert equal(got, words_set("(or (= x1 x2) (= x1 x3))"))


def test_words_of_length_one_and_zero(dfa):
    assert is_empty(A.accepted_words_of_length(dfa, 1))
    zero = A.accepted_words_of_length(dfa, 0)
    assert zero.tags == ((),)
    assert is_empty(zero)
    assert not is_empty(A.accepted_words_of_length(parse(ALL_ACCEPTING), 0))


@pytest.mark.parametrize("name", ["repeat_nfa", "third_matches", "contains_one"])
def test_words_of_length_match_runs(name):
    a = ten_nfas()[name]
    for k in range(4):
        s = A.accepted_words_of_length(a, k)
        for w in all_words(a, ["1", "2", "3"], k):
            if len(w) == k:
                assert member(s, A.word_tuple(w)) == A.accepts(a, w)


# -- random automata


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_random_dfa_minimization_preserves_language(seed):
    a = random_automaton(random.Random(seed), deterministic=True)
    if not A.validate(a).deterministic:
        return
    m = A.minimize(a)
    assert A.language_equiv(a, m.automaton)
