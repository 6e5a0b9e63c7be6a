from fractions import Fraction

import pytest

from atomata import automata as A
from atomata.defset import Element, equal, rel_equal
from atomata.errors import ParseError, TheoryError
from atomata.monoid import from_nfa, recognizes, relation_promonoid
from atomata.textio import (
    format_automaton,
    format_promonoid,
    format_rel,
    format_set,
    format_word,
    parse_automaton,
    parse_document,
    parse_element,
    parse_promonoid,
    parse_theory,
    parse_word,
)
from atomata.theory import DENSE_ORDER, EQUALITY, Kind
from fixtures import DUPLICATE_SINKS, all_words, repeat_nfa, load_document, parse, sym_word, ten_nfas


def test_theory_headers():
    cfg = parse_theory("theory order\nconst @1/2 @3\n")
    assert cfg.kind is Kind.DENSE_ORDER
    assert cfg.declared_constants == {Fraction(1, 2), Fraction(3)}
    with pytest.raises(ParseError):
        parse_theory("theory groups")


def test_document_blocks():
    doc = load_document("edges.set")
    assert set(doc.sets) == {"E", "B", "N", "EMPTY", "LOW"}
    assert doc.theory.declared_constants == {Fraction(1)}


def test_set_round_trip():
    doc = load_document("edges.set")
    for name, s in doc.sets.items():
        again = parse_document(format_set(s, name)).sets[name]
        assert equal(s, again)


def test_tagged_set_round_trip():
    text = """
    theory equality
    const @alice
    set S {
      variant [a,b] (x y) (and (!= x y) (= y @alice))
      variant c () true
    }
    """
    s = parse_document(text).sets["S"]
    assert s.tags == (("a", "b"), "c")
    printed = format_set(s, "S")
    assert "const @alice" in printed
    assert equal(parse_document(printed).sets["S"], s)


def test_rel_round_trip():
    text = """
    theory order
    rel R {
      domain { variant v (x) true }
      codomain { variant v (x) true variant w () true }
      pair v -> v (x) (y) (< x y)
      pair v -> w (x) () (< x @0)
    }
    """
    r = parse_document(text).rels["R"]
    again = parse_document(format_rel(r, "R")).rels["R"]
    assert rel_equal(r, again)


@pytest.mark.parametrize("name", sorted(ten_nfas()))
def test_automaton_round_trip(name):
    a = ten_nfas()[name]
    b = parse_automaton(format_automaton(a))
    assert b.deterministic == a.deterministic
    atoms = ["1", "2", "3"] if a.theory.kind is Kind.EQUALITY else [Fraction(i) for i in (1, 2, 3)]
    for w in all_words(a, atoms, 3):
        assert A.accepts(a, w) == A.accepts(b, w)


def test_minimized_automaton_keeps_congruence():
    m = A.minimize(parse(DUPLICATE_SINKS))
    text = format_automaton(m.automaton)
    assert "equiv {" in text
    back = parse_automaton(text)
    assert A.orbit_count(back) == m.orbits
    assert A.language_equiv(back, parse(DUPLICATE_SINKS))


def test_promonoid_round_trip():
    p = relation_promonoid(load_document("pairs.set").sets["A"].with_theory(EQUALITY))
    text = format_promonoid(p)
    again = parse_promonoid(text)
    assert equal(again.carrier, p.carrier)
    assert equal(again.unit, p.unit)
    assert rel_equal(again.mult, p.mult)


def test_recognizer_round_trip():
    r = from_nfa(repeat_nfa())
    again = parse_promonoid(format_promonoid(r))
    for w in (sym_word(1, 2, 1), sym_word(1, 2, 3), sym_word(4, 4)):
        assert recognizes(again, w) == recognizes(r, w)


def test_elements_and_words():
    sig = parse(DUPLICATE_SINKS).alphabet
    assert parse_element("sym(@3)", EQUALITY, sig) == Element("sym", ("3",))
    assert parse_element("@3", EQUALITY, sig) == Element("sym", ("3",))
    w = parse_word("[@1, sym(@2),@1]", EQUALITY, sig)
    assert format_word(w) == "[sym(@1),sym(@2),sym(@1)]"
    assert parse_word("[]", EQUALITY, sig) == []
    assert parse_element("sym(@1/2)", DENSE_ORDER, sig) == Element("sym", (Fraction(1, 2),))


def test_undeclared_constant_in_element_is_fine():
    sig = parse(DUPLICATE_SINKS).alphabet
    assert parse_word("[@bob]", EQUALITY, sig) == [Element("sym", ("bob",))]


@pytest.mark.parametrize("text,line", [
    ("theory equality\nset S {\n  variant v (x) (= x y)\n}\n", 3),
    ("theory equality\nset S {\n  variant v (x) (< x x)\n}\n", 3),
    ("theory equality\n\nset S {\n  variant v (x) (= x @zed)\n}\n", 4),
    ("set S { }\n", 1),
    ("theory equality\nset S {\n  variant v (x x) true\n}\n", 3),
])
def test_errors_report_lines(text, line):
    with pytest.raises((ParseError, TheoryError)) as info:
        parse_document(text, source="bad.set")
    assert getattr(info.value, "line", line) == line


def test_error_names_the_file():
    with pytest.raises(ParseError) as info:
        parse_document("theory equality\nset S {\n", source="bad.set")
    assert "bad.set" in str(info.value)


def test_theory_fallback_and_conflict():
    body = "set S {\n  variant v (x) true\n}\n"
    assert parse_document(body, EQUALITY).theory.kind is Kind.EQUALITY
    with pytest.raises(TheoryError):
        parse_document("theory order\n" + body, EQUALITY)


def test_automaton_errors():
    bad = """
    theory equality
    alphabet { variant sym (l) true }
    states { s(0) }
    initial { s }
    final { t }
    delta { }
    """
    with pytest.raises(ParseError):
        parse_automaton(bad)
