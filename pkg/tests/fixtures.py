"""Shared automata, words and small helpers for the test suite."""
from __future__ import annotations

import itertools
from fractions import Fraction
from pathlib import Path

from atomata.automata import build
from atomata.defset import DefSet, Element, Variant
from atomata.formula import FALSE, TRUE, Eq, Not, Var, conj, disj
from atomata.textio import parse_automaton, parse_document, parse_register_automaton
from atomata.theory import DENSE_ORDER, EQUALITY, Kind
from oracles import random_formula

DATA = Path(__file__).parent / "data"


def load_automaton(name):
    return parse_automaton((DATA / name).read_text(), source=name)


def load_document(name):
    return parse_document((DATA / name).read_text(), source=name)


def repeat_nfa():
    return load_automaton("repeat_nfa.aut")


def first_back_dfa():
    return load_automaton("first_back_dfa.aut")


def password_ra():
    return parse_register_automaton((DATA / "password.ra").read_text(), source="password.ra")


def sym_word(*atoms):
    return [Element("sym", (str(a),)) for a in atoms]


def order_word(*atoms):
    return [Element("sym", (Fraction(a),)) for a in atoms]


def atoms_for(kind, n):
    if kind is Kind.EQUALITY:
        return [str(i) for i in range(1, n + 1)]
    return [Fraction(i) for i in range(1, n + 1)]


def all_words(a, atoms, max_len):
    """Every word over the alphabet's unary and nullary letters with atoms from ``atoms``."""
    letters = []
    for v in a.alphabet.variants:
        for tup in itertools.product(atoms, repeat=v.arity):
            letters.append(Element(v.tag, tup))
    for n in range(max_len + 1):
        for w in itertools.product(letters, repeat=n):
            yield list(w)


ALL_ACCEPTING = """
theory equality
alphabet { variant sym (l) true }
states { s(0) }
initial { s }
final { s }
delta { s -> s on (l) () () true }
deterministic true
"""

ALL_REJECTING = """
theory equality
alphabet { variant sym (l) true }
states { s(0) }
initial { s }
final { }
delta { s -> s on (l) () () true }
deterministic true
"""

# two accepting sinks that only differ by name
DUPLICATE_SINKS = """
theory equality
alphabet { variant sym (l) true }
states { s0(0) m(1) f1(0) f2(0) }
initial { s0 }
final { f1 f2 }
delta {
  s0 -> m on (l) () (y) (= y l)
  m -> f1 on (l) (r) () (= l r)
  m -> f2 on (l) (r) () (!= l r)
  f1 -> f1 on (l) () () true
  f2 -> f2 on (l) () () true
}
deterministic true
"""

ADJACENT_REPEAT = """
theory equality
alphabet { variant sym (l) true }
states { s0(0) m(1) f(0) }
initial { s0 }
final { f }
delta {
  s0 -> s0 on (l) () () true
  s0 -> m on (l) () (y) (= y l)
  m -> f on (l) (r) () (= l r)
  f -> f on (l) () () true
}
"""

LAST_IS_FIRST = """
theory equality
alphabet { variant sym (l) true }
states { s0(0) m(1) f(0) }
initial { s0 }
final { f }
delta {
  s0 -> m on (l) () (y) (= y l)
  m -> m on (l) (r) (y) (= y r)
  m -> f on (l) (r) () (= l r)
}
"""

FRESH_AFTER_FIRST = """
theory equality
alphabet { variant sym (l) true }
states { s0(0) m(1) }
initial { s0 }
final { m }
delta {
  s0 -> m on (l) () (y) (= y l)
  m -> m on (l) (r) (y) (and (!= l r) (= y r))
}
deterministic true
"""

EVEN_LENGTH = """
theory equality
alphabet { variant sym (l) true }
states { e(0) o(0) }
initial { e }
final { e }
delta {
  e -> o on (l) () () true
  o -> e on (l) () () true
}
deterministic true
"""

CONTAINS_ONE = """
theory equality
alphabet { variant sym (l) true }
states { s(0) f(0) }
initial { s }
final { f }
delta {
  s -> s on (l) () () true
  s -> f on (l) () () (= l @1)
  f -> f on (l) () () true
}
"""

THIRD_MATCHES = """
theory equality
alphabet { variant sym (l) true }
states { s0(0) one(1) two(2) f(0) }
initial { s0 }
final { f }
delta {
  s0 -> one on (l) () (y) (= y l)
  one -> two on (l) (r) (y z) (and (!= l r) (= y r) (= z l))
  two -> f on (l) (r q) () (or (= l r) (= l q))
  f -> f on (l) () () true
}
"""

INCREASING = """
theory order
alphabet { variant sym (l) true }
states { s0(0) m(1) }
initial { s0 }
final { s0 m }
delta {
  s0 -> m on (l) () (y) (= y l)
  m -> m on (l) (r) (y) (and (< r l) (= y l))
}
deterministic true
"""

TEXT_FIXTURES = {
    "all_accepting": ALL_ACCEPTING,
    "adjacent_repeat": ADJACENT_REPEAT,
    "last_is_first": LAST_IS_FIRST,
    "fresh_after_first": FRESH_AFTER_FIRST,
    "even_length": EVEN_LENGTH,
    "contains_one": CONTAINS_ONE,
    "third_matches": THIRD_MATCHES,
    "increasing": INCREASING,
}


def parse(text):
    return parse_automaton(text)


def ten_nfas():
    """Ten small automata used for the recognizer correspondence."""
    out = {"repeat_nfa": repeat_nfa(), "first_back_dfa": first_back_dfa()}
    out.update({name: parse(text) for name, text in TEXT_FIXTURES.items()})
    return out


# -- random automata


def _guard(rng, kind, names):
    if not names:
        return conj()
    return random_formula(rng, kind, free=tuple(names), depth=0, size=2)


def random_automaton(rng, kind=Kind.EQUALITY, deterministic=False, n_states=3):
    """Small automaton over one unary letter with states of arity 0 or 1.

    Deterministic ones send each state to one of two successors chosen by a
    guard, storing either the letter or the current register.
    """
    cfg = EQUALITY if kind is Kind.EQUALITY else DENSE_ORDER
    arities = {"q0": 0}
    for i in range(1, n_states):
        arities[f"q{i}"] = rng.randint(0, 1)
    tags = list(arities)
    states = DefSet.full(cfg, arities)
    initial = DefSet([Variant("q0", 0, TRUE)], cfg)
    final = []
    for t in tags:
        if rng.random() < 0.5:
            k = arities[t]
            final.append(Variant(t, k, _guard(rng, kind, ["x1"] * k) if k and rng.random() < 0.5 else TRUE))
    if not final:
        final.append(Variant("q0", 0, TRUE))
    final = DefSet(final, cfg)
    alphabet = DefSet.full(cfg, {"sym": 1})
    delta = {}

    def assign(st, nt, offset):
        # next register := letter or current register
        if arities[nt] == 0:
            return TRUE
        y = Var(f"x{offset}")
        sources = [Var("x1")] + ([Var("x2")] if arities[st] else [])
        return Eq(y, rng.choice(sources))

    for st in tags:
        cur = [f"x{i}" for i in range(1, 2 + arities[st])]
        if deterministic:
            g = _guard(rng, kind, cur)
            n1, n2 = rng.choice(tags), rng.choice(tags)
            off = 2 + arities[st]
            parts = {}
            for nt, cond in ((n1, g), (n2, Not(g))):
                f = conj(cond, assign(st, nt, off))
                parts[nt] = disj(parts[nt], f) if nt in parts else f
            for nt, f in parts.items():
                delta[("sym", st, nt)] = f
        else:
            for nt in tags:
                if rng.random() < 0.5:
                    names = cur + [f"x{len(cur) + i}" for i in range(1, arities[nt] + 1)]
                    f = _guard(rng, kind, names)
                    if f != FALSE:
                        delta[("sym", st, nt)] = f
    return build(alphabet, states, initial, final, delta, deterministic=deterministic)
