"""Promonoids: monoid objects among definable relations.

Multiplication is a relation ``mu ⊆ (M x M) x M`` with variants keyed
``((a, b), c)``; the unit is a subset of ``M``.  A recognizer adds an
alphabet, a letter relation ``h ⊆ Σ x M`` and an accepting subset.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .automata import Automaton, build, require_valid
from .defset import (
    DefRel,
    DefSet,
    Element,
    Variant,
    _names,
    difference,
    intersect,
    is_empty,
    join_theories,
    member,
    product,
    tag_str,
    witness,
)
from .errors import EvaluationError, InvalidAutomaton, ShapeError
from .formula import FALSE, Const, Formula, Not, conj, coords, disj, eqs, exists_many, iff
from .theory import TheoryConfig, find_model, simplify, valid


@dataclass(frozen=True, eq=False)
class Promonoid:
    carrier: DefSet
    mult: DefRel
    unit: DefSet

    @property
    def theory(self) -> TheoryConfig:
        return join_theories(self.carrier.theory, self.mult.theory, self.unit.theory)

    def mu(self, a, b, c, xs, ys, zs) -> Formula:
        return self.mult.at((a, b), c, list(xs) + list(ys), zs)


@dataclass(frozen=True, eq=False)
class Recognizer:
    promonoid: Promonoid
    alphabet: DefSet
    letters: DefRel
    accepting: DefSet

    @property
    def theory(self) -> TheoryConfig:
        return join_theories(self.promonoid.theory, self.alphabet.theory, self.letters.theory,
                             self.accepting.theory)


# -- laws ----------------------------------------------------------------------------------------


@dataclass
class LawResult:
    law: str
    holds: bool
    witness: object = None


@dataclass
class LawReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.results)

    def get(self, law: str) -> LawResult:
        return next(r for r in self.results if r.law == law)


def _relations_agree(left: dict, right: dict, shapes: dict, theory: TheoryConfig, law: str) -> LawResult:
    """Compare two relations given as ``key -> formula`` on shared coordinates."""
    for key in sorted(set(left) | set(right), key=repr):
        f, g = disj(*left.get(key, [])), disj(*right.get(key, []))
        bad = Not(iff(f, g))
        if not valid(Not(bad), theory):
            names = shapes[key]
            model = find_model(bad, theory, names=[v.name for v in names])
            return LawResult(law, False, Element(key, tuple(model[v.name] for v in names)))
    return LawResult(law, True)


def check_laws(p: Promonoid) -> LawReport:
    """Associativity and both one-sided unit laws, each as a relation equality.

    ``right unit`` asks ``e * x = x`` and ``left unit`` asks ``x * e = x``
    for units ``e``.
    """
    th = p.theory
    m = p.carrier
    report = LawReport()
    shape_ok = True
    if p.mult.domain.shape() != product(m, m).shape() or p.mult.codomain.shape() != m.shape():
        report.results.append(LawResult("shape", False))
        shape_ok = False
    w = witness(difference(p.unit, m)) if set(p.unit.tags) <= set(m.tags) else None
    if w is not None or not set(p.unit.tags) <= set(m.tags):
        report.results.append(LawResult("unit inside carrier", False, w))
        shape_ok = False
    if not shape_ok:
        return report
    pairs = list(p.mult.pairs())

    # associativity: (x*y)*z versus x*(y*z), related to w
    left: dict = {}
    right: dict = {}
    shapes: dict = {}

    def slots(tx, ty, tz, tw):
        xs = _names("a", m.arity(tx))
        ys = _names("b", m.arity(ty))
        zs = _names("c", m.arity(tz))
        ws = _names("d", m.arity(tw))
        shapes[(tx, ty, tz, tw)] = xs + ys + zs + ws
        return xs, ys, zs, ws, conj(m.at(tx, xs), m.at(ty, ys), m.at(tz, zs))

    for (tx, ty), tu in pairs:
        for (tu2, tz), tw in pairs:
            if tu2 != tu:
                continue
            xs, ys, zs, ws, inside = slots(tx, ty, tz, tw)
            us = _names("u", m.arity(tu))
            body = conj(inside, m.at(tu, us), p.mu(tx, ty, tu, xs, ys, us), p.mu(tu, tz, tw, us, zs, ws))
            left.setdefault((tx, ty, tz, tw), []).append(exists_many([u.name for u in us], body))
    for (ty, tz), tv in pairs:
        for (tx, tv2), tw in pairs:
            if tv2 != tv:
                continue
            xs, ys, zs, ws, inside = slots(tx, ty, tz, tw)
            vs = _names("v", m.arity(tv))
            body = conj(inside, m.at(tv, vs), p.mu(ty, tz, tv, ys, zs, vs), p.mu(tx, tv, tw, xs, vs, ws))
            right.setdefault((tx, ty, tz, tw), []).append(exists_many([v.name for v in vs], body))
    report.results.append(_relations_agree(left, right, shapes, th, "associativity"))

    for law, unit_first in (("left unit", False), ("right unit", True)):
        got: dict = {}
        ident: dict = {}
        shapes = {}
        for tx in m.tags:
            xs, ws = _names("a", m.arity(tx)), _names("d", m.arity(tx))
            shapes[(tx, tx)] = xs + ws
            ident[(tx, tx)] = [conj(m.at(tx, xs), eqs(xs, ws))]
        for (ta, tb), tw in pairs:
            te, tx = (ta, tb) if unit_first else (tb, ta)
            if te not in p.unit:
                continue
            xs, ws = _names("a", m.arity(tx)), _names("d", m.arity(tw))
            es = _names("e", m.arity(te))
            shapes[(tx, tw)] = xs + ws
            prod = p.mu(te, tx, tw, es, xs, ws) if unit_first else p.mu(tx, te, tw, xs, es, ws)
            body = conj(m.at(tx, xs), p.unit.at(te, es), m.at(te, es), prod)
            got.setdefault((tx, tw), []).append(exists_many([e.name for e in es], body))
        report.results.append(_relations_agree(got, ident, shapes, th, law))
    return report


# -- constructions ---------------------------------------------------------------------------------------


def relation_promonoid(s: DefSet) -> Promonoid:
    """Binary relations on ``s`` under relational composition, unit the diagonal."""
    th = s.theory
    carrier = product(s, s)
    spec = {}
    for a in s.variants:
        for b in s.variants:
            for d in s.variants:
                ka, kb, kd = a.arity, b.arity, d.arity
                xs = coords("x", ka)
                ys = coords("x", kb, start=ka + 1)
                ys2 = coords("x", kb, start=ka + kb + 1)
                zs = coords("x", kd, start=ka + 2 * kb + 1)
                out = coords("x", ka + kd, start=ka + 2 * kb + kd + 1)
                f = conj(s.at(a.tag, xs), s.at(b.tag, ys), s.at(d.tag, zs), eqs(ys, ys2),
                         eqs(out, list(xs) + list(zs)))
                spec[(((a.tag, b.tag), (b.tag, d.tag)), (a.tag, d.tag))] = simplify(f, th)
    mult = DefRel.of(product(carrier, carrier), carrier, spec)
    unit = []
    for a in s.variants:
        xs, ys = coords("x", a.arity), coords("x", a.arity, start=a.arity + 1)
        unit.append(Variant((a.tag, a.tag), 2 * a.arity, simplify(conj(a.constraint, eqs(xs, ys)), th)))
    return Promonoid(carrier, mult, DefSet(unit, th))


def from_nfa(a: Automaton) -> Recognizer:
    """Letters act as their one-step relations inside the relation promonoid of the states."""
    require_valid(a)
    th = a.theory
    p = relation_promonoid(a.states)
    spec: dict = {}
    for lt, st, nt in a.edges():
        m, k, kn = a.alphabet.arity(lt), a.states.arity(st), a.states.arity(nt)
        ls, ss, ns = coords("x", m), coords("x", k, start=m + 1), coords("x", kn, start=m + k + 1)
        f = conj(a.alphabet.at(lt, ls), a.states.at(st, ss), a.states.at(nt, ns), a.delta(lt, st, nt, ls, ss, ns))
        spec[(lt, (st, nt))] = simplify(f, th)
    letters = DefRel.of(a.alphabet, p.carrier, spec)
    acc = []
    for iv in a.initial.variants:
        for fv in a.final.variants:
            xs, ys = coords("x", iv.arity), coords("x", fv.arity, start=iv.arity + 1)
            f = conj(iv.constraint, a.final.at(fv.tag, ys), a.states.at(iv.tag, xs), a.states.at(fv.tag, ys))
            acc.append(Variant((iv.tag, fv.tag), iv.arity + fv.arity, simplify(f, th)))
    return Recognizer(p, a.alphabet, letters, DefSet(acc, th))


def mult_image(p: Promonoid, xs: DefSet, ys: DefSet, theory: TheoryConfig | None = None) -> DefSet:
    """``{z : mu(x, y, z), x ∈ xs, y ∈ ys}``."""
    th = theory or join_theories(p.theory, xs.theory, ys.theory)
    m = p.carrier
    parts: dict = {t: [] for t in m.tags}
    for (ta, tb), tc in p.mult.pairs():
        if ta not in xs or tb not in ys:
            continue
        us, vs = _names("u", m.arity(ta)), _names("v", m.arity(tb))
        zs = coords("x", m.arity(tc))
        body = conj(xs.at(ta, us), ys.at(tb, vs), p.mu(ta, tb, tc, us, vs, zs))
        parts[tc].append(exists_many([v.name for v in us + vs], body))
    return DefSet((Variant(t, m.arity(t), simplify(disj(*fs), th)) for t, fs in parts.items()), th)


def letter_image(r: Recognizer, letter: Element, theory: TheoryConfig) -> DefSet:
    m = r.promonoid.carrier
    consts = [Const(x) for x in letter.atoms]
    parts: dict = {t: [] for t in m.tags}
    for lt, mt in r.letters.pairs():
        if lt == letter.tag:
            parts[mt].append(r.letters.at(lt, mt, consts, coords("x", m.arity(mt))))
    return DefSet((Variant(t, m.arity(t), simplify(disj(*fs), theory)) for t, fs in parts.items()), theory)


def _check_recognizer_letter(r: Recognizer, letter: Element) -> None:
    if letter.tag not in r.alphabet or r.alphabet.arity(letter.tag) != len(letter.atoms):
        raise EvaluationError(f"letter {letter} is not shaped like the alphabet")
    if not member(r.alphabet, letter):
        raise EvaluationError(f"letter {letter} is outside the alphabet")


def word_image(r: Recognizer, word) -> DefSet:
    """The carrier subset a word is sent to: unit, then one multiplication per letter."""
    for letter in word:
        _check_recognizer_letter(r, letter)
    th = r.theory.with_constants(x for letter in word for x in letter.atoms)
    p = r.promonoid
    current = p.unit.embed(p.carrier).with_theory(th)
    for letter in word:
        current = mult_image(p, current, letter_image(r, letter, th), th)
    return current


def recognizes(r: Recognizer, word) -> bool:
    current = word_image(r, word)
    return not is_empty(intersect(current, r.accepting.embed(r.promonoid.carrier)))


def to_nfa(r: Recognizer) -> Automaton:
    """States are the carrier; reading a letter multiplies on the right by its image."""
    report = check_laws(r.promonoid)
    if not report.ok:
        failed = next(x for x in report.results if not x.holds)
        raise InvalidAutomaton(f"promonoid law fails: {failed.law}", failed.witness)
    p = r.promonoid
    m = p.carrier
    th = r.theory
    delta: dict = {}
    for lt, nt in r.letters.pairs():
        for (ta, tb), tc in p.mult.pairs():
            if tb != nt:
                continue
            k = r.alphabet.arity(lt)
            ls = coords("x", k)
            xs = coords("x", m.arity(ta), start=k + 1)
            zs = coords("x", m.arity(tc), start=k + m.arity(ta) + 1)
            ns = _names("n", m.arity(nt))
            body = conj(r.letters.at(lt, nt, ls, ns), p.mu(ta, nt, tc, xs, ns, zs))
            f = exists_many([v.name for v in ns], body)
            key = (lt, ta, tc)
            delta.setdefault(key, []).append(f)
    delta = {key: simplify(disj(*fs), th) for key, fs in delta.items()}
    delta = {key: f for key, f in delta.items() if f != FALSE}
    return build(r.alphabet, m, p.unit, r.accepting, delta)


def describe_laws(report: LawReport) -> str:
    lines = []
    for res in report.results:
        line = f"{res.law}: {'holds' if res.holds else 'fails'}"
        if res.witness is not None:
            line += f" (witness {res.witness})"
        lines.append(line)
    return "\n".join(lines)


def check_recognizer(r: Recognizer) -> None:
    p = r.promonoid
    if r.letters.codomain.shape() != p.carrier.shape():
        raise ShapeError("letter relation must land in the carrier")
    if not set(r.accepting.tags) <= set(p.carrier.tags):
        raise ShapeError(f"accepting set uses tags outside the carrier: {[tag_str(t) for t in r.accepting.tags]}")
