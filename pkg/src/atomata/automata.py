"""Definable automata.

An automaton has a definable alphabet, a tagged definable state space,
initial and final subsets, and a transition relation from ``alphabet x
states`` to ``states``.  Transition variants are keyed by
``((letter tag, state tag), next tag)`` with coordinates ordered letter,
state, next state.

Runs on concrete words adjoin the word's atoms as constants, so every
intermediate state set stays definable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from .defset import (
    DefRel,
    DefSet,
    Element,
    Variant,
    _names,
    count_orbits,
    difference,
    equal,
    image,
    intersect,
    is_empty as set_is_empty,
    is_single_valued,
    is_total,
    join_theories,
    member,
    product,
    quotient_orbits,
    tag_str,
    union,
    witness,
)
from .errors import CapExceeded, EvaluationError, InvalidAutomaton, ShapeError
from .fixpoint import DEFAULT_CAP, reflexive_transitive_closure
from .formula import (
    FALSE,
    TRUE,
    Const,
    Formula,
    Implies,
    Not,
    conj,
    coords,
    disj,
    eqs,
    exists_many,
    forall_many,
    iff,
    substitute,
    Var,
)
from .theory import TheoryConfig, equivalent, find_model, satisfiable, simplify, valid

Word = Sequence[Element]


@dataclass(frozen=True, eq=False)
class Automaton:
    alphabet: DefSet
    states: DefSet
    initial: DefSet
    final: DefSet
    transition: DefRel
    deterministic: bool = False
    # a minimized automaton keeps its state space and carries the congruence
    state_eq: DefRel | None = None

    @property
    def theory(self) -> TheoryConfig:
        return join_theories(self.alphabet.theory, self.states.theory, self.initial.theory,
                             self.final.theory, self.transition.theory)

    def edges(self) -> list[tuple]:
        return [(lt, st, nt) for (lt, st), nt in self.transition.pairs()]

    def delta(self, lt, st, nt, letter: Sequence, state: Sequence, nxt: Sequence) -> Formula:
        return self.transition.at((lt, st), nt, list(letter) + list(state), nxt)

    def replace(self, **kw) -> "Automaton":
        fields = dict(alphabet=self.alphabet, states=self.states, initial=self.initial, final=self.final,
                      transition=self.transition, deterministic=self.deterministic, state_eq=self.state_eq)
        fields.update(kw)
        return Automaton(**fields)


def build(alphabet: DefSet, states: DefSet, initial: DefSet, final: DefSet,
          delta: Mapping[tuple, Formula], deterministic: bool = False,
          state_eq: DefRel | None = None) -> Automaton:
    """``delta`` maps ``(letter tag, state tag, next tag)`` to a formula over
    the letter, state and next-state coordinates (in that order)."""
    domain = product(alphabet, states)
    transition = DefRel.of(domain, states, {((lt, st), nt): f for (lt, st, nt), f in delta.items()})
    return Automaton(alphabet, states, initial, final, transition, deterministic, state_eq)


def _consts(atoms: Iterable) -> list[Const]:
    return [Const(a) for a in atoms]


# -- validation ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    deterministic: bool
    total: bool
    issues: list = field(default_factory=list)
    witness: object = None

    def summary(self) -> str:
        if self.ok:
            kind = "deterministic" if self.deterministic else "non-deterministic"
            return f"valid {kind} automaton" + ("" if self.total else " (partial transition function)")
        return self.issues[0]


def has_unique_initial(a: Automaton) -> bool:
    th = a.theory
    live = [v for v in a.initial.variants if satisfiable(v.constraint, th)]
    if len(live) != 1:
        return False
    v = live[0]
    xs, ys = _names("a", v.arity), _names("b", v.arity)
    return valid(Implies(conj(a.initial.at(v.tag, xs), a.initial.at(v.tag, ys)), eqs(xs, ys)), th)


@lru_cache(maxsize=256)
def validate(a: Automaton) -> ValidationReport:
    th = a.theory
    issues: list = []
    wit = None

    def fail(msg, w=None):
        nonlocal wit
        issues.append(msg)
        if wit is None:
            wit = w

    for name, sub in (("initial", a.initial), ("final", a.final)):
        try:
            outside = difference(sub, a.states)
        except ShapeError as e:
            fail(f"{name} set does not fit the state space: {e}")
            continue
        w = witness(outside)
        if w is not None:
            fail(f"{name} set escapes the state space", w)
    if a.transition.domain.shape() != product(a.alphabet, a.states).shape():
        fail("transition domain is not alphabet x states")
    if a.transition.codomain.shape() != a.states.shape():
        fail("transition codomain is not the state space")
    if not issues:
        for v in a.transition.carrier.variants:
            (lt, st), nt = v.tag
            m, k = a.alphabet.arity(lt), a.states.arity(st)
            ls, ss = coords("x", m), coords("x", k, start=m + 1)
            ns = coords("x", a.states.arity(nt), start=m + k + 1)
            inside = conj(a.alphabet.at(lt, ls), a.states.at(st, ss), a.states.at(nt, ns))
            bad = conj(v.constraint, Not(inside))
            if satisfiable(bad, th):
                model = find_model(bad, th, names=[x.name for x in ls + ss + ns])
                fail(f"transition {tag_str(v.tag)} leaves alphabet x states x states",
                     Element(v.tag, tuple(model[x.name] for x in ls + ss + ns)))
    det = not issues and has_unique_initial(a) and is_single_valued(a.transition)
    total = not issues and is_total(a.transition)
    if a.deterministic and not issues and not det:
        fail("automaton is declared deterministic but is not")
    return ValidationReport(not issues, bool(det), bool(total), issues, wit)


def require_valid(a: Automaton) -> ValidationReport:
    report = validate(a)
    if not report.ok:
        raise InvalidAutomaton(report.issues[0], report.witness)
    return report


def require_deterministic(a: Automaton) -> None:
    if not require_valid(a).deterministic:
        raise InvalidAutomaton("automaton is not deterministic")


# -- runs --------------------------------------------------------------------------------------


def check_letter(a: Automaton, letter: Element) -> None:
    if letter.tag not in a.alphabet or a.alphabet.arity(letter.tag) != len(letter.atoms):
        raise EvaluationError(f"letter {letter} is not shaped like the alphabet")
    if not member(a.alphabet, letter):
        raise EvaluationError(f"letter {letter} is outside the alphabet")


def word_theory(a: Automaton, word: Word) -> TheoryConfig:
    return a.theory.with_constants(x for letter in word for x in letter.atoms)


def post(a: Automaton, current: DefSet, letter: Element, theory: TheoryConfig) -> DefSet:
    """States reachable from ``current`` by reading ``letter``."""
    parts: dict = {t: [] for t in a.states.tags}
    for lt, st, nt in a.edges():
        if lt != letter.tag or st not in current:
            continue
        ss = _names("s", a.states.arity(st))
        ys = coords("x", a.states.arity(nt))
        body = conj(current.at(st, ss), a.delta(lt, st, nt, _consts(letter.atoms), ss, ys))
        parts[nt].append(exists_many([s.name for s in ss], body))
    return DefSet((Variant(t, a.states.arity(t), simplify(disj(*fs), theory)) for t, fs in parts.items()),
                  theory)


def run(a: Automaton, word: Word) -> DefSet:
    """The definable set of states after reading ``word``."""
    require_valid(a)
    for letter in word:
        check_letter(a, letter)
    theory = word_theory(a, word)
    current = a.initial.embed(a.states).with_theory(theory)
    for letter in word:
        current = post(a, current, letter, theory)
    return current


def accepts(a: Automaton, word: Word) -> bool:
    current = run(a, word)
    return not set_is_empty(intersect(current, a.final.embed(a.states)))


# -- emptiness -------------------------------------------------------------------------------


def step_relation(a: Automaton) -> DefRel:
    """``s -> s'`` iff some letter of the alphabet moves ``s`` to ``s'``."""
    th = a.theory
    parts: dict = {}
    for lt, st, nt in a.edges():
        k, kn = a.states.arity(st), a.states.arity(nt)
        ls = _names("l", a.alphabet.arity(lt))
        ss, ns = coords("x", k), coords("x", kn, start=k + 1)
        body = conj(a.alphabet.at(lt, ls), a.delta(lt, st, nt, ls, ss, ns))
        parts.setdefault((st, nt), []).append(
            conj(a.states.at(st, ss), a.states.at(nt, ns), exists_many([v.name for v in ls], body)))
    spec = {key: simplify(disj(*fs), th) for key, fs in parts.items()}
    return DefRel.of(a.states, a.states, {k: f for k, f in spec.items() if f != FALSE})


def is_empty(a: Automaton, cap: int = DEFAULT_CAP) -> bool:
    """Whether no word is accepted (via the reflexive-transitive closure of one-step moves)."""
    require_valid(a)
    th = a.theory
    closure, _ = reflexive_transitive_closure(step_relation(a), cap)
    for iv in a.initial.variants:
        for fv in a.final.variants:
            xs, ys = _names("a", iv.arity), _names("b", fv.arity)
            f = conj(a.initial.at(iv.tag, xs), a.final.at(fv.tag, ys), closure.at(iv.tag, fv.tag, xs, ys))
            if satisfiable(f, th):
                return False
    return True


def reachable_states(a: Automaton, cap: int = DEFAULT_CAP) -> tuple[list[DefSet], DefSet]:
    """Exact-length layers ``L0 = I, L(i+1) = step(Li)`` until nothing new appears, and their union."""
    step = step_relation(a)
    layer = a.initial.embed(a.states)
    layers = [layer]
    seen = layer
    while True:
        if len(layers) > cap:
            raise CapExceeded("forward reachability", cap)
        layer = image(step, layer)
        grown = union(seen, layer)
        if equal(grown, seen):
            return layers, seen
        layers.append(layer)
        seen = grown


def find_word(a: Automaton, cap: int = DEFAULT_CAP) -> list[Element] | None:
    """A shortest accepted word, or ``None`` when the language is empty."""
    require_valid(a)
    th = a.theory
    final = a.final.embed(a.states)
    layers, _ = reachable_states(a, cap)
    hit = next((i for i, layer in enumerate(layers) if not set_is_empty(intersect(layer, final))), None)
    if hit is None:
        return None
    target = witness(intersect(layers[hit], final))
    letters: list[Element] = []
    for j in range(hit, 0, -1):
        prev = layers[j - 1]
        found = None
        for lt, st, nt in a.edges():
            if nt != target.tag:
                continue
            ls = _names("l", a.alphabet.arity(lt))
            ps = _names("p", a.states.arity(st))
            f = conj(a.alphabet.at(lt, ls), prev.at(st, ps),
                     a.delta(lt, st, nt, ls, ps, _consts(target.atoms)))
            model = find_model(f, th.with_constants(target.atoms), names=[v.name for v in ls + ps])
            if model is not None:
                found = (Element(lt, tuple(model[v.name] for v in ls)),
                         Element(st, tuple(model[v.name] for v in ps)))
                break
        if found is None:  # pragma: no cover - layers guarantee a predecessor
            raise AssertionError("no predecessor in the previous layer")
        letters.append(found[0])
        target = found[1]
    return letters[::-1]


# -- products and equivalence ----------------------------------------------------------------------


class AutOp(enum.Enum):
    PRODUCT_AND = "and"
    PRODUCT_XOR = "xor"


def _fresh_tag(taken: Iterable, base: str = "sink") -> str:
    taken = set(taken)
    tag, i = base, 1
    while tag in taken:
        tag, i = f"{base}_{i}", i + 1
    return tag


def totalize(a: Automaton) -> Automaton:
    """Add a rejecting sink when some (letter, state) pair has no successor."""
    if is_total(a.transition):
        return a
    th = a.theory
    sink = _fresh_tag(a.states.tags)
    states = DefSet(list(a.states.variants) + [Variant(sink, 0, TRUE)], a.states.theory)
    delta = {(lt, st, nt): a.transition.formula((lt, st), nt) for lt, st, nt in a.edges()}
    for lv in a.alphabet.variants:
        m = lv.arity
        ls = coords("x", m)
        for sv in a.states.variants:
            ss = coords("x", sv.arity, start=m + 1)
            moves = []
            for lt, st, nt in a.edges():
                if lt == lv.tag and st == sv.tag:
                    ys = _names("y", a.states.arity(nt))
                    moves.append(exists_many([y.name for y in ys], a.delta(lt, st, nt, ls, ss, ys)))
            stuck = simplify(conj(lv.constraint, a.states.at(sv.tag, ss), Not(disj(*moves))), th)
            if stuck != FALSE:
                delta[(lv.tag, sv.tag, sink)] = stuck
        delta[(lv.tag, sink, sink)] = lv.constraint
    return build(a.alphabet, states, a.initial, a.final, delta, a.deterministic)


def _same_alphabet(a: Automaton, b: Automaton) -> None:
    if a.alphabet.shape() != b.alphabet.shape() or not equal(a.alphabet, b.alphabet):
        raise ShapeError("automata have different alphabets")


def combine_automata(op: AutOp | str, a: Automaton, b: Automaton) -> Automaton:
    op = AutOp(op) if isinstance(op, str) else op
    _same_alphabet(a, b)
    require_deterministic(a)
    require_deterministic(b)
    a, b = totalize(a), totalize(b)
    th = join_theories(a.theory, b.theory)
    states = product(a.states, b.states)
    delta = {}
    for lt, sa, na in a.edges():
        for lt2, sb, nb in b.edges():
            if lt2 != lt:
                continue
            m = a.alphabet.arity(lt)
            ka, kb = a.states.arity(sa), b.states.arity(sb)
            ja, jb = a.states.arity(na), b.states.arity(nb)
            ls = coords("x", m)
            xa = coords("x", ka, start=m + 1)
            xb = coords("x", kb, start=m + ka + 1)
            ya = coords("x", ja, start=m + ka + kb + 1)
            yb = coords("x", jb, start=m + ka + kb + ja + 1)
            f = simplify(conj(a.delta(lt, sa, na, ls, xa, ya), b.delta(lt, sb, nb, ls, xb, yb)), th)
            if f != FALSE:
                delta[(lt, (sa, sb), (na, nb))] = f
    if op is AutOp.PRODUCT_AND:
        final = product(a.final, b.final)
    else:
        out = []
        for va in a.states.variants:
            for vb in b.states.variants:
                xa, xb = coords("x", va.arity), coords("x", vb.arity, start=va.arity + 1)
                fa, fb = a.final.at(va.tag, xa), b.final.at(vb.tag, xb)
                inside = conj(va.constraint, b.states.at(vb.tag, xb))
                g = simplify(conj(inside, Not(iff(fa, fb))), th)
                out.append(Variant((va.tag, vb.tag), va.arity + vb.arity, g))
        final = DefSet(out, th)
    return build(a.alphabet, states, product(a.initial, b.initial), final, delta, deterministic=True)


def language_equiv(a: Automaton, b: Automaton, cap: int = DEFAULT_CAP) -> bool:
    return is_empty(combine_automata(AutOp.PRODUCT_XOR, a, b), cap)


def distinguishing_word(a: Automaton, b: Automaton, cap: int = DEFAULT_CAP) -> list[Element] | None:
    return find_word(combine_automata(AutOp.PRODUCT_XOR, a, b), cap)


# -- minimization ------------------------------------------------------------------------------------------


@dataclass
class MinimizeResult:
    automaton: Automaton
    orbits: int
    reachable_orbits: int
    rounds: int


def restrict(a: Automaton, reach: DefSet) -> Automaton:
    th = a.theory
    states = DefSet((Variant(v.tag, v.arity, simplify(conj(v.constraint, reach.constraint(v.tag)), th))
                     for v in a.states.variants if satisfiable(conj(v.constraint, reach.constraint(v.tag)), th)),
                    th)
    keep = set(states.tags)
    delta = {}
    for lt, st, nt in a.edges():
        if st not in keep or nt not in keep:
            continue
        m, k = a.alphabet.arity(lt), a.states.arity(st)
        ss = coords("x", k, start=m + 1)
        f = simplify(conj(a.transition.formula((lt, st), nt), states.at(st, ss)), th)
        if f != FALSE:
            delta[(lt, st, nt)] = f
    initial = intersect(a.initial.embed(a.states), reach).embed(a.states)
    final = intersect(a.final.embed(a.states), reach).embed(a.states)
    initial = DefSet((v for v in initial.variants if v.tag in keep), th)
    final = DefSet((v for v in final.variants if v.tag in keep), th)
    return build(a.alphabet, states, initial, final, delta, a.deterministic)


def refine(a: Automaton, eq: DefRel) -> DefRel:
    """One round: keep pairs whose successors on every letter stay related."""
    th = a.theory
    related = set(eq.pairs())
    spec = {}
    for v1 in a.states.variants:
        for v2 in a.states.variants:
            k1, k2 = v1.arity, v2.arity
            xs, ys = coords("x", k1), coords("x", k2, start=k1 + 1)
            clauses = [eq.at(v1.tag, v2.tag, xs, ys)]
            for lv in a.alphabet.variants:
                ls = _names("l", lv.arity)
                for lt, s1, n1 in a.edges():
                    if lt != lv.tag or s1 != v1.tag:
                        continue
                    for lt2, s2, n2 in a.edges():
                        if lt2 != lv.tag or s2 != v2.tag:
                            continue
                        us = _names("u", a.states.arity(n1))
                        ws = _names("w", a.states.arity(n2))
                        moves = conj(a.alphabet.at(lv.tag, ls),
                                     a.delta(lt, s1, n1, ls, xs, us), a.delta(lt, s2, n2, ls, ys, ws))
                        then = eq.at(n1, n2, us, ws) if (n1, n2) in related else FALSE
                        names = [v.name for v in ls + us + ws]
                        clauses.append(forall_many(names, Implies(moves, then)))
            f = simplify(conj(*clauses), th)
            if f != FALSE:
                spec[(v1.tag, v2.tag)] = f
    return DefRel.of(a.states, a.states, spec)


def same_finality(a: Automaton) -> DefRel:
    th = a.theory
    spec = {}
    for v1 in a.states.variants:
        for v2 in a.states.variants:
            xs = coords("x", v1.arity)
            ys = coords("x", v2.arity, start=v1.arity + 1)
            f = conj(v1.constraint, a.states.at(v2.tag, ys), iff(a.final.at(v1.tag, xs), a.final.at(v2.tag, ys)))
            f = simplify(f, th)
            if f != FALSE:
                spec[(v1.tag, v2.tag)] = f
    return DefRel.of(a.states, a.states, spec)


def _rel_equivalent(r: DefRel, q: DefRel, theory: TheoryConfig) -> bool:
    keys = set(r.pairs()) | set(q.pairs())
    return all(equivalent(r.carrier.constraint(k), q.carrier.constraint(k), theory) for k in keys)


def minimize(a: Automaton, cap: int = DEFAULT_CAP) -> MinimizeResult:
    """Reachable part of the totalized automaton with its coarsest congruence."""
    require_deterministic(a)
    t = totalize(a)
    _, reach = reachable_states(t, cap)
    r = restrict(t, reach)
    th = r.theory
    eq = same_finality(r)
    rounds = 0
    while True:
        nxt = refine(r, eq)
        rounds += 1
        if _rel_equivalent(nxt, eq, th):
            break
        if rounds >= cap:
            raise CapExceeded("Myhill-Nerode refinement", cap)
        eq = nxt
    out = r.replace(state_eq=eq, deterministic=True)
    return MinimizeResult(out, quotient_orbits(r.states, eq, True), count_orbits(r.states, True), rounds)


def orbit_count(a: Automaton) -> int:
    """Orbits of the state space, or of its quotient when a congruence is attached."""
    if a.state_eq is not None:
        return quotient_orbits(a.states, a.state_eq, True)
    return count_orbits(a.states, True)


# -- graded languages ---------------------------------------------------------------------------------------


def accepted_words_of_length(a: Automaton, k: int) -> DefSet:
    """Accepted words of length ``k`` as a set over ``alphabet ** k``.

    Variant tags are tuples of letter tags; the coordinates are the letters'
    coordinates concatenated.
    """
    require_valid(a)
    if k < 0:
        raise ValueError("length must be non-negative")
    th = a.theory
    ltags = a.alphabet.tags
    out = []
    for word_tags in iproduct(ltags, repeat=k):
        offsets, off = [], 0
        for lt in word_tags:
            offsets.append(off)
            off += a.alphabet.arity(lt)
        # current: state tag -> formula over letter coords w* and state coords q*
        current = {}
        for v in a.states.variants:
            qs = _names("q", v.arity)
            current[v.tag] = a.initial.at(v.tag, qs) if v.tag in a.initial else FALSE
        for j, lt in enumerate(word_tags):
            ls = coords("w", a.alphabet.arity(lt), start=offsets[j] + 1)
            nxt: dict = {t: [] for t in a.states.tags}
            for elt, st, nt in a.edges():
                if elt != lt or current[st] == FALSE:
                    continue
                ps = _names("p", a.states.arity(st))
                qs = _names("q", a.states.arity(nt))
                prev = _rename(current[st], "q", "p", a.states.arity(st))
                body = conj(prev, a.alphabet.at(lt, ls), a.delta(lt, st, nt, ls, ps, qs))
                nxt[nt].append(exists_many([p.name for p in ps], body))
            current = {t: simplify(disj(*fs), th) for t, fs in nxt.items()}
        accepted = []
        for v in a.states.variants:
            if v.tag not in a.final or current[v.tag] == FALSE:
                continue
            qs = _names("q", v.arity)
            accepted.append(exists_many([q.name for q in qs], conj(current[v.tag], a.final.at(v.tag, qs))))
        f = simplify(disj(*accepted), th)
        f = simplify(substitute(f, {f"w{i}": Var(f"x{i}") for i in range(1, off + 1)}), th)
        out.append(Variant(tuple(word_tags), off, f))
    return DefSet(out, th)


def _rename(f: Formula, old: str, new: str, n: int) -> Formula:
    return substitute(f, {f"{old}{i}": Var(f"{new}{i}") for i in range(1, n + 1)})


def word_tuple(word: Word) -> Element:
    """A word as an element of ``alphabet ** len(word)``."""
    return Element(tuple(l.tag for l in word), tuple(x for l in word for x in l.atoms))
