"""Text formats for sets, relations, automata and promonoids.

Every file starts with a theory header (``theory equality`` or ``theory
order``, then optional ``const @a @b`` lines) and continues with blocks::

    set E {
      variant v (x y) (!= x y)
    }

    rel R {
      domain { variant v (x) true }
      codomain { variant v (x) true }
      pair v -> v (x) (y) (!= x y)
    }

Automata::

    alphabet { variant sym (l) true }
    states { s0(0) n(1) sf(0) }
    initial { s0 }
    final { sf }
    delta {
      s0 -> n on sym (l) () (y) (= y l)
    }
    deterministic true

Register automata (``in1 ..``, ``r1 ..`` and ``r1' ..`` are reserved)::

    registers 1
    alphabet { variant setpw (a) true }
    control SET START
    initial SET true
    final START true
    edge SET -> START on setpw (= r1' in1)

Promonoids and recognizers::

    carrier { variant m (a) true }
    mult { m m -> m (a) (b) (c) (= c a) }
    unit { m }
    alphabet { ... }
    letters { sym -> m (l) (a) (= a l) }
    accepting { m }

Printers emit the same syntax with coordinates named ``x1 .. xk``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .automata import Automaton, build
from .defset import DefRel, DefSet, Element, Variant, product, tag_str
from .errors import ParseError, TheoryError
from .fixpoint import LfpSpec
from .formula import (
    FALSE,
    TRUE,
    Const,
    Formula,
    FormulaReader,
    Token,
    Var,
    constants,
    disj,
    free_vars,
    substitute,
    to_text,
)
from .monoid import Promonoid, Recognizer
from .register import BOTTOM, Edge, RegisterAutomaton
from .theory import Kind, TheoryConfig

_TOKEN = re.compile(
    r"(;[^\n]*)|(->)|([(){}\[\],])|(!=|=>|=|<)|(@-?[A-Za-z0-9_]+(?:/[0-9]+)?)|([A-Za-z_][A-Za-z0-9_']*)|([0-9]+)"
)
_PUNCT_KIND = {"(": "(", ")": ")", "{": "{", "}": "}", "[": "[", "]": "]", ",": ","}


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        if m.group(2):
            tokens.append(Token("->", "->", i))
        elif m.group(3):
            tokens.append(Token(_PUNCT_KIND[m.group(3)], m.group(3), i))
        elif m.group(4):
            tokens.append(Token("op", m.group(4), i))
        elif m.group(5):
            tokens.append(Token("const", m.group(5), i))
        elif m.group(6):
            tokens.append(Token("ident", m.group(6), i))
        elif m.group(7):
            tokens.append(Token("num", m.group(7), i))
        i = m.end()
    return tokens


class Scanner(FormulaReader):
    """Structured reader; formulas are delegated to the inherited reader."""

    def __init__(self, text: str, cfg: TheoryConfig | None = None, source: str | None = None):
        self.text = text
        self.source = source
        super().__init__(tokenize(text), self._const)
        self.use(cfg)

    def use(self, cfg: TheoryConfig | None) -> None:
        self.cfg = cfg
        self.allow_lt = cfg is None or cfg.ordered

    def _const(self, body: str, pos: int):
        if self.cfg is None:
            raise ParseError("constant used before the theory header", pos)
        value = self.cfg.parse_atom(body, pos)
        self.cfg.check_constant(value, pos)
        return value

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        pos = tok.pos if tok is not None else len(self.text)
        return ParseError(message, pos)

    def is_word(self, *words: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == "ident" and t.text in words

    def is_kind(self, kind: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind

    def word(self, *words: str) -> str:
        t = self.next()
        if t.kind != "ident" or (words and t.text not in words):
            want = " or ".join(repr(w) for w in words) if words else "a name"
            raise self.error(f"expected {want}, found {t.text!r}", t)
        return t.text

    def number(self) -> int:
        t = self.next()
        if t.kind != "num":
            raise self.error(f"expected a number, found {t.text!r}", t)
        return int(t.text)

    def header(self, fallback: TheoryConfig | None = None) -> TheoryConfig:
        if not self.is_word("theory"):
            if fallback is None:
                t = self.peek()
                raise self.error("missing 'theory equality' or 'theory order' header", t)
            self.use(fallback)
            return fallback
        self.next()
        t = self.next()
        try:
            kind = Kind(t.text)
        except ValueError:
            raise self.error(f"unknown theory {t.text!r}", t) from None
        base = TheoryConfig(kind)
        consts = []
        while self.is_word("const"):
            self.next()
            while self.is_kind("const"):
                c = self.next()
                consts.append(base.parse_atom(c.text[1:], c.pos))
        cfg = TheoryConfig(kind, frozenset(consts))
        if fallback is not None and fallback.kind != kind:
            raise TheoryError(f"file declares theory {kind.value} but {fallback.kind.value} was requested")
        if fallback is not None:
            cfg = cfg.with_constants(fallback.declared_constants)
        self.use(cfg)
        return cfg

    def tag(self):
        t = self.next()
        if t.kind in ("ident", "num"):
            return t.text
        if t.kind == "[":
            parts = []
            if self.is_kind("]"):
                self.next()
                return ()
            while True:
                parts.append(self.tag())
                if self.is_kind(","):
                    self.next()
                    continue
                self.expect("]")
                return tuple(parts)
        raise self.error(f"expected a tag, found {t.text!r}", t)

    def names(self) -> list[str]:
        start = self.peek()
        self.expect("(")
        out = []
        while self.is_kind("ident"):
            out.append(self.next().text)
        self.expect(")")
        if len(set(out)) != len(out):
            raise self.error("repeated coordinate name", start)
        return out

    def open_formula(self, relations: dict | None = None) -> Formula:
        saved = self.relations
        self.relations = dict(relations or {})
        try:
            return self.formula({})
        finally:
            self.relations = saved

    def coord_formula(self, names: list[str], offset: int = 0, relations=None) -> Formula:
        """A formula over ``names``, renamed to consecutive coordinates."""
        start = self.peek()
        f = self.open_formula(relations)
        extra = set(free_vars(f)) - set(names)
        if extra:
            raise self.error(f"formula mentions undeclared variable(s) {', '.join(sorted(extra))}", start)
        return substitute(f, {n: Var(f"x{offset + i}") for i, n in enumerate(names, 1)})

    # -- blocks
    def set_body(self) -> DefSet:
        self.expect("{")
        variants = []
        while not self.is_kind("}"):
            self.word("variant")
            tag = self.tag()
            names = self.names()
            variants.append(Variant(tag, len(names), self.coord_formula(names)))
        self.expect("}")
        return DefSet(variants, self.cfg)

    def subset_body(self, ambient: DefSet) -> DefSet:
        """``{ tag [(names)] [where formula] ... }`` over an ambient set."""
        self.expect("{")
        found: dict = {}
        while not self.is_kind("}"):
            tok = self.peek()
            tag = self.tag()
            if tag not in ambient:
                raise self.error(f"unknown tag {tag_str(tag)}", tok)
            k = ambient.arity(tag)
            names = self.names() if self.is_kind("(") else [f"x{i}" for i in range(1, k + 1)]
            if len(names) != k:
                raise self.error(f"tag {tag_str(tag)} has arity {k}", tok)
            f = TRUE
            if self.is_word("where"):
                self.next()
                f = self.coord_formula(names)
            found[tag] = disj(found[tag], f) if tag in found else f
        self.expect("}")
        return DefSet((Variant(t, ambient.arity(t), f) for t, f in found.items()), self.cfg)

    def states_body(self) -> DefSet:
        self.expect("{")
        variants = []
        while not self.is_kind("}"):
            tag = self.tag()
            self.expect("(")
            k = self.number()
            self.expect(")")
            f = TRUE
            if self.is_word("where"):
                self.next()
                f = self.coord_formula([f"x{i}" for i in range(1, k + 1)])
            variants.append(Variant(tag, k, f))
        self.expect("}")
        return DefSet(variants, self.cfg)

    def rel_body(self) -> DefRel:
        self.expect("{")
        self.word("domain")
        domain = self.set_body()
        self.word("codomain")
        codomain = self.set_body()
        spec: dict = {}
        while not self.is_kind("}"):
            tok = self.peek()
            self.word("pair")
            dt = self.tag()
            self.expect("->")
            ct = self.tag()
            if dt not in domain or ct not in codomain:
                raise self.error("pair tags must come from the domain and codomain", tok)
            xs, ys = self.names(), self.names()
            if len(xs) != domain.arity(dt) or len(ys) != codomain.arity(ct):
                raise self.error("pair coordinates do not match the arities", tok)
            f = self.coord_formula(xs + ys)
            spec[(dt, ct)] = disj(spec[(dt, ct)], f) if (dt, ct) in spec else f
        self.expect("}")
        return DefRel.of(domain, codomain, spec)


def _wrap(fn):
    """Attach line numbers and the source name to parse errors."""

    def inner(text: str, *args, source: str | None = None, **kw):
        try:
            return fn(text, *args, source=source, **kw)
        except ParseError as e:
            line = e.line
            if line is None and e.pos is not None:
                line = text.count("\n", 0, e.pos) + 1
            raise ParseError(e.message, None, line, source or e.source) from None

    inner.__name__ = fn.__name__
    inner.__doc__ = fn.__doc__
    return inner


# -- documents ---------------------------------------------------------------------------------


@dataclass
class Document:
    theory: TheoryConfig
    sets: dict = field(default_factory=dict)
    rels: dict = field(default_factory=dict)


@_wrap
def parse_document(text: str, theory: TheoryConfig | None = None, source: str | None = None) -> Document:
    """A file of ``set`` and ``rel`` blocks."""
    sc = Scanner(text, source=source)
    doc = Document(sc.header(theory))
    while not sc.at_end():
        kind = sc.word("set", "rel")
        name = sc.word()
        if name in doc.sets or name in doc.rels:
            raise sc.error(f"duplicate block name {name}")
        if kind == "set":
            doc.sets[name] = sc.set_body()
        else:
            doc.rels[name] = sc.rel_body()
    return doc


@_wrap
def parse_theory(text: str, source: str | None = None) -> TheoryConfig:
    sc = Scanner(text, source=source)
    cfg = sc.header()
    if not sc.at_end():
        raise sc.error("unexpected content after the theory header", sc.peek())
    return cfg


@_wrap
def parse_formula_text(text: str, cfg: TheoryConfig, relations: dict | None = None,
                       source: str | None = None) -> Formula:
    sc = Scanner(text, cfg, source)
    f = sc.open_formula(relations)
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.peek().text!r}", sc.peek())
    return f


@_wrap
def parse_lfp(text: str, cfg: TheoryConfig, params: dict | None = None, source: str | None = None) -> LfpSpec:
    """``(mu X (y1 .. yn) body)``; ``params`` names further relations with their arity."""
    sc = Scanner(text, cfg, source)
    sc.expect("(")
    sc.word("mu")
    name = sc.word()
    ys = sc.names()
    body = sc.open_formula({name: len(ys), **(params or {})})
    sc.expect(")")
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.peek().text!r}", sc.peek())
    return LfpSpec(name, tuple(ys), body)


@_wrap
def parse_automaton(text: str, theory: TheoryConfig | None = None, source: str | None = None) -> Automaton:
    sc = Scanner(text, source=source)
    sc.header(theory)
    sc.word("alphabet")
    alphabet = sc.set_body()
    sc.word("states")
    states = sc.states_body()
    sc.word("initial")
    initial = sc.subset_body(states)
    sc.word("final")
    final = sc.subset_body(states)
    sc.word("delta")
    sc.expect("{")
    delta: dict = {}
    while not sc.is_kind("}"):
        tok = sc.peek()
        st = sc.tag()
        sc.expect("->")
        nt = sc.tag()
        sc.word("on")
        if sc.is_kind("("):
            if len(alphabet.variants) != 1:
                raise sc.error("letter tag required: the alphabet has several variants", tok)
            lt = alphabet.tags[0]
        else:
            lt = sc.tag()
        for t, where in ((st, states), (nt, states), (lt, alphabet)):
            if t not in where:
                raise sc.error(f"unknown tag {tag_str(t)}", tok)
        ls, ss, ns = sc.names(), sc.names(), sc.names()
        if (len(ls), len(ss), len(ns)) != (alphabet.arity(lt), states.arity(st), states.arity(nt)):
            raise sc.error("transition coordinates do not match the arities", tok)
        f = sc.coord_formula(ls + ss + ns)
        key = (lt, st, nt)
        delta[key] = disj(delta[key], f) if key in delta else f
    sc.expect("}")
    deterministic = False
    if sc.is_word("deterministic"):
        sc.next()
        deterministic = sc.word("true", "false") == "true"
    state_eq = None
    if sc.is_word("equiv"):
        sc.next()
        sc.expect("{")
        spec: dict = {}
        while not sc.is_kind("}"):
            tok = sc.peek()
            a = sc.tag()
            sc.expect("->")
            b = sc.tag()
            if a not in states or b not in states:
                raise sc.error("equiv tags must be states", tok)
            xs, ys = sc.names(), sc.names()
            if (len(xs), len(ys)) != (states.arity(a), states.arity(b)):
                raise sc.error("equiv coordinates do not match the arities", tok)
            f = sc.coord_formula(xs + ys)
            spec[(a, b)] = disj(spec[(a, b)], f) if (a, b) in spec else f
        sc.expect("}")
        state_eq = DefRel.of(states, states, spec)
    if not sc.at_end():
        raise sc.error(f"unexpected {sc.peek().text!r}", sc.peek())
    return build(alphabet, states, initial, final, delta, deterministic, state_eq)


@_wrap
def parse_register_automaton(text: str, theory: TheoryConfig | None = None,
                             source: str | None = None) -> RegisterAutomaton:
    sc = Scanner(text, source=source)
    cfg = sc.header(theory)
    sc.word("registers")
    k = sc.number()
    sc.word("alphabet")
    alphabet = sc.set_body()
    sc.word("control")
    control = []
    while sc.is_kind("ident") and not sc.is_word("initial", "final", "edge"):
        control.append(sc.next().text)
    initial: dict = {}
    final: dict = {}
    edges = []
    rels = {BOTTOM: 1}
    while not sc.at_end():
        kw = sc.word("initial", "final", "edge")
        if kw in ("initial", "final"):
            label = sc.word()
            f = sc.open_formula(rels)
            table = initial if kw == "initial" else final
            table[label] = disj(table[label], f) if label in table else f
        else:
            src = sc.word()
            sc.expect("->")
            dst = sc.word()
            sc.word("on")
            letter = sc.tag()
            edges.append(Edge(src, dst, letter, sc.open_formula(rels)))
    return RegisterAutomaton(cfg, alphabet, tuple(control), k, initial, final, tuple(edges))


def _tagged_triples(sc: Scanner, left: DefSet, mid: DefSet | None, right: DefSet, what: str) -> dict:
    """Lines ``a [b] -> c (xs) [(ys)] (zs) formula``; tags may be omitted for one-variant sets."""
    spec: dict = {}
    sc.expect("{")
    sets = [left] + ([mid] if mid is not None else []) + [right]
    while not sc.is_kind("}"):
        tok = sc.peek()
        tags = []
        if sc.is_kind("("):
            if any(len(s.variants) != 1 for s in sets):
                raise sc.error(f"{what}: tags required for sets with several variants", tok)
            tags = [s.tags[0] for s in sets]
        else:
            tags.append(sc.tag())
            if mid is not None:
                tags.append(sc.tag())
            sc.expect("->")
            tags.append(sc.tag())
        for t, s in zip(tags, sets):
            if t not in s:
                raise sc.error(f"{what}: unknown tag {tag_str(t)}", tok)
        groups = [sc.names() for _ in sets]
        if [len(g) for g in groups] != [s.arity(t) for t, s in zip(tags, sets)]:
            raise sc.error(f"{what}: coordinates do not match the arities", tok)
        f = sc.coord_formula([n for g in groups for n in g])
        key = tuple(tags)
        spec[key] = disj(spec[key], f) if key in spec else f
    sc.expect("}")
    return spec


@_wrap
def parse_promonoid(text: str, theory: TheoryConfig | None = None, source: str | None = None):
    """A promonoid, or a recognizer when ``alphabet``/``letters``/``accepting`` follow."""
    sc = Scanner(text, source=source)
    sc.header(theory)
    sc.word("carrier")
    carrier = sc.set_body()
    sc.word("mult")
    spec = _tagged_triples(sc, carrier, carrier, carrier, "mult")
    mult = DefRel.of(product(carrier, carrier), carrier, {((a, b), c): f for (a, b, c), f in spec.items()})
    sc.word("unit")
    unit = sc.subset_body(carrier)
    p = Promonoid(carrier, mult, unit)
    if sc.at_end():
        return p
    sc.word("alphabet")
    alphabet = sc.set_body()
    sc.word("letters")
    spec = _tagged_triples(sc, alphabet, None, carrier, "letters")
    letters = DefRel.of(alphabet, carrier, {(a, b): f for (a, b), f in spec.items()})
    sc.word("accepting")
    accepting = sc.subset_body(carrier)
    if not sc.at_end():
        raise sc.error(f"unexpected {sc.peek().text!r}", sc.peek())
    return Recognizer(p, alphabet, letters, accepting)


# -- elements and words ---------------------------------------------------------------------------------


def _element(sc: Scanner, ambient: DefSet) -> Element:
    tok = sc.peek()
    if sc.is_kind("const"):
        unary = [v for v in ambient.variants if v.arity == 1]
        if len(unary) != 1:
            raise sc.error("a bare atom needs exactly one variant of arity 1", tok)
        return Element(unary[0].tag, (sc.term({}).value,))
    tag = sc.tag()
    atoms = []
    if sc.is_kind("("):
        sc.next()
        while not sc.is_kind(")"):
            t = sc.term({})
            if not isinstance(t, Const):
                raise sc.error("element coordinates must be atoms", tok)
            atoms.append(t.value)
            if sc.is_kind(","):
                sc.next()
        sc.expect(")")
    if tag not in ambient:
        raise sc.error(f"unknown tag {tag_str(tag)}", tok)
    if ambient.arity(tag) != len(atoms):
        raise sc.error(f"tag {tag_str(tag)} has arity {ambient.arity(tag)}, got {len(atoms)} atoms", tok)
    return Element(tag, tuple(atoms))


def _literal_scanner(text: str, cfg: TheoryConfig) -> Scanner:
    # atoms in elements and words are literals, never declarations
    sc = Scanner(text, cfg)
    sc.const = lambda body, pos: cfg.parse_atom(body, pos)
    return sc


@_wrap
def parse_element(text: str, cfg: TheoryConfig, ambient: DefSet, source: str | None = None) -> Element:
    sc = _literal_scanner(text, cfg)
    e = _element(sc, ambient)
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.peek().text!r}", sc.peek())
    return e


@_wrap
def parse_word(text: str, cfg: TheoryConfig, alphabet: DefSet, source: str | None = None) -> list[Element]:
    sc = _literal_scanner(text, cfg)
    sc.expect("[")
    out = []
    while not sc.is_kind("]"):
        out.append(_element(sc, alphabet))
        if sc.is_kind(","):
            sc.next()
        elif not sc.is_kind("]"):
            raise sc.error("expected ',' or ']'", sc.peek())
    sc.expect("]")
    if not sc.at_end():
        raise sc.error(f"trailing input {sc.peek().text!r}", sc.peek())
    return out


def format_element(e: Element) -> str:
    return str(e)


def format_word(w) -> str:
    return "[" + ",".join(str(e) for e in w) + "]"


# -- printing ------------------------------------------------------------------------------------------------


def _names(n: int, start: int = 1) -> str:
    return "(" + " ".join(f"x{i}" for i in range(start, start + n)) + ")"


def header_for(cfg: TheoryConfig, *formulas: Formula) -> str:
    """Theory header declaring every named constant the printed formulas use."""
    extra = set()
    if cfg.kind is Kind.EQUALITY:
        for f in formulas:
            extra |= {c for c in constants(f) if not str(c).isdigit()}
    return cfg.with_constants(extra).header()


def _set_lines(s: DefSet, indent: str = "  ") -> list[str]:
    return [f"{indent}variant {tag_str(v.tag)} {_names(v.arity)} {to_text(v.constraint)}" for v in s.variants]


def _set_block(s: DefSet, indent: str = "") -> str:
    if not s.variants:
        return "{ }"
    return "{\n" + "\n".join(_set_lines(s, indent + "  ")) + f"\n{indent}}}"


def _formulas_of_set(s: DefSet) -> list[Formula]:
    return [v.constraint for v in s.variants]


def format_set(s: DefSet, name: str = "S") -> str:
    return header_for(s.theory, *_formulas_of_set(s)) + "\n\n" + f"set {name} " + _set_block(s) + "\n"


def _rel_block(r: DefRel) -> str:
    lines = ["{", "  domain " + _set_block(r.domain, "  "), "  codomain " + _set_block(r.codomain, "  ")]
    for v in r.carrier.variants:
        dt, ct = v.tag
        m, n = r.domain.arity(dt), r.codomain.arity(ct)
        lines.append(f"  pair {tag_str(dt)} -> {tag_str(ct)} {_names(m)} {_names(n, m + 1)} {to_text(v.constraint)}")
    lines.append("}")
    return "\n".join(lines)


def format_rel(r: DefRel, name: str = "R") -> str:
    fs = _formulas_of_set(r.carrier) + _formulas_of_set(r.domain) + _formulas_of_set(r.codomain)
    return header_for(r.theory, *fs) + "\n\n" + f"rel {name} " + _rel_block(r) + "\n"


def _subset_block(s: DefSet) -> str:
    parts = []
    for v in s.variants:
        if v.constraint == FALSE:
            continue
        if v.constraint == TRUE:
            parts.append(f"  {tag_str(v.tag)}")
        else:
            parts.append(f"  {tag_str(v.tag)} {_names(v.arity)} where {to_text(v.constraint)}")
    if not parts:
        return "{ }"
    return "{\n" + "\n".join(parts) + "\n}"


def format_automaton(a: Automaton) -> str:
    fs = _formulas_of_set(a.alphabet) + _formulas_of_set(a.states) + _formulas_of_set(a.initial) \
        + _formulas_of_set(a.final) + _formulas_of_set(a.transition.carrier)
    if a.state_eq is not None:
        fs += _formulas_of_set(a.state_eq.carrier)
    out = [header_for(a.theory, *fs), "", "alphabet " + _set_block(a.alphabet)]
    states = []
    for v in a.states.variants:
        where = "" if v.constraint == TRUE else f" where {to_text(v.constraint)}"
        states.append(f"  {tag_str(v.tag)}({v.arity}){where}")
    out.append("states {\n" + "\n".join(states) + "\n}" if states else "states { }")
    out.append("initial " + _subset_block(a.initial))
    out.append("final " + _subset_block(a.final))
    lines = []
    for v in a.transition.carrier.variants:
        (lt, st), nt = v.tag
        m, k = a.alphabet.arity(lt), a.states.arity(st)
        kn = a.states.arity(nt)
        lines.append(f"  {tag_str(st)} -> {tag_str(nt)} on {tag_str(lt)} {_names(m)} {_names(k, m + 1)} "
                     f"{_names(kn, m + k + 1)} {to_text(v.constraint)}")
    out.append("delta {\n" + "\n".join(lines) + "\n}" if lines else "delta { }")
    out.append(f"deterministic {'true' if a.deterministic else 'false'}")
    if a.state_eq is not None:
        lines = []
        for v in a.state_eq.carrier.variants:
            s, t = v.tag
            k = a.states.arity(s)
            lines.append(f"  {tag_str(s)} -> {tag_str(t)} {_names(k)} {_names(a.states.arity(t), k + 1)} "
                         f"{to_text(v.constraint)}")
        out.append("equiv {\n" + "\n".join(lines) + "\n}" if lines else "equiv { }")
    return "\n".join(out) + "\n"


def format_promonoid(p, recognizer: Recognizer | None = None) -> str:
    if isinstance(p, Recognizer):
        recognizer, p = p, p.promonoid
    fs = _formulas_of_set(p.carrier) + _formulas_of_set(p.mult.carrier) + _formulas_of_set(p.unit)
    if recognizer is not None:
        fs += _formulas_of_set(recognizer.alphabet) + _formulas_of_set(recognizer.letters.carrier) \
            + _formulas_of_set(recognizer.accepting)
    out = [header_for(p.carrier.theory, *fs), "", "carrier " + _set_block(p.carrier)]
    lines = []
    for v in p.mult.carrier.variants:
        (a, b), c = v.tag
        ka, kb, kc = p.carrier.arity(a), p.carrier.arity(b), p.carrier.arity(c)
        lines.append(f"  {tag_str(a)} {tag_str(b)} -> {tag_str(c)} {_names(ka)} {_names(kb, ka + 1)} "
                     f"{_names(kc, ka + kb + 1)} {to_text(v.constraint)}")
    out.append("mult {\n" + "\n".join(lines) + "\n}" if lines else "mult { }")
    out.append("unit " + _subset_block(p.unit))
    if recognizer is not None:
        out.append("alphabet " + _set_block(recognizer.alphabet))
        lines = []
        for v in recognizer.letters.carrier.variants:
            lt, mt = v.tag
            m = recognizer.alphabet.arity(lt)
            lines.append(f"  {tag_str(lt)} -> {tag_str(mt)} {_names(m)} {_names(p.carrier.arity(mt), m + 1)} "
                         f"{to_text(v.constraint)}")
        out.append("letters {\n" + "\n".join(lines) + "\n}" if lines else "letters { }")
        out.append("accepting " + _subset_block(recognizer.accepting))
    return "\n".join(out) + "\n"

