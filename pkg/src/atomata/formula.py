"""First-order formulas over a single atom sort.

Formulas are immutable trees of frozen dataclasses.  Terms are either
variables or atom constants; constants carry the atom value itself (a
``str`` name for equality atoms, a :class:`fractions.Fraction` for ordered
atoms).  The concrete syntax is a small s-expression language::

    true | false | (= t t) | (!= t t) | (< t t)
    (and f ...) | (or f ...) | (not f) | (=> f f)
    (exists (v) f) | (forall (v) f)

Relation placeholders ``(X t1 ... tn)`` are accepted where a caller asks for
them (least fixed-point bodies, parameter relations).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from .errors import ParseError

Atom = Union[str, Fraction]


def _hash_once(cls):
    """Cache the structural hash; formulas are hashed constantly as memo keys."""
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = d["_hash"] = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
        return h

    cls.__hash__ = __hash__
    return cls


# -- terms -------------------------------------------------------------------


@_hash_once
@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@_hash_once
@dataclass(frozen=True)
class Const:
    value: Atom

    def __str__(self) -> str:
        return "@" + atom_str(self.value)


Term = Union[Var, Const]


def atom_str(a: Atom) -> str:
    if isinstance(a, Fraction):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"
    return str(a)


# -- formulas ----------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


TRUE = Top()
FALSE = Bot()


@_hash_once
@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@_hash_once
@dataclass(frozen=True)
class Neq(Formula):
    left: Term
    right: Term


@_hash_once
@dataclass(frozen=True)
class Lt(Formula):
    left: Term
    right: Term


@_hash_once
@dataclass(frozen=True)
class And(Formula):
    args: tuple


@_hash_once
@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@_hash_once
@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@_hash_once
@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@_hash_once
@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@_hash_once
@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@_hash_once
@dataclass(frozen=True)
class Pred(Formula):
    """Application of a named relation placeholder to terms."""

    name: str
    args: tuple


Literal = Union[Eq, Neq, Lt]
LITERALS = (Eq, Neq, Lt)


# -- smart constructors --------------------------------------------------------


def conj(*parts: Formula) -> Formula:
    """Flattening conjunction with unit/zero folding."""
    out: list[Formula] = []
    seen = set()
    for p in _flatten(parts, And):
        if isinstance(p, Top):
            continue
        if isinstance(p, Bot):
            return FALSE
        if p not in seen:
            seen.add(p)
            out.append(p)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*parts: Formula) -> Formula:
    out: list[Formula] = []
    seen = set()
    for p in _flatten(parts, Or):
        if isinstance(p, Bot):
            continue
        if isinstance(p, Top):
            return TRUE
        if p not in seen:
            seen.add(p)
            out.append(p)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def _flatten(parts: Iterable[Formula], kind: type) -> Iterable[Formula]:
    for p in parts:
        if isinstance(p, kind):
            yield from _flatten(p.args, kind)
        else:
            yield p


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))


def exists_many(names: Sequence[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def forall_many(names: Sequence[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


def eqs(left: Sequence[Term], right: Sequence[Term]) -> Formula:
    return conj(*(Eq(a, b) for a, b in zip(left, right)))


def coords(prefix: str, n: int, start: int = 1) -> tuple[Var, ...]:
    return tuple(Var(f"{prefix}{i}") for i in range(start, start + n))


# -- structural queries -------------------------------------------------------


@lru_cache(maxsize=200_000)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, LITERALS):
        return frozenset(t.name for t in (f.left, f.right) if isinstance(t, Var))
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(a) for a in f.args))
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, Pred):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    return frozenset()


@lru_cache(maxsize=200_000)
def all_vars(f: Formula) -> frozenset:
    """Every variable name occurring in ``f``, free or bound."""
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, (And, Or)):
        return frozenset().union(*(all_vars(a) for a in f.args))
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, Implies):
        return all_vars(f.left) | all_vars(f.right)
    return free_vars(f)


@lru_cache(maxsize=200_000)
def constants(f: Formula) -> frozenset:
    if isinstance(f, LITERALS):
        return frozenset(t.value for t in (f.left, f.right) if isinstance(t, Const))
    if isinstance(f, (And, Or)):
        return frozenset().union(*(constants(a) for a in f.args))
    if isinstance(f, Not):
        return constants(f.arg)
    if isinstance(f, Implies):
        return constants(f.left) | constants(f.right)
    if isinstance(f, (Exists, Forall)):
        return constants(f.body)
    if isinstance(f, Pred):
        return frozenset(t.value for t in f.args if isinstance(t, Const))
    return frozenset()


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_depth(f.body)
    if isinstance(f, (And, Or)):
        return max((quantifier_depth(a) for a in f.args), default=0)
    if isinstance(f, Not):
        return quantifier_depth(f.arg)
    if isinstance(f, Implies):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 0


def is_quantifier_free(f: Formula) -> bool:
    return quantifier_depth(f) == 0


def predicates(f: Formula) -> frozenset:
    if isinstance(f, Pred):
        return frozenset([f.name])
    if isinstance(f, (And, Or)):
        return frozenset().union(*(predicates(a) for a in f.args))
    if isinstance(f, Not):
        return predicates(f.arg)
    if isinstance(f, Implies):
        return predicates(f.left) | predicates(f.right)
    if isinstance(f, (Exists, Forall)):
        return predicates(f.body)
    return frozenset()


def fresh_name(avoid: Iterable[str], base: str = "v") -> str:
    avoid = set(avoid)
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# -- substitution --------------------------------------------------------------


def _sub_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return t


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution of terms for free variables."""
    mapping = {k: v for k, v in mapping.items() if not (isinstance(v, Var) and v.name == k)}
    if not mapping:
        return f
    return _subst(f, mapping)


def _subst(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    if not mapping:
        return f
    if isinstance(f, LITERALS):
        return type(f)(_sub_term(f.left, mapping), _sub_term(f.right, mapping))
    if isinstance(f, And):
        return And(tuple(_subst(a, mapping) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_subst(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(_subst(f.arg, mapping))
    if isinstance(f, Implies):
        return Implies(_subst(f.left, mapping), _subst(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        fv = free_vars(f)
        inner = {k: v for k, v in mapping.items() if k != f.var and k in fv}
        if not inner:
            return f
        incoming = {t.name for t in inner.values() if isinstance(t, Var)}
        var = f.var
        if var in incoming:
            new = fresh_name(incoming | all_vars(f.body) | set(inner), base=var + "_")
            inner = dict(inner)
            inner[var] = Var(new)
            var = new
        return type(f)(var, _subst(f.body, inner))
    if isinstance(f, Pred):
        return Pred(f.name, tuple(_sub_term(t, mapping) for t in f.args))
    return f


def replace_pred(f: Formula, name: str, params: Sequence[str], body: Formula) -> Formula:
    """Replace every ``(name t1 .. tn)`` by ``body[params := t1 .. tn]``."""
    if isinstance(f, Pred):
        if f.name != name:
            return f
        if len(f.args) != len(params):
            raise ValueError(f"relation {name} applied to {len(f.args)} arguments, expected {len(params)}")
        return substitute(body, dict(zip(params, f.args)))
    if isinstance(f, And):
        return And(tuple(replace_pred(a, name, params, body) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(replace_pred(a, name, params, body) for a in f.args))
    if isinstance(f, Not):
        return Not(replace_pred(f.arg, name, params, body))
    if isinstance(f, Implies):
        return Implies(replace_pred(f.left, name, params, body), replace_pred(f.right, name, params, body))
    if isinstance(f, (Exists, Forall)):
        var = f.var
        inner = f.body
        if var in free_vars(body) - set(params):
            new = fresh_name(all_vars(f.body) | free_vars(body) | {var}, base=var + "_")
            inner = substitute(inner, {var: Var(new)})
            var = new
        return type(f)(var, replace_pred(inner, name, params, body))
    return f


# -- printing ----------------------------------------------------------------


def to_text(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Eq):
        return f"(= {f.left} {f.right})"
    if isinstance(f, Neq):
        return f"(!= {f.left} {f.right})"
    if isinstance(f, Lt):
        return f"(< {f.left} {f.right})"
    if isinstance(f, And):
        return "(and " + " ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Not):
        return f"(not {to_text(f.arg)})"
    if isinstance(f, Implies):
        return f"(=> {to_text(f.left)} {to_text(f.right)})"
    if isinstance(f, Exists):
        return f"(exists ({f.var}) {to_text(f.body)})"
    if isinstance(f, Forall):
        return f"(forall ({f.var}) {to_text(f.body)})"
    if isinstance(f, Pred):
        return "(" + " ".join([f.name, *(str(t) for t in f.args)]) + ")"
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=200_000)
def sort_key(f: Formula) -> str:
    return to_text(f)


def term_key(t: Term) -> tuple:
    if isinstance(t, Var):
        return (0, t.name, 0)
    if isinstance(t, Fraction) or isinstance(t.value, Fraction):
        return (1, "", t.value)
    return (2, t.value, 0)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|(!=|=>|=|<)|(@-?[A-Za-z0-9_]+(?:/[0-9]+)?)|([A-Za-z][A-Za-z0-9_']*))")


@dataclass
class Token:
    kind: str  # "(", ")", "op", "const", "ident"
    text: str
    pos: int


def tokenize(text: str, offset: int = 0) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", offset + i)
        if m.group(1):
            pass
        elif m.group(2):
            tokens.append(Token("(", "(", offset + m.start(2)))
        elif m.group(3):
            tokens.append(Token(")", ")", offset + m.start(3)))
        elif m.group(4):
            tokens.append(Token("op", m.group(4), offset + m.start(4)))
        elif m.group(5):
            tokens.append(Token("const", m.group(5), offset + m.start(5)))
        elif m.group(6):
            tokens.append(Token("ident", m.group(6), offset + m.start(6)))
        i = m.end()
    return tokens


class FormulaReader:
    """Recursive-descent reader over a token list.

    ``const`` turns an ``@...`` token into an atom value (theory-specific);
    ``relations`` names the relation placeholders allowed in this context,
    mapped to their arity (``None`` accepts any arity).
    """

    KEYWORDS = {"and", "or", "not", "exists", "forall", "true", "false"}

    def __init__(self, tokens: list[Token], const, relations: Mapping[str, int | None] | None = None,
                 allow_lt: bool = True):
        self.tokens = tokens
        self.allow_lt = allow_lt
        self.i = 0
        self.const = const
        self.relations = dict(relations or {})
        self.idents = {t.text for t in tokens if t.kind == "ident"}

    # token helpers
    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.tokens[-1].pos + 1 if self.tokens else 0
            raise ParseError("unexpected end of input", last)
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text!r}", t.pos)
        return t

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def term(self, bound: Sequence[str]) -> Term:
        t = self.next()
        if t.kind == "const":
            return Const(self.const(t.text[1:], t.pos))
        if t.kind == "ident" and t.text not in self.KEYWORDS:
            return Var(bound.get(t.text, t.text) if isinstance(bound, dict) else t.text)
        raise ParseError(f"expected a term, found {t.text!r}", t.pos)

    def formula(self, bound: dict | None = None) -> Formula:
        bound = {} if bound is None else bound
        t = self.next()
        if t.kind == "ident" and t.text == "true":
            return TRUE
        if t.kind == "ident" and t.text == "false":
            return FALSE
        if t.kind != "(":
            raise ParseError(f"expected a formula, found {t.text!r}", t.pos)
        head = self.next()
        if head.kind == "op":
            if head.text == "=>":
                a = self.formula(bound)
                b = self.formula(bound)
                self.expect(")")
                return Implies(a, b)
            a = self.term(bound)
            b = self.term(bound)
            self.expect(")")
            if head.text == "=":
                return Eq(a, b)
            if head.text == "!=":
                return Neq(a, b)
            return self.lt(a, b, head)
        if head.kind != "ident":
            raise ParseError(f"expected an operator, found {head.text!r}", head.pos)
        word = head.text
        if word in ("and", "or"):
            args = []
            while self.peek() is not None and self.peek().kind != ")":
                args.append(self.formula(bound))
            self.expect(")")
            if not args:
                return TRUE if word == "and" else FALSE
            return And(tuple(args)) if word == "and" else Or(tuple(args))
        if word == "not":
            a = self.formula(bound)
            self.expect(")")
            return Not(a)
        if word in ("exists", "forall"):
            self.expect("(")
            names = []
            while self.peek() is not None and self.peek().kind == "ident":
                names.append(self.next())
            self.expect(")")
            if not names:
                raise ParseError("quantifier binds no variable", head.pos)
            inner = dict(bound)
            renamed = []
            for tok in names:
                name = tok.text
                if name in self.KEYWORDS:
                    raise ParseError(f"cannot bind keyword {name!r}", tok.pos)
                if name in bound:
                    # bound twice on this path: rename apart
                    new = fresh_name(self.idents | set(bound.values()) | set(inner.values()), base=name + "_")
                    self.idents.add(new)
                    inner[name] = new
                else:
                    inner[name] = name
                renamed.append(inner[name])
            body = self.formula(inner)
            self.expect(")")
            cls = Exists if word == "exists" else Forall
            for name in reversed(renamed):
                body = cls(name, body)
            return body
        if word in self.relations:
            args = []
            while self.peek() is not None and self.peek().kind != ")":
                args.append(self.term(bound))
            self.expect(")")
            arity = self.relations[word]
            if arity is not None and arity != len(args):
                raise ParseError(f"relation {word} expects {arity} arguments, got {len(args)}", head.pos)
            return Pred(word, tuple(args))
        raise ParseError(f"unknown operator {word!r}", head.pos)

    def lt(self, a: Term, b: Term, tok: Token) -> Formula:
        if not self.allow_lt:
            raise ParseError("'<' is not in the signature of the equality theory", tok.pos)
        return Lt(a, b)
