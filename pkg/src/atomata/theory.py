"""Decision procedures for the two built-in atom theories.

``EQUALITY`` is the theory of an infinite set with equality only (pure
sets); ``DENSE_ORDER`` is the complete theory of ``(Q, <)``.  Both admit
quantifier elimination, which is the engine behind evaluation, satisfiability
and validity.  Constants are allowed in formulas: equality constants are
pairwise distinct names, order constants are exact rationals.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import EvaluationError, ParseError, TheoryError
from .formula import (
    FALSE,
    LITERALS,
    TRUE,
    And,
    Atom,
    Bot,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaReader,
    Implies,
    Lt,
    Neq,
    Not,
    Or,
    Pred,
    Term,
    Top,
    Var,
    conj,
    constants,
    disj,
    free_vars,
    iff,
    sort_key,
    substitute,
    term_key,
    tokenize,
)


class Kind(enum.Enum):
    EQUALITY = "equality"
    DENSE_ORDER = "order"


class Mode(enum.Enum):
    SAT = "sat"
    VALID = "valid"


@dataclass(frozen=True)
class TheoryConfig:
    kind: Kind
    declared_constants: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "declared_constants", frozenset(self.atom(c) for c in self.declared_constants))

    @property
    def ordered(self) -> bool:
        return self.kind is Kind.DENSE_ORDER

    def parse_atom(self, text: str, pos: int | None = None) -> Atom:
        """Read an atom literal (without the leading ``@``)."""
        text = str(text)
        if self.kind is Kind.DENSE_ORDER:
            try:
                return Fraction(text)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"@{text} is not a rational constant", pos) from None
        if "/" in text or text.startswith("-"):
            raise ParseError(f"@{text} is not a valid atom name", pos)
        if text.isdigit():
            return str(int(text))
        return text

    def atom(self, value) -> Atom:
        """Coerce a Python value (int, str, Fraction) to an atom of this theory."""
        if self.kind is Kind.DENSE_ORDER:
            return Fraction(value)
        if isinstance(value, int):
            return str(value)
        return self.parse_atom(value)

    def check_constant(self, value: Atom, pos: int | None = None) -> None:
        if self.kind is Kind.EQUALITY and not value.isdigit() and value not in self.declared_constants:
            raise ParseError(f"undeclared constant @{value}", pos)

    def with_constants(self, extra: Iterable) -> "TheoryConfig":
        return TheoryConfig(self.kind, self.declared_constants | frozenset(self.atom(a) for a in extra))

    def header(self) -> str:
        lines = [f"theory {self.kind.value}"]
        if self.declared_constants:
            from .formula import atom_str

            consts = sorted(self.declared_constants, key=lambda a: term_key(Const(a)))
            lines.append("const " + " ".join("@" + atom_str(c) for c in consts))
        return "\n".join(lines)


EQUALITY = TheoryConfig(Kind.EQUALITY)
DENSE_ORDER = TheoryConfig(Kind.DENSE_ORDER)


def parse_theory_header(text: str) -> TheoryConfig:
    """Parse ``theory equality|order`` plus optional ``const @a @b`` lines."""
    kind = None
    consts: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "theory" and len(words) == 2 and kind is None:
            try:
                kind = Kind(words[1])
            except ValueError:
                raise ParseError(f"unknown theory {words[1]!r}", line=lineno) from None
        elif words[0] == "const" and kind is not None:
            for w in words[1:]:
                if not w.startswith("@"):
                    raise ParseError(f"constant {w!r} must start with '@'", line=lineno)
                consts.append(w[1:])
        else:
            raise ParseError(f"unexpected line {line!r} in theory header", line=lineno)
    if kind is None:
        raise ParseError("missing 'theory equality' or 'theory order' header")
    cfg = TheoryConfig(kind)
    return TheoryConfig(kind, frozenset(cfg.parse_atom(c) for c in consts))


# -- parsing -------------------------------------------------------------------


def reader(text: str, cfg: TheoryConfig, relations: Mapping[str, int | None] | None = None,
           offset: int = 0) -> FormulaReader:
    def const(body: str, pos: int) -> Atom:
        value = cfg.parse_atom(body, pos)
        cfg.check_constant(value, pos)
        return value

    return FormulaReader(tokenize(text, offset), const, relations, allow_lt=cfg.ordered)


def parse_formula(text: str, cfg: TheoryConfig, relations: Mapping[str, int | None] | None = None) -> Formula:
    r = reader(text, cfg, relations)
    f = r.formula()
    if not r.at_end():
        raise ParseError(f"trailing input {r.peek().text!r}", r.peek().pos)
    return f


# -- literal normalization -----------------------------------------------------


def _ordered_pair(a: Term, b: Term) -> tuple[Term, Term]:
    return (a, b) if term_key(a) <= term_key(b) else (b, a)


def literal(f: Formula) -> Formula:
    """Orient a literal and fold it when both sides are constants."""
    a, b = f.left, f.right
    if isinstance(f, Lt):
        if a == b:
            return FALSE
        if isinstance(a, Const) and isinstance(b, Const):
            return TRUE if a.value < b.value else FALSE
        return f
    if a == b:
        return TRUE if isinstance(f, Eq) else FALSE
    if isinstance(a, Const) and isinstance(b, Const):
        same = a.value == b.value
        return TRUE if same == isinstance(f, Eq) else FALSE
    a, b = _ordered_pair(a, b)
    return type(f)(a, b)


def negate_literal(f: Formula, kind: Kind) -> Formula:
    if isinstance(f, Eq):
        return literal(Neq(f.left, f.right))
    if isinstance(f, Neq):
        return literal(Eq(f.left, f.right))
    # not (a < b)  ==  b < a or a = b   (linear order)
    return disj(literal(Lt(f.right, f.left)), literal(Eq(f.left, f.right)))


# -- negation normal form --------------------------------------------------------


def nnf(f: Formula, kind: Kind, negate: bool = False) -> Formula:
    """Push negations to literals; the result has no Not/Implies."""
    if isinstance(f, Top):
        return FALSE if negate else TRUE
    if isinstance(f, Bot):
        return TRUE if negate else FALSE
    if isinstance(f, LITERALS):
        lit = literal(f)
        if not negate:
            return lit
        if isinstance(lit, (Top, Bot)):
            return FALSE if isinstance(lit, Top) else TRUE
        return negate_literal(lit, kind)
    if isinstance(f, And):
        parts = [nnf(a, kind, negate) for a in f.args]
        return disj(*parts) if negate else conj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, kind, negate) for a in f.args]
        return conj(*parts) if negate else disj(*parts)
    if isinstance(f, Not):
        return nnf(f.arg, kind, not negate)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.left), f.right)), kind, negate)
    if isinstance(f, Exists):
        body = nnf(f.body, kind, negate)
        return Forall(f.var, body) if negate else Exists(f.var, body)
    if isinstance(f, Forall):
        body = nnf(f.body, kind, negate)
        return Exists(f.var, body) if negate else Forall(f.var, body)
    if isinstance(f, Pred):
        raise TheoryError(f"relation placeholder {f.name} must be substituted before solving")
    raise TypeError(f"not a formula: {f!r}")


# -- cube reasoning ---------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if term_key(rb) < term_key(ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class _Closure:
    """Equality classes and strict-order reachability of a conjunction of literals."""

    ok: bool
    uf: _UnionFind
    reps: list
    less: dict  # rep -> set of reps strictly above (transitive)
    neqs: set


def _close(lits: Sequence[Formula], kind: Kind) -> _Closure:
    uf = _UnionFind()
    terms: set = set()
    for lit in lits:
        terms.add(lit.left)
        terms.add(lit.right)
    for t in terms:
        uf.find(t)
    for lit in lits:
        if isinstance(lit, Eq):
            uf.union(lit.left, lit.right)
    # classes with a constant are represented by it; two constants in a class clash
    const_of: dict = {}
    for t in terms:
        if isinstance(t, Const):
            r = uf.find(t)
            if r in const_of and const_of[r] != t:
                return _Closure(False, uf, [], {}, set())
            const_of[r] = t
    for r, c in const_of.items():
        if r != c:
            uf.parent[r] = c
            uf.parent[c] = c
    reps = sorted({uf.find(t) for t in terms}, key=term_key)
    neqs = set()
    for lit in lits:
        if isinstance(lit, Neq):
            a, b = uf.find(lit.left), uf.find(lit.right)
            if a == b:
                return _Closure(False, uf, reps, {}, set())
            neqs.add(_ordered_pair(a, b))
    less: dict = {r: set() for r in reps}
    if kind is Kind.DENSE_ORDER:
        edges = {r: set() for r in reps}
        for lit in lits:
            if isinstance(lit, Lt):
                a, b = uf.find(lit.left), uf.find(lit.right)
                if a == b:
                    return _Closure(False, uf, reps, {}, set())
                edges[a].add(b)
        cs = sorted((r for r in reps if isinstance(r, Const)), key=lambda c: c.value)
        for lo, hi in zip(cs, cs[1:]):
            edges[lo].add(hi)
        # transitive closure by DFS from each node
        for r in reps:
            seen: set = set()
            stack = list(edges[r])
            while stack:
                n = stack.pop()
                if n in seen:
                    continue
                seen.add(n)
                stack.extend(edges[n])
            if r in seen:
                return _Closure(False, uf, reps, {}, set())
            less[r] = seen
    return _Closure(True, uf, reps, less, neqs)


def cube_consistent(lits: Sequence[Formula], kind: Kind) -> bool:
    return _close(lits, kind).ok


def cube_normalize(lits: Sequence[Formula], kind: Kind) -> tuple | None:
    """Canonical literal tuple of a consistent conjunction, or ``None``."""
    cl = _close(lits, kind)
    if not cl.ok:
        return None
    out = set()
    terms = set()
    for lit in lits:
        terms.add(lit.left)
        terms.add(lit.right)
    for t in terms:
        r = cl.uf.find(t)
        if r != t:
            out.add(Eq(*_ordered_pair(r, t)))
    for a, b in cl.neqs:
        if isinstance(a, Const) and isinstance(b, Const):
            continue
        if kind is Kind.DENSE_ORDER and (b in cl.less[a] or a in cl.less[b]):
            continue
        out.add(Neq(a, b))
    if kind is Kind.DENSE_ORDER:
        for a in cl.reps:
            for b in cl.less[a]:
                if isinstance(a, Const) and isinstance(b, Const):
                    continue
                # transitive reduction, with constants' order implicit
                if any(b in cl.less[c] for c in cl.less[a]):
                    continue
                out.add(Lt(a, b))
    return tuple(sorted(out, key=sort_key))


def _fresh_atoms(kind: Kind, used: Iterable[Atom]) -> Iterator[Atom]:
    used = set(used)
    if kind is Kind.EQUALITY:
        i = 1
        while True:
            name = str(i)
            if name not in used:
                yield name
            i += 1
    else:
        raise ValueError("ordered fresh atoms are placed explicitly")


def cube_model(lits: Sequence[Formula], kind: Kind, avoid: Iterable[Atom] = ()) -> dict | None:
    """A concrete assignment to the variables of a consistent conjunction."""
    cl = _close(lits, kind)
    if not cl.ok:
        return None
    avoid = set(avoid) | {r.value for r in cl.reps if isinstance(r, Const)}
    values: dict = {}
    if kind is Kind.EQUALITY:
        fresh = _fresh_atoms(kind, avoid)
        for r in cl.reps:
            values[r] = r.value if isinstance(r, Const) else next(fresh)
    else:
        above = cl.less
        below: dict = {r: set() for r in cl.reps}
        for a in cl.reps:
            for b in above[a]:
                below[b].add(a)
        used = set(avoid)
        order = sorted(cl.reps, key=lambda r: (len(below[r]), term_key(r)))
        for r in order:
            if isinstance(r, Const):
                values[r] = r.value
                continue
            lo_vals = [values[b] for b in below[r] if b in values]
            lo_consts = [b.value for b in below[r] if isinstance(b, Const)]
            lo = max(lo_vals + lo_consts, default=None)
            hi_consts = [b.value for b in above[r] if isinstance(b, Const)]
            hi = min(hi_consts, default=None)
            values[r] = _pick_between(lo, hi, used)
            used.add(values[r])
    model = {}
    for lit in lits:
        for t in (lit.left, lit.right):
            if isinstance(t, Var):
                model[t.name] = values[cl.uf.find(t)]
    return model


def _pick_between(lo, hi, used) -> Fraction:
    if lo is None and hi is None:
        cand = Fraction(0)
        while cand in used:
            cand += 1
        return cand
    if hi is None:
        cand = Fraction(lo) + 1
        while cand in used:
            cand += 1
        return cand
    if lo is None:
        cand = Fraction(hi) - 1
        while cand in used:
            cand -= 1
        return cand
    lo, hi = Fraction(lo), Fraction(hi)
    # land in the lower part of the gap so later successors still fit below hi
    width = hi - lo
    k = 2
    cand = lo + width / k
    while cand in used:
        k += 1
        cand = lo + width / k
    return cand


# -- quantifier elimination ---------------------------------------------------------


class Stats(threading.local):
    def __init__(self):
        self.qe_calls = 0
        self.decide_calls = 0


stats = Stats()


def _resolve(var: str, lits: list, kind: Kind) -> Formula:
    """Eliminate ``exists var`` from a conjunction of literals."""
    v = Var(var)
    rest = []
    for lit in lits:
        if var not in free_vars(lit):
            rest.append(lit)
            continue
        if lit.left == lit.right:
            if isinstance(lit, Eq):
                continue
            return FALSE
        rest.append(lit)
    with_v = [lit for lit in rest if var in free_vars(lit)]
    without_v = [lit for lit in rest if var not in free_vars(lit)]
    for lit in with_v:
        if isinstance(lit, Eq):
            other = lit.right if lit.left == v else lit.left
            return conj(*(nnf(substitute(x, {var: other}), kind) for x in rest if x is not lit))
    if kind is Kind.EQUALITY:
        # infinitely many atoms: every finite set of disequalities has a witness
        return conj(*without_v)
    lowers = [lit.left for lit in with_v if isinstance(lit, Lt) and lit.right == v]
    uppers = [lit.right for lit in with_v if isinstance(lit, Lt) and lit.left == v]
    # density and no endpoints: the open interval is nonempty iff every lower bound
    # lies below every upper bound; disequalities never matter
    return conj(*without_v, *(literal(Lt(lo, hi)) for lo in lowers for hi in uppers))


def _eliminate(var: str, f: Formula, kind: Kind) -> Formula:
    """``exists var. f`` for quantifier-free NNF ``f``; distributes only where ``var`` occurs."""
    if var not in free_vars(f):
        return f
    if isinstance(f, Or):
        return disj(*(_eliminate(var, a, kind) for a in f.args))
    if isinstance(f, LITERALS):
        return _resolve(var, [f], kind)
    if isinstance(f, And):
        outside = [a for a in f.args if var not in free_vars(a)]
        inside = [a for a in f.args if var in free_vars(a)]
        split = next((a for a in inside if isinstance(a, Or)), None)
        if split is None:
            return conj(*outside, _resolve(var, inside, kind))
        others = [a for a in inside if a is not split]
        return conj(*outside, disj(*(_eliminate(var, conj(*others, d), kind) for d in split.args)))
    raise TypeError(f"unexpected node in quantifier-free NNF: {f!r}")


# beyond this many DNF branches over the quantified variable, use test points
SPLIT_LIMIT = 64


def _branches(var: str, f: Formula) -> int:
    if var not in free_vars(f) or isinstance(f, LITERALS):
        return 1
    if isinstance(f, Or):
        return sum(_branches(var, a) for a in f.args)
    n = 1
    for a in f.args:
        n *= _branches(var, a)
    return n


def _plug(f: Formula, var: str, point: tuple) -> Formula:
    """``f`` with ``var`` placed at a test point.

    ``("at", t)`` is the value of ``t``; ``("low",)`` lies below every term
    (a fresh atom under equality); ``("above", t)`` lies just above ``t``.
    """
    if var not in free_vars(f):
        return f
    if isinstance(f, And):
        return conj(*(_plug(a, var, point) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_plug(a, var, point) for a in f.args))
    v = Var(var)
    if point[0] == "at":
        t = point[1]
        return literal(type(f)(t if f.left == v else f.left, t if f.right == v else f.right))
    if isinstance(f, Eq):
        return FALSE
    if isinstance(f, Neq):
        return TRUE
    # f is x < s or s < x
    if point[0] == "low":
        return TRUE if f.left == v else FALSE
    t = point[1]
    if f.left == v:
        return literal(Lt(t, f.right))
    return disj(literal(Lt(f.left, t)), literal(Eq(f.left, t)))


def _test_points(var: str, f: Formula, kind: Kind) -> Formula:
    """``exists var. f`` as a finite disjunction over test points.

    Every literal keeps its truth value between consecutive term values, so
    the terms, one point below them all and (for the order) one point just
    above each term cover every case. Under equality the point below is a
    fresh atom.
    """
    v = Var(var)
    terms = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (And, Or)):
            stack.extend(a for a in g.args if var in free_vars(a))
        elif isinstance(g, LITERALS):
            terms.update(t for t in (g.left, g.right) if t != v)
    terms = sorted(terms, key=term_key)
    points = [("at", t) for t in terms] + [("low",)]
    if kind is Kind.DENSE_ORDER:
        points += [("above", t) for t in terms]
    return disj(*(compact(_plug(f, var, p), kind) for p in points))


def _exists(var: str, f: Formula, kind: Kind) -> Formula:
    if _branches(var, f) <= SPLIT_LIMIT:
        return compact(_eliminate(var, f, kind), kind)
    return compact(_test_points(var, f, kind), kind)


@lru_cache(maxsize=100_000)
def _qe(f: Formula, kind: Kind) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, LITERALS):
        return literal(f)
    if isinstance(f, And):
        return conj(*(_qe(a, kind) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_qe(a, kind) for a in f.args))
    if isinstance(f, Not):
        return nnf(_qe(f.arg, kind), kind, negate=True)
    if isinstance(f, Implies):
        return disj(nnf(_qe(f.left, kind), kind, negate=True), _qe(f.right, kind))
    if isinstance(f, Exists):
        return _exists(f.var, _qe(f.body, kind), kind)
    if isinstance(f, Forall):
        body = nnf(_qe(f.body, kind), kind, negate=True)
        return nnf(_exists(f.var, body, kind), kind, negate=True)
    if isinstance(f, Pred):
        raise TheoryError(f"relation placeholder {f.name} must be substituted before solving")
    raise TypeError(f"not a formula: {f!r}")


def eliminate_quantifiers(phi: Formula, cfg: TheoryConfig) -> Formula:
    """An equivalent quantifier-free formula, in negation normal form."""
    stats.qe_calls += 1
    return _qe(phi, cfg.kind)


# -- DNF compaction ------------------------------------------------------------------

DNF_LIMIT = 4096


def _cubes(f: Formula, kind: Kind, limit: int) -> list | None:
    """DNF cubes of quantifier-free NNF ``f`` with inconsistent cubes pruned."""
    if isinstance(f, Top):
        return [()]
    if isinstance(f, Bot):
        return []
    if isinstance(f, LITERALS):
        return [(f,)]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            sub = _cubes(a, kind, limit)
            if sub is None:
                return None
            out.extend(sub)
            if len(out) > limit:
                return None
        return out
    if isinstance(f, And):
        acc = [()]
        for a in f.args:
            sub = _cubes(a, kind, limit)
            if sub is None:
                return None
            nxt = []
            for c1 in acc:
                for c2 in sub:
                    c = c1 + c2
                    if cube_consistent(c, kind):
                        nxt.append(c)
                        if len(nxt) > limit:
                            return None
            acc = nxt
            if not acc:
                return []
        return acc
    raise TypeError(f"unexpected node in quantifier-free NNF: {f!r}")


@lru_cache(maxsize=100_000)
def compact(f: Formula, kind: Kind) -> Formula:
    """Canonical-ish DNF: consistent normalized cubes, deduplicated, subsumption-free."""
    if isinstance(f, (Top, Bot)):
        return f
    cubes = _cubes(f, kind, DNF_LIMIT)
    if cubes is None:
        return f
    normal = set()
    for c in cubes:
        n = cube_normalize(c, kind)
        if n is not None:
            normal.add(frozenset(n))
    if frozenset() in normal:
        return TRUE
    kept = []
    for c in sorted(normal, key=len):
        if not any(k <= c for k in kept):
            kept.append(c)
    parts = [conj(*sorted(c, key=sort_key)) for c in kept]
    return disj(*sorted(parts, key=sort_key))


def simplify(phi: Formula, cfg: TheoryConfig) -> Formula:
    """Quantifier-free, compacted equivalent of ``phi``."""
    return compact(eliminate_quantifiers(phi, cfg), cfg.kind)


# -- satisfiability --------------------------------------------------------------------


def _search(goals: tuple, lits: tuple, kind: Kind) -> tuple | None:
    """Depth-first search for a consistent cube below the goal list."""
    while goals:
        g, goals = goals[0], goals[1:]
        if isinstance(g, Top):
            continue
        if isinstance(g, Bot):
            return None
        if isinstance(g, And):
            goals = tuple(g.args) + goals
            continue
        if isinstance(g, Or):
            for a in g.args:
                found = _search((a,) + goals, lits, kind)
                if found is not None:
                    return found
            return None
        lits = lits + (g,)
        if not cube_consistent(lits, kind):
            return None
    return lits


@lru_cache(maxsize=100_000)
def _sat_cube(f: Formula, kind: Kind) -> tuple | None:
    return _search((_qe(f, kind),), (), kind)


def decide(phi: Formula, mode: Mode | str, cfg: TheoryConfig) -> bool:
    """SAT: some assignment satisfies ``phi``; VALID: every assignment does."""
    stats.decide_calls += 1
    mode = Mode(mode) if isinstance(mode, str) else mode
    if mode is Mode.SAT:
        return _sat_cube(phi, cfg.kind) is not None
    return _sat_cube(Not(phi), cfg.kind) is None


def satisfiable(phi: Formula, cfg: TheoryConfig) -> bool:
    return decide(phi, Mode.SAT, cfg)


def valid(phi: Formula, cfg: TheoryConfig) -> bool:
    return decide(phi, Mode.VALID, cfg)


def equivalent(phi: Formula, psi: Formula, cfg: TheoryConfig) -> bool:
    if phi == psi:
        return True
    return valid(iff(phi, psi), cfg)


def find_model(phi: Formula, cfg: TheoryConfig, avoid: Iterable[Atom] = (),
               names: Iterable[str] = ()) -> dict | None:
    """A satisfying assignment of the free variables of ``phi``, or ``None``.

    Fresh atoms avoid the declared constants, the constants of ``phi`` and
    ``avoid``.  Free variables not constrained by the witness cube get fresh
    atoms too, as do the extra ``names``.
    """
    cube = _sat_cube(phi, cfg.kind)
    if cube is None:
        return None
    avoid = set(avoid) | set(cfg.declared_constants) | set(constants(phi))
    wanted = free_vars(phi) | set(names)
    extra = sorted(wanted)
    # pin unconstrained variables as distinct from everything via the model builder
    mentioned = {t.name for lit in cube for t in (lit.left, lit.right) if isinstance(t, Var)}
    model = cube_model(cube, cfg.kind, avoid) or {}
    used = set(model.values()) | avoid
    for name in extra:
        if name not in mentioned:
            if cfg.kind is Kind.EQUALITY:
                value = next(_fresh_atoms(cfg.kind, used))
            else:
                value = _pick_between(max(used, default=None), None, used)
            model[name] = value
            used.add(value)
    return {k: v for k, v in model.items() if k in wanted}


# -- evaluation ---------------------------------------------------------------------------


def _value(t: Term, env: Mapping[str, Atom]) -> Atom:
    if isinstance(t, Const):
        return t.value
    try:
        return env[t.name]
    except KeyError:
        raise EvaluationError(f"no binding for free variable {t.name}") from None


def eval_qf(f: Formula, env: Mapping[str, Atom]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return _value(f.left, env) == _value(f.right, env)
    if isinstance(f, Neq):
        return _value(f.left, env) != _value(f.right, env)
    if isinstance(f, Lt):
        return _value(f.left, env) < _value(f.right, env)
    if isinstance(f, And):
        return all(eval_qf(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_qf(a, env) for a in f.args)
    if isinstance(f, Not):
        return not eval_qf(f.arg, env)
    if isinstance(f, Implies):
        return (not eval_qf(f.left, env)) or eval_qf(f.right, env)
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def evaluate(phi: Formula, env: Mapping[str, object], cfg: TheoryConfig) -> bool:
    """Truth of ``phi`` in the canonical countable model under ``env``."""
    missing = free_vars(phi) - set(env)
    if missing:
        raise EvaluationError(f"no binding for free variable(s) {', '.join(sorted(missing))}")
    env = {k: cfg.atom(v) for k, v in env.items()}
    return eval_qf(eliminate_quantifiers(phi, cfg), env)


# -- complete types ---------------------------------------------------------------------


def _set_partitions(items: list) -> Iterator[list]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _ordered_partitions(items: list) -> Iterator[list]:
    for part in _set_partitions(items):
        for perm in itertools.permutations(part):
            yield list(perm)


def enumerate_complete_types(k: int, cfg: TheoryConfig, with_constants: Iterable | bool = False,
                             prefix: str = "x") -> list[Formula]:
    """Complete quantifier-free types of ``k``-tuples, one formula per orbit.

    With ``with_constants`` (``True`` for the declared constants, or an explicit
    iterable), orbits are taken under automorphisms fixing those constants.
    """
    if with_constants is True:
        consts = sorted(cfg.declared_constants, key=lambda a: term_key(Const(a)))
    elif with_constants:
        consts = sorted({cfg.atom(c) for c in with_constants}, key=lambda a: term_key(Const(a)))
    else:
        consts = []
    variables = [Var(f"{prefix}{i}") for i in range(1, k + 1)]
    cterms = [Const(c) for c in consts]
    items = variables + cterms
    out = []
    if cfg.kind is Kind.EQUALITY:
        for part in _set_partitions(items):
            if any(sum(isinstance(t, Const) for t in block) > 1 for block in part):
                continue
            out.append(_type_formula(part, ordered=False))
    else:
        for part in _ordered_partitions(items):
            if any(sum(isinstance(t, Const) for t in block) > 1 for block in part):
                continue
            order = [b for block in part for b in block if isinstance(b, Const)]
            if [c.value for c in order] != sorted(c.value for c in order):
                continue
            out.append(_type_formula(part, ordered=True))
    return sorted(out, key=sort_key)


def _type_formula(blocks: list, ordered: bool) -> Formula:
    lits = []
    reps = []
    for block in blocks:
        block = sorted(block, key=term_key)
        rep = block[0]
        reps.append(rep)
        lits.extend(literal(Eq(rep, t)) for t in block[1:])
    if ordered:
        lits.extend(literal(Lt(a, b)) for a, b in zip(reps, reps[1:]))
    else:
        lits.extend(literal(Neq(a, b)) for a, b in itertools.combinations(reps, 2))
    return conj(*sorted(lits, key=sort_key))
