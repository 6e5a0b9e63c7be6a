"""Definable sets and relations.

A :class:`DefSet` is a finite disjoint union of variants; each variant has a
tag, an arity ``k`` and a constraint formula over the coordinates
``x1 .. xk``.  Relations are definable sets over a split context: a
:class:`DefRel` keeps its domain and codomain and stores one variant per
``(domain tag, codomain tag)`` pair whose coordinates are the domain's
followed by the codomain's.

All operations return fresh values with quantifier-free, compacted
constraints.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import EvaluationError, NotAnEquivalence, ShapeError, TheoryError
from .formula import (
    FALSE,
    TRUE,
    Const,
    Formula,
    Not,
    Term,
    Var,
    atom_str,
    conj,
    constants,
    coords,
    disj,
    eqs,
    exists_many,
    free_vars,
    substitute,
)
from .theory import (
    TheoryConfig,
    enumerate_complete_types,
    evaluate,
    find_model,
    satisfiable,
    simplify,
    valid,
)

Tag = Hashable


def tag_str(tag: Tag) -> str:
    if isinstance(tag, tuple):
        return "[" + ",".join(tag_str(t) for t in tag) + "]"
    return str(tag)


@dataclass(frozen=True)
class Variant:
    tag: Tag
    arity: int
    constraint: Formula

    def __post_init__(self):
        allowed = {f"x{i}" for i in range(1, self.arity + 1)}
        extra = free_vars(self.constraint) - allowed
        if extra:
            raise ShapeError(f"variant {tag_str(self.tag)} of arity {self.arity} mentions {sorted(extra)}")


@dataclass(frozen=True)
class Element:
    tag: Tag
    atoms: tuple

    def __str__(self) -> str:
        return f"{tag_str(self.tag)}(" + ",".join("@" + atom_str(a) for a in self.atoms) + ")"


def inst(f: Formula, args: Sequence[Term]) -> Formula:
    """Substitute ``args`` for the coordinates ``x1 .. xn`` of ``f``."""
    return substitute(f, {f"x{i}": t for i, t in enumerate(args, 1)})


def join_theories(*cfgs: TheoryConfig) -> TheoryConfig:
    kinds = {c.kind for c in cfgs}
    if len(kinds) != 1:
        raise TheoryError("inputs are defined over different theories")
    consts = frozenset().union(*(c.declared_constants for c in cfgs))
    return TheoryConfig(cfgs[0].kind, consts)


class DefSet:
    """A finite tagged union of formula-constrained atom tuples."""

    __slots__ = ("variants", "theory", "_index")

    def __init__(self, variants: Iterable[Variant], theory: TheoryConfig):
        variants = tuple(variants)
        index = {}
        for v in variants:
            if v.tag in index:
                raise ShapeError(f"duplicate tag {tag_str(v.tag)}")
            index[v.tag] = v
        self.variants = variants
        self.theory = theory
        self._index = index

    @classmethod
    def of(cls, theory: TheoryConfig, spec: Mapping[Tag, tuple]) -> "DefSet":
        """Build from ``{tag: (arity, formula)}``."""
        return cls((Variant(t, a, f) for t, (a, f) in spec.items()), theory)

    @classmethod
    def full(cls, theory: TheoryConfig, shape: Mapping[Tag, int]) -> "DefSet":
        return cls((Variant(t, a, TRUE) for t, a in shape.items()), theory)

    @classmethod
    def empty(cls, theory: TheoryConfig, shape: Mapping[Tag, int] | None = None) -> "DefSet":
        return cls((Variant(t, a, FALSE) for t, a in (shape or {}).items()), theory)

    @classmethod
    def point(cls, theory: TheoryConfig, e: Element) -> "DefSet":
        cs = coords("x", len(e.atoms))
        return cls([Variant(e.tag, len(e.atoms), eqs(cs, [Const(a) for a in e.atoms]))], theory)

    # -- access
    @property
    def tags(self) -> tuple:
        return tuple(v.tag for v in self.variants)

    def shape(self) -> dict:
        return {v.tag: v.arity for v in self.variants}

    def __contains__(self, tag: Tag) -> bool:
        return tag in self._index

    def variant(self, tag: Tag) -> Variant:
        try:
            return self._index[tag]
        except KeyError:
            raise ShapeError(f"unknown tag {tag_str(tag)}") from None

    def arity(self, tag: Tag) -> int:
        return self.variant(tag).arity

    def constraint(self, tag: Tag) -> Formula:
        v = self._index.get(tag)
        return FALSE if v is None else v.constraint

    def at(self, tag: Tag, args: Sequence[Term]) -> Formula:
        v = self._index.get(tag)
        if v is None:
            return FALSE
        if len(args) != v.arity:
            raise ShapeError(f"tag {tag_str(tag)} has arity {v.arity}, got {len(args)} arguments")
        return inst(v.constraint, args)

    def map(self, fn) -> "DefSet":
        return DefSet((Variant(v.tag, v.arity, fn(v)) for v in self.variants), self.theory)

    def simplified(self) -> "DefSet":
        return self.map(lambda v: simplify(v.constraint, self.theory))

    def embed(self, ambient: "DefSet") -> "DefSet":
        """The same subset, listed with every tag of ``ambient`` (absent tags are empty)."""
        shape = ambient.shape()
        for v in self.variants:
            if shape.get(v.tag) != v.arity:
                raise ShapeError(f"variant {tag_str(v.tag)}/{v.arity} is not part of the ambient set")
        return DefSet((Variant(t, k, self.constraint(t)) for t, k in shape.items()),
                      join_theories(self.theory, ambient.theory))

    def nonempty_variants(self) -> "DefSet":
        return DefSet((v for v in self.variants if satisfiable(v.constraint, self.theory)), self.theory)

    def constants(self) -> frozenset:
        return frozenset().union(*(constants(v.constraint) for v in self.variants))

    def with_theory(self, theory: TheoryConfig) -> "DefSet":
        return DefSet(self.variants, theory)

    def __repr__(self) -> str:
        body = "; ".join(f"{tag_str(v.tag)}/{v.arity}: {v.constraint}" for v in self.variants)
        return f"DefSet({body})"


# -- membership -----------------------------------------------------------------------


def member(s: DefSet, e: Element) -> bool:
    if e.tag not in s:
        raise EvaluationError(f"unknown tag {tag_str(e.tag)}")
    v = s.variant(e.tag)
    if len(e.atoms) != v.arity:
        raise EvaluationError(f"element {e} has {len(e.atoms)} coordinates, variant expects {v.arity}")
    env = {f"x{i}": a for i, a in enumerate(e.atoms, 1)}
    return evaluate(v.constraint, env, s.theory)


# -- Boolean algebra and products -----------------------------------------------------------


class SetOp(enum.Enum):
    UNION = "union"
    INTERSECT = "intersect"
    COMPLEMENT = "complement"
    PRODUCT = "product"
    DIFFERENCE = "difference"


def _merged_shape(s: DefSet, t: DefSet) -> dict:
    shape = dict(s.shape())
    for tag, arity in t.shape().items():
        if shape.setdefault(tag, arity) != arity:
            raise ShapeError(f"tag {tag_str(tag)} has arity {shape[tag]} on one side and {arity} on the other")
    return shape


def combine(op: SetOp | str, s: DefSet, t: DefSet | None = None) -> DefSet:
    op = SetOp(op) if isinstance(op, str) else op
    if op is SetOp.COMPLEMENT:
        return DefSet((Variant(v.tag, v.arity, simplify(Not(v.constraint), s.theory)) for v in s.variants),
                      s.theory)
    if t is None:
        raise ShapeError(f"{op.value} needs two operands")
    theory = join_theories(s.theory, t.theory)
    if op is SetOp.PRODUCT:
        out = []
        for a in s.variants:
            for b in t.variants:
                shifted = inst(b.constraint, coords("x", b.arity, start=a.arity + 1))
                out.append(Variant((a.tag, b.tag), a.arity + b.arity, simplify(conj(a.constraint, shifted), theory)))
        return DefSet(out, theory)
    shape = _merged_shape(s, t)
    out = []
    for tag, arity in shape.items():
        f, g = s.constraint(tag), t.constraint(tag)
        if op is SetOp.UNION:
            h = disj(f, g)
        elif op is SetOp.INTERSECT:
            h = conj(f, g)
        else:
            h = conj(f, Not(g))
        out.append(Variant(tag, arity, simplify(h, theory)))
    return DefSet(out, theory)


def union(s: DefSet, t: DefSet) -> DefSet:
    return combine(SetOp.UNION, s, t)


def intersect(s: DefSet, t: DefSet) -> DefSet:
    return combine(SetOp.INTERSECT, s, t)


def complement(s: DefSet) -> DefSet:
    return combine(SetOp.COMPLEMENT, s)


def product(s: DefSet, t: DefSet) -> DefSet:
    return combine(SetOp.PRODUCT, s, t)


def difference(s: DefSet, t: DefSet) -> DefSet:
    return combine(SetOp.DIFFERENCE, s, t)


# -- comparisons -------------------------------------------------------------------------------


class CompareMode(enum.Enum):
    EMPTY = "empty"
    SUBSET = "subset"
    EQUAL = "equal"


def is_empty(s: DefSet) -> bool:
    return not any(satisfiable(v.constraint, s.theory) for v in s.variants)


def is_subset(s: DefSet, t: DefSet) -> bool:
    theory = join_theories(s.theory, t.theory)
    _merged_shape(s, t)
    return all(valid(Not(conj(v.constraint, Not(t.constraint(v.tag)))), theory) for v in s.variants)


def compare(mode: CompareMode | str, s: DefSet, t: DefSet | None = None) -> bool:
    mode = CompareMode(mode) if isinstance(mode, str) else mode
    if mode is CompareMode.EMPTY:
        return is_empty(s)
    if t is None:
        raise ShapeError(f"{mode.value} needs two operands")
    if mode is CompareMode.SUBSET:
        return is_subset(s, t)
    return is_subset(s, t) and is_subset(t, s)


def equal(s: DefSet, t: DefSet) -> bool:
    return compare(CompareMode.EQUAL, s, t)


def witness(s: DefSet, avoid: Iterable = ()) -> Element | None:
    """Some concrete element of ``s``, or ``None`` when it is empty."""
    for v in s.variants:
        names = [f"x{i}" for i in range(1, v.arity + 1)]
        model = find_model(v.constraint, s.theory, avoid, names)
        if model is not None:
            return Element(v.tag, tuple(model[n] for n in names))
    return None


# -- relations ---------------------------------------------------------------------------------------


class DefRel:
    """A definable relation between two definable sets."""

    __slots__ = ("domain", "codomain", "carrier")

    def __init__(self, domain: DefSet, codomain: DefSet, carrier: DefSet):
        for v in carrier.variants:
            if not (isinstance(v.tag, tuple) and len(v.tag) == 2):
                raise ShapeError(f"relation variant tag {tag_str(v.tag)} is not a (domain, codomain) pair")
            dt, ct = v.tag
            if dt not in domain or ct not in codomain:
                raise ShapeError(f"relation variant {tag_str(v.tag)} does not match domain/codomain tags")
            if domain.arity(dt) + codomain.arity(ct) != v.arity:
                raise ShapeError(f"relation variant {tag_str(v.tag)} has arity {v.arity}, "
                                 f"expected {domain.arity(dt)} + {codomain.arity(ct)}")
        self.domain = domain
        self.codomain = codomain
        self.carrier = carrier

    @classmethod
    def of(cls, domain: DefSet, codomain: DefSet, spec: Mapping[tuple, Formula]) -> "DefRel":
        theory = join_theories(domain.theory, codomain.theory)
        variants = []
        for (dt, ct), f in spec.items():
            variants.append(Variant((dt, ct), domain.arity(dt) + codomain.arity(ct), f))
        return cls(domain, codomain, DefSet(variants, theory))

    @property
    def theory(self) -> TheoryConfig:
        return self.carrier.theory

    def pairs(self) -> Iterable[tuple]:
        return (v.tag for v in self.carrier.variants)

    def at(self, dt: Tag, ct: Tag, dargs: Sequence[Term], cargs: Sequence[Term]) -> Formula:
        return self.carrier.at((dt, ct), list(dargs) + list(cargs))

    def formula(self, dt: Tag, ct: Tag) -> Formula:
        return self.carrier.constraint((dt, ct))

    def simplified(self) -> "DefRel":
        return DefRel(self.domain, self.codomain, self.carrier.simplified())

    def inverse(self) -> "DefRel":
        spec = {}
        for v in self.carrier.variants:
            dt, ct = v.tag
            m, n = self.domain.arity(dt), self.codomain.arity(ct)
            spec[(ct, dt)] = inst(v.constraint, list(coords("x", m, start=n + 1)) + list(coords("x", n)))
        return DefRel.of(self.codomain, self.domain, spec)

    def __repr__(self) -> str:
        return f"DefRel({self.carrier!r})"


def identity(s: DefSet) -> DefRel:
    spec = {}
    for v in s.variants:
        xs = coords("x", v.arity)
        ys = coords("x", v.arity, start=v.arity + 1)
        spec[(v.tag, v.tag)] = simplify(conj(v.constraint, eqs(xs, ys)), s.theory)
    return DefRel.of(s, s, spec)


def full_relation(domain: DefSet, codomain: DefSet) -> DefRel:
    return DefRel(domain, codomain, product(domain, codomain))


def as_relation(s: DefSet, domain: DefSet, codomain: DefSet) -> DefRel:
    return DefRel(domain, codomain, s)


def rel_union(r: DefRel, q: DefRel) -> DefRel:
    return DefRel(r.domain, r.codomain, union(r.carrier, q.carrier))


def rel_equal(r: DefRel, q: DefRel) -> bool:
    return equal(r.carrier, q.carrier)


def rel_subset(r: DefRel, q: DefRel) -> bool:
    return is_subset(r.carrier, q.carrier)


class RelOp(enum.Enum):
    IMAGE = "image"
    PREIMAGE = "preimage"
    COMPOSE = "compose"


def _names(prefix: str, n: int) -> list[Var]:
    return [Var(f"{prefix}{i}") for i in range(1, n + 1)]


def image(r: DefRel, s: DefSet) -> DefSet:
    theory = join_theories(r.theory, s.theory)
    parts: dict = {ct: [] for ct in r.codomain.tags}
    for dt, ct in r.pairs():
        if dt not in s:
            continue
        ds = _names("d", r.domain.arity(dt))
        ys = coords("x", r.codomain.arity(ct))
        parts[ct].append(exists_many([d.name for d in ds], conj(s.at(dt, ds), r.at(dt, ct, ds, ys))))
    return DefSet((Variant(ct, r.codomain.arity(ct), simplify(disj(*fs), theory)) for ct, fs in parts.items()),
                  theory)


def preimage(r: DefRel, s: DefSet) -> DefSet:
    return image(r.inverse(), s)


def compose(r: DefRel, q: DefRel) -> DefRel:
    """Relational composite: first ``r``, then ``q``."""
    theory = join_theories(r.theory, q.theory)
    spec: dict = {}
    for at_, bt in r.pairs():
        for bt2, ct in q.pairs():
            if bt2 != bt:
                continue
            m, k, n = r.domain.arity(at_), r.codomain.arity(bt), q.codomain.arity(ct)
            xs = coords("x", m)
            mids = _names("m", k)
            zs = coords("x", n, start=m + 1)
            body = exists_many([v.name for v in mids], conj(r.at(at_, bt, xs, mids), q.at(bt, ct, mids, zs)))
            spec.setdefault((at_, ct), []).append(body)
    out = {key: simplify(disj(*fs), theory) for key, fs in spec.items()}
    return DefRel.of(r.domain, q.codomain, {k: f for k, f in out.items() if f != FALSE})


def relate(op: RelOp | str, r: DefRel, arg):
    op = RelOp(op) if isinstance(op, str) else op
    if op is RelOp.IMAGE:
        _check_over(arg, r.domain, "image argument")
        return image(r, arg)
    if op is RelOp.PREIMAGE:
        _check_over(arg, r.codomain, "preimage argument")
        return preimage(r, arg)
    if not isinstance(arg, DefRel):
        raise ShapeError("compose needs a relation")
    if arg.domain.shape() != r.codomain.shape():
        raise ShapeError("compose: the second relation's domain must be the first relation's codomain")
    return compose(r, arg)


def _check_over(s, ambient: DefSet, what: str) -> None:
    if not isinstance(s, DefSet):
        raise ShapeError(f"{what} must be a definable set")
    shape = ambient.shape()
    for v in s.variants:
        if v.tag not in shape or shape[v.tag] != v.arity:
            raise ShapeError(f"{what}: variant {tag_str(v.tag)}/{v.arity} is not part of the ambient set")


def is_function(r: DefRel) -> bool:
    """Total on the domain and single-valued."""
    return is_total(r) and is_single_valued(r)


def is_total(r: DefRel) -> bool:
    theory = r.theory
    for v in r.domain.variants:
        xs = coords("x", v.arity)
        options = []
        for dt, ct in r.pairs():
            if dt != v.tag:
                continue
            ys = _names("y", r.codomain.arity(ct))
            options.append(exists_many([y.name for y in ys], r.at(dt, ct, xs, ys)))
        if not valid(Not(conj(v.constraint, Not(disj(*options)))), theory):
            return False
    return True


def is_single_valued(r: DefRel) -> bool:
    theory = r.theory
    pairs = list(r.pairs())
    for dt, c1 in pairs:
        for dt2, c2 in pairs:
            if dt2 != dt:
                continue
            xs = coords("x", r.domain.arity(dt))
            ys = _names("y", r.codomain.arity(c1))
            zs = _names("z", r.codomain.arity(c2))
            both = conj(r.at(dt, c1, xs, ys), r.at(dt, c2, xs, zs))
            if c1 != c2:
                if satisfiable(both, theory):
                    return False
            elif not valid(Not(conj(both, Not(eqs(ys, zs)))), theory):
                return False
    return True


# -- quotients ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientSet:
    base: DefSet
    eq: DefRel


def equivalence_failure(base: DefSet, eq: DefRel) -> tuple[str, Element | None] | None:
    """The first violated equivalence law with a witness, or ``None``."""
    theory = join_theories(base.theory, eq.theory)
    tags = base.tags

    def ar(t):
        return base.arity(t)

    for t in tags:
        xs = coords("x", ar(t))
        bad = conj(base.at(t, xs), Not(eq.at(t, t, xs, xs)))
        if satisfiable(bad, theory):
            return "reflexivity", _witness_of(bad, t, xs, theory)
    for t1 in tags:
        for t2 in tags:
            xs, ys = _names("a", ar(t1)), _names("b", ar(t2))
            bad = conj(base.at(t1, xs), base.at(t2, ys), eq.at(t1, t2, xs, ys), Not(eq.at(t2, t1, ys, xs)))
            if satisfiable(bad, theory):
                return "symmetry", _witness_of(bad, t1, xs, theory)
    for t1 in tags:
        for t2 in tags:
            for t3 in tags:
                xs, ys, zs = _names("a", ar(t1)), _names("b", ar(t2)), _names("c", ar(t3))
                bad = conj(base.at(t1, xs), base.at(t2, ys), base.at(t3, zs),
                           eq.at(t1, t2, xs, ys), eq.at(t2, t3, ys, zs), Not(eq.at(t1, t3, xs, zs)))
                if satisfiable(bad, theory):
                    return "transitivity", _witness_of(bad, t1, xs, theory)
    return None


def _witness_of(f: Formula, tag: Tag, xs: Sequence[Var], theory: TheoryConfig) -> Element | None:
    model = find_model(f, theory, names=[x.name for x in xs])
    if model is None:
        return None
    return Element(tag, tuple(model[x.name] for x in xs))


class QuotientHandle:
    """Classes of a definable equivalence, represented by arbitrary members."""

    def __init__(self, q: QuotientSet):
        self.q = q

    def class_member(self, e: Element) -> bool:
        return member(self.q.base, e)

    def class_equal(self, e: Element, f: Element) -> bool:
        if not (self.class_member(e) and self.class_member(f)):
            raise EvaluationError("class_equal expects members of the base set")
        g = self.q.eq.formula(e.tag, f.tag)
        env = {f"x{i}": a for i, a in enumerate(list(e.atoms) + list(f.atoms), 1)}
        return evaluate(g, env, self.q.eq.theory)


def quotient(q: QuotientSet) -> QuotientHandle:
    failure = equivalence_failure(q.base, q.eq)
    if failure is not None:
        law, w = failure
        raise NotAnEquivalence(law, w)
    return QuotientHandle(q)


# -- orbits ---------------------------------------------------------------------------------------------


def orbit_constants(s: DefSet, with_constants: bool | Iterable = False) -> tuple:
    if with_constants is True:
        return tuple(sorted(set(s.theory.declared_constants) | set(s.constants()), key=str))
    if with_constants:
        return tuple(with_constants)
    return ()


def count_orbits(s: DefSet, with_constants: bool | Iterable = False) -> int:
    """Number of orbits of complete types meeting ``s``, summed over variants."""
    consts = orbit_constants(s, with_constants)
    total = 0
    for v in s.variants:
        for tau in enumerate_complete_types(v.arity, s.theory, consts):
            if satisfiable(conj(tau, v.constraint), s.theory):
                total += 1
    return total


def quotient_orbits(base: DefSet, eq: DefRel, with_constants: bool | Iterable = False) -> int:
    """Orbits of ``base / eq``: orbits of ``base`` merged when some members are related."""
    consts = orbit_constants(base, with_constants)
    types = []
    for v in base.variants:
        for tau in enumerate_complete_types(v.arity, base.theory, consts):
            if satisfiable(conj(tau, v.constraint), base.theory):
                types.append((v.tag, tau))
    parent = list(range(len(types)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    theory = join_theories(base.theory, eq.theory)
    for i, (t1, tau1) in enumerate(types):
        for j in range(i + 1, len(types)):
            t2, tau2 = types[j]
            if find(i) == find(j):
                continue
            xs = _names("a", base.arity(t1))
            ys = _names("b", base.arity(t2))
            f = conj(inst(tau1, xs), inst(tau2, ys), eq.at(t1, t2, xs, ys))
            if satisfiable(f, theory):
                parent[find(j)] = find(i)
    return len({find(i) for i in range(len(types))})
