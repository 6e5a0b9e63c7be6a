"""Fixed points over definable relations.

Three procedures share the same stopping rule (a stage equal to its
successor, decided by the theory) and the same iteration cap:

* :func:`transitive_closure` accumulates ``R, R^2, ...`` until a power adds
  nothing;
* :func:`reachable` grows a predecessor set from the target vertex and stops
  as soon as it contains the source;
* :func:`lfp` iterates a positive formula template from ``false``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .defset import (
    DefRel,
    DefSet,
    Element,
    Variant,
    equal,
    identity,
    is_subset,
    member,
    preimage,
    rel_union,
    union,
)
from .defset import compose as rel_compose
from .errors import CapExceeded, ShapeError
from .formula import (
    FALSE,
    And,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Pred,
    Var,
    free_vars,
    predicates,
    replace_pred,
    substitute,
)
from .theory import TheoryConfig, equivalent, simplify

DEFAULT_CAP = 1000


def _square(r: DefRel) -> None:
    if r.domain.shape() != r.codomain.shape():
        raise ShapeError("relation must have the same domain and codomain")


def transitive_closure(r: DefRel, cap: int = DEFAULT_CAP) -> tuple[DefRel, int]:
    """Least transitive relation containing ``r`` and the power count ``n``.

    ``n`` is the first index with ``R^(n+1) ⊆ R ∪ ... ∪ R^n``.
    """
    _square(r)
    t = r.simplified()
    n = 1
    while True:
        step = rel_compose(t, r)  # R^2 ∪ ... ∪ R^(n+1)
        if is_subset(step.carrier, t.carrier):
            return t, n
        if n >= cap:
            raise CapExceeded("transitive closure", cap)
        t = rel_union(t, step)
        n += 1


def reflexive_transitive_closure(r: DefRel, cap: int = DEFAULT_CAP) -> tuple[DefRel, int]:
    t, n = transitive_closure(r, cap)
    return rel_union(identity(r.domain), t), n


def reachable(e: DefRel, a: Element, b: Element, cap: int = DEFAULT_CAP) -> bool:
    """Whether ``b`` can be reached from ``a`` along ``e`` (zero steps allowed)."""
    _square(e)
    for x in (a, b):
        if x.tag not in e.domain or e.domain.arity(x.tag) != len(x.atoms):
            raise ShapeError(f"{x} is not shaped like a vertex of the relation")
    theory = e.theory.with_constants(list(a.atoms) + list(b.atoms))
    shape = e.domain.shape()
    start = DefSet.point(theory, b)
    reached = DefSet([start.variant(b.tag)] + [Variant(t, k, FALSE) for t, k in shape.items() if t != b.tag],
                     theory)
    steps = 0
    while True:
        if member(reached, a):
            return True
        if steps >= cap:
            raise CapExceeded("reachability", cap)
        grown = union(reached, preimage(e, reached))
        steps += 1
        if equal(grown, reached):
            return False
        reached = grown


# -- least fixed points -------------------------------------------------------------


@dataclass(frozen=True)
class LfpSpec:
    """``mu name[params] . body`` with ``name`` occurring positively in ``body``."""

    name: str
    params: tuple
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ShapeError("fixpoint parameters must be distinct")
        check_positive(self.body, self.name)

    @property
    def arity(self) -> int:
        return len(self.params)

    def rigid(self) -> tuple:
        """Free variables of the body that are not recursion parameters."""
        return tuple(sorted(free_vars(self.body) - set(self.params)))


def check_positive(f: Formula, name: str, positive: bool = True) -> None:
    if isinstance(f, Pred):
        if f.name == name and not positive:
            raise ShapeError(f"{name} occurs negatively")
    elif isinstance(f, (And, Or)):
        for a in f.args:
            check_positive(a, name, positive)
    elif isinstance(f, Not):
        check_positive(f.arg, name, not positive)
    elif isinstance(f, Implies):
        check_positive(f.left, name, not positive)
        check_positive(f.right, name, positive)
    elif isinstance(f, (Exists, Forall)):
        check_positive(f.body, name, positive)


@dataclass
class StageTrace:
    stages: list = field(default_factory=list)
    stabilized_at: int | None = None


def _plug_params(f: Formula, params: Mapping[str, DefSet]) -> Formula:
    for pname, s in params.items():
        if len(s.variants) != 1:
            raise ShapeError(f"parameter {pname} must have exactly one variant")
        v = s.variants[0]
        f = replace_pred(f, pname, [f"x{i}" for i in range(1, v.arity + 1)], v.constraint)
    return f


def _as_set(f: Formula, spec: LfpSpec, theory: TheoryConfig) -> DefSet:
    names = list(spec.params) + list(spec.rigid())
    g = substitute(f, {n: Var(f"x{i}") for i, n in enumerate(names, 1)})
    return DefSet([Variant(spec.name, len(names), g)], theory)


def lfp(spec: LfpSpec, theory: TheoryConfig, params: Mapping[str, DefSet] | None = None,
        cap: int = DEFAULT_CAP) -> tuple[DefSet, StageTrace]:
    """Iterate ``X0 = false``, ``X(i+1) = body[X := Xi]`` until two stages agree.

    The result is a one-variant set whose coordinates are the recursion
    parameters followed by the rigid free variables in sorted order.
    """
    params = dict(params or {})
    body = _plug_params(spec.body, params)
    leftover = predicates(body) - {spec.name}
    if leftover:
        raise ShapeError(f"unbound relation(s): {', '.join(sorted(leftover))}")
    for s in params.values():
        theory = theory.with_constants(s.theory.declared_constants)
    trace = StageTrace()
    stage = FALSE
    trace.stages.append(_as_set(stage, spec, theory))
    i = 0
    while True:
        nxt = simplify(replace_pred(body, spec.name, spec.params, stage), theory)
        if equivalent(stage, nxt, theory):
            trace.stabilized_at = i
            return trace.stages[-1], trace
        if i >= cap:
            raise CapExceeded(f"fixpoint of {spec.name}", cap)
        stage = nxt
        i += 1
        trace.stages.append(_as_set(stage, spec, theory))

