"""Register automata and their compilation to definable automata.

Edge formulas speak about the reserved names ``in1 .. inm`` (the letter's
atoms), ``r1 .. rk`` (registers before the move) and ``r1' .. rk'``
(registers after it).  A register may also hold the blank value, written
``(bot r1)`` in formulas; blank is outside the atom domain, equal only to
itself and incomparable under ``<``.

Compilation turns every control label into one state variant per pattern of
blank registers, with the non-blank registers as coordinates.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Mapping, Sequence

from .automata import Automaton, build
from .defset import DefSet, Tag, Variant, tag_str
from .errors import InvalidAutomaton
from .formula import (
    FALSE,
    TRUE,
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Lt,
    Neq,
    Not,
    Or,
    Pred,
    Term,
    Var,
    disj,
    free_vars,
    substitute,
)
from .theory import TheoryConfig, simplify

BOTTOM = "bot"
_REGISTER = re.compile(r"r([1-9][0-9]*)('?)$")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    letter: Tag
    formula: Formula


@dataclass(frozen=True, eq=False)
class RegisterAutomaton:
    theory: TheoryConfig
    alphabet: DefSet
    control: tuple
    registers: int
    initial: Mapping[str, Formula]
    final: Mapping[str, Formula]
    edges: tuple = field(default_factory=tuple)

    @property
    def nullable(self) -> bool:
        """Whether some formula mentions blank registers."""
        fs = [e.formula for e in self.edges] + list(self.initial.values()) + list(self.final.values())
        return any(_mentions_bottom(f) for f in fs)


def _mentions_bottom(f: Formula) -> bool:
    if isinstance(f, Pred):
        return f.name == BOTTOM
    if isinstance(f, (And, Or)):
        return any(_mentions_bottom(a) for a in f.args)
    if isinstance(f, Not):
        return _mentions_bottom(f.arg)
    if isinstance(f, Implies):
        return _mentions_bottom(f.left) or _mentions_bottom(f.right)
    if isinstance(f, (Exists, Forall)):
        return _mentions_bottom(f.body)
    return False


def state_tag(label: str, mask: Sequence[bool]) -> str:
    blanks = [str(i) for i, full in enumerate(mask, 1) if not full]
    return label if not blanks else f"{label}__bot" + "_".join(blanks)


def _check_names(f: Formula, allowed: set, where: str) -> None:
    extra = free_vars(f) - allowed
    if extra:
        raise InvalidAutomaton(f"{where}: unexpected variable(s) {', '.join(sorted(extra))}")
    _check_binders(f, allowed, where)


def _check_binders(f: Formula, reserved: set, where: str) -> None:
    if isinstance(f, (Exists, Forall)):
        if f.var in reserved:
            raise InvalidAutomaton(f"{where}: reserved name {f.var} is quantified")
        _check_binders(f.body, reserved, where)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _check_binders(a, reserved, where)
    elif isinstance(f, Not):
        _check_binders(f.arg, reserved, where)
    elif isinstance(f, Implies):
        _check_binders(f.left, reserved, where)
        _check_binders(f.right, reserved, where)
    elif isinstance(f, Pred):
        if f.name != BOTTOM or len(f.args) != 1 or not isinstance(f.args[0], Var) \
                or not _REGISTER.match(f.args[0].name):
            raise InvalidAutomaton(f"{where}: only (bot <register>) may be used as a relation")


def fold_blanks(f: Formula, blank: set) -> Formula:
    """Decide every literal that mentions a blank register."""

    def is_blank(t: Term) -> bool:
        return isinstance(t, Var) and t.name in blank

    def go(g: Formula) -> Formula:
        if isinstance(g, Pred):
            return TRUE if g.args[0].name in blank else FALSE
        if isinstance(g, (Eq, Neq, Lt)):
            lb, rb = is_blank(g.left), is_blank(g.right)
            if not (lb or rb):
                return g
            if isinstance(g, Lt):
                return FALSE
            same = lb and rb
            return (TRUE if same else FALSE) if isinstance(g, Eq) else (FALSE if same else TRUE)
        if isinstance(g, And):
            return And(tuple(go(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(go(a) for a in g.args))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        return g

    return go(f)


def _register_map(k: int, mask: Sequence[bool], start: int, primed: bool) -> tuple[dict, set]:
    """Coordinates for the non-blank registers, and the names of the blank ones."""
    mapping, blank = {}, set()
    pos = start
    suffix = "'" if primed else ""
    for i in range(1, k + 1):
        if mask[i - 1]:
            mapping[f"r{i}{suffix}"] = Var(f"x{pos}")
            pos += 1
        else:
            blank.add(f"r{i}{suffix}")
    return mapping, blank


def compile_register_automaton(ra: RegisterAutomaton) -> Automaton:
    th = ra.theory
    k = ra.registers
    labels = set(ra.control)
    if len(labels) != len(ra.control):
        raise InvalidAutomaton("duplicate control label")
    regs = {f"r{i}" for i in range(1, k + 1)}
    nexts = {f"r{i}'" for i in range(1, k + 1)}
    masks = list(iproduct([True, False], repeat=k)) if ra.nullable else [(True,) * k]

    for where, table in (("initial", ra.initial), ("final", ra.final)):
        for label, f in table.items():
            if label not in labels:
                raise InvalidAutomaton(f"{where} label {label} is not a control state")
            _check_names(f, regs, f"{where} condition of {label}")
    for e in ra.edges:
        where = f"edge {e.source} -> {e.target} on {tag_str(e.letter)}"
        if e.source not in labels or e.target not in labels:
            raise InvalidAutomaton(f"{where}: unknown control state")
        if e.letter not in ra.alphabet:
            raise InvalidAutomaton(f"{where}: unknown letter")
        inputs = {f"in{i}" for i in range(1, ra.alphabet.arity(e.letter) + 1)}
        _check_names(e.formula, inputs | regs | nexts, where)

    states = DefSet([Variant(state_tag(label, m), sum(m), TRUE) for label in ra.control for m in masks], th)

    def subset(table: Mapping[str, Formula]) -> DefSet:
        out = []
        for label, f in table.items():
            for m in masks:
                mapping, blank = _register_map(k, m, 1, primed=False)
                g = simplify(substitute(fold_blanks(f, blank), mapping), th)
                if g != FALSE:
                    out.append(Variant(state_tag(label, m), sum(m), g))
        return DefSet(out, th)

    delta: dict = {}
    for e in ra.edges:
        n_in = ra.alphabet.arity(e.letter)
        inputs = {f"in{i}": Var(f"x{i}") for i in range(1, n_in + 1)}
        for ms in masks:
            cur, blank_cur = _register_map(k, ms, n_in + 1, primed=False)
            for md in masks:
                nxt, blank_nxt = _register_map(k, md, n_in + sum(ms) + 1, primed=True)
                g = fold_blanks(e.formula, blank_cur | blank_nxt)
                g = simplify(substitute(g, {**inputs, **cur, **nxt}), th)
                if g == FALSE:
                    continue
                key = (e.letter, state_tag(e.source, ms), state_tag(e.target, md))
                delta[key] = disj(delta[key], g) if key in delta else g
    delta = {key: simplify(f, th) for key, f in delta.items()}
    return build(ra.alphabet, states, subset(ra.initial), subset(ra.final), delta)

