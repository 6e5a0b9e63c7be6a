"""Command-line interface: ``atomata <verb> ...``.

Verdict commands print ``true`` or ``false`` on their own line and exit 0
either way.  Exit status 2 means a usage error, 3 a parse or theory error,
4 an exceeded iteration cap and 1 any other failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import automata as aut
from . import defset as ds
from . import monoid as mon
from .errors import AtomataError, CapExceeded, ParseError, TheoryError
from .fixpoint import DEFAULT_CAP, lfp, reachable, transitive_closure
from .formula import predicates, to_text
from .register import compile_register_automaton
from .textio import (
    format_automaton,
    format_promonoid,
    format_rel,
    format_set,
    format_word,
    parse_automaton,
    parse_document,
    parse_element,
    parse_formula_text,
    parse_lfp,
    parse_promonoid,
    parse_register_automaton,
    parse_theory,
    parse_word,
)
from .theory import Mode, decide, eliminate_quantifiers, equivalent, stats

RESULT_SCHEMA = {
    "type": "object",
    "required": ["status", "verb", "stats"],
    "properties": {
        "status": {"enum": ["ok", "error"]},
        "verb": {"type": "string"},
        "verdict": {"type": "boolean"},
        "object": {"type": "string"},
        "value": {"type": "integer"},
        "witness": {"type": "string"},
        "details": {"type": "array", "items": {"type": "string"}},
        "error": {
            "type": "object",
            "required": ["kind", "message"],
            "properties": {"kind": {"type": "string"}, "message": {"type": "string"}},
        },
        "stats": {
            "type": "object",
            "required": ["qe_calls", "decide_calls", "wall_time"],
            "properties": {
                "qe_calls": {"type": "integer"},
                "decide_calls": {"type": "integer"},
                "wall_time": {"type": "number"},
                "iterations": {"type": "integer"},
                "seed": {"type": ["integer", "null"]},
            },
        },
    },
    "additionalProperties": False,
}


class UsageError(AtomataError):
    pass


@dataclass
class RunResult:
    verb: str
    status: str = "ok"
    verdict: bool | None = None
    object: str | None = None
    value: int | None = None
    witness: str | None = None
    details: list = field(default_factory=list)
    error: dict | None = None
    stats: dict = field(default_factory=dict)
    # the constructed object behind ``object``; never serialized
    built: object = field(default=None, repr=False)

    def show(self, obj, text: str) -> None:
        self.built = obj
        self.object = text

    def record(self) -> dict:
        out = {"status": self.status, "verb": self.verb, "stats": self.stats}
        for key in ("verdict", "object", "value", "witness", "error"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.details:
            out["details"] = list(self.details)
        return out


def emit(result: RunResult, as_json: bool, out=None, err=None) -> None:
    out = out or sys.stdout
    err = err or sys.stderr
    if as_json:
        out.write(json.dumps(result.record(), sort_keys=True) + "\n")
        if result.status == "error":
            err.write(f"atomata: {result.error['message']}\n")
        return
    if result.status == "error":
        err.write(f"atomata: {result.error['message']}\n")
        return
    if result.verdict is not None:
        out.write(("true" if result.verdict else "false") + "\n")
    # beside a printed object, extra lines become comments so the output still parses
    note = "; " if result.object is not None else ""
    if result.value is not None:
        out.write(f"{note}{result.value}\n" if not note else f"; value: {result.value}\n")
    if result.witness is not None:
        out.write(f"{note}witness: {result.witness}\n")
    for line in result.details:
        out.write(note + line + "\n")
    if result.object is not None:
        out.write(result.object if result.object.endswith("\n") else result.object + "\n")


# -- input helpers ------------------------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _theory(args):
    if args.theory is None:
        return None
    return parse_theory(_read(args.theory), source=args.theory)


def _doc(args, path):
    return parse_document(_read(path), _theory(args), source=path)


def _set(doc, name):
    if name is None:
        if len(doc.sets) != 1:
            raise UsageError("name the set to use: the file defines " + (", ".join(doc.sets) or "no sets"))
        return next(iter(doc.sets.values()))
    try:
        return doc.sets[name]
    except KeyError:
        raise UsageError(f"no set named {name}") from None


def _rel(doc, name):
    """A relation block, or a one-variant set of even arity read as a relation on one vertex variant."""
    if name is None:
        if len(doc.rels) == 1 and not doc.sets:
            return next(iter(doc.rels.values()))
        if len(doc.sets) == 1 and not doc.rels:
            name = next(iter(doc.sets))
        else:
            raise UsageError("name the relation to use")
    if name in doc.rels:
        return doc.rels[name]
    if name in doc.sets:
        s = doc.sets[name]
        if len(s.variants) != 1 or s.variants[0].arity % 2:
            raise UsageError(f"set {name} is not a one-variant set of even arity")
        v = s.variants[0]
        vertices = ds.DefSet.full(s.theory, {v.tag: v.arity // 2})
        return ds.DefRel.of(vertices, vertices, {(v.tag, v.tag): v.constraint})
    raise UsageError(f"no relation named {name}")


def _formula_inputs(args, count):
    items = list(args.inputs)
    cfg = _theory(args)
    if len(items) == count + 1:
        path = items.pop(0)
        file_cfg = parse_theory(_read(path), source=path)
        if cfg is not None and cfg.kind != file_cfg.kind:
            raise TheoryError("theory file and --theory disagree")
        cfg = file_cfg if cfg is None else file_cfg.with_constants(cfg.declared_constants)
    if cfg is None or len(items) != count:
        raise UsageError(f"expected [THEORY-FILE] and {count} formula(s)")
    return cfg, [parse_formula_text(t, cfg, source="<argument>") for t in items]


# -- verbs ---------------------------------------------------------------------------------------------------------


def cmd_formula(args, res):
    if args.verb == "formula-equiv":
        cfg, (f, g) = _formula_inputs(args, 2)
        res.verdict = equivalent(f, g, cfg)
    elif args.verb == "formula-qe":
        cfg, (f,) = _formula_inputs(args, 1)
        qf = eliminate_quantifiers(f, cfg)
        res.show(qf, to_text(qf))
    else:
        cfg, (f,) = _formula_inputs(args, 1)
        res.verdict = decide(f, Mode.SAT if args.verb == "formula-sat" else Mode.VALID, cfg)


def cmd_set_op(args, res):
    doc = _doc(args, args.file)
    op = args.op
    if op in ("union", "intersect", "product", "difference"):
        if args.b is None:
            raise UsageError(f"{op} needs two set names")
        out = ds.combine(op, _set(doc, args.a), _set(doc, args.b))
    elif op == "complement":
        out = ds.combine(op, _set(doc, args.a))
    elif op in ("image", "preimage"):
        if args.b is None:
            raise UsageError(f"{op} needs a relation and a set")
        out = ds.relate(op, _rel(doc, args.a), _set(doc, args.b))
    else:
        if args.b is None:
            raise UsageError("compose needs two relations")
        r = ds.relate(op, _rel(doc, args.a), _rel(doc, args.b))
        res.show(r, format_rel(r, args.name))
        return
    res.show(out, format_set(out, args.name))


def cmd_set_compare(args, res):
    doc = _doc(args, args.file)
    s = _set(doc, args.a)
    t = _set(doc, args.b) if args.mode != "empty" else None
    if args.mode != "empty" and args.b is None:
        raise UsageError(f"{args.mode} needs two set names")
    res.verdict = ds.compare(args.mode, s, t)
    if args.mode == "empty" and not res.verdict:
        res.witness = str(ds.witness(s))


def cmd_set_orbits(args, res):
    doc = _doc(args, args.file)
    res.value = ds.count_orbits(_set(doc, args.name), args.with_constants)


def cmd_closure(args, res):
    doc = _doc(args, args.file)
    t, n = transitive_closure(_rel(doc, args.name), args.cap)
    res.show(t, format_rel(t, "closure"))
    res.value = n
    res.stats["iterations"] = n


def cmd_reach(args, res):
    doc = _doc(args, args.file)
    r = _rel(doc, args.rel)
    a = parse_element(args.source, r.theory, r.domain, source="<argument>")
    b = parse_element(args.target, r.theory, r.domain, source="<argument>")
    res.verdict = reachable(r, a, b, args.cap)


def cmd_lfp(args, res):
    if args.file is not None:
        doc = _doc(args, args.file)
        cfg = doc.theory
        params = {n: s for n, s in doc.sets.items() if len(s.variants) == 1}
    else:
        cfg = _theory(args)
        if cfg is None:
            raise UsageError("lfp needs a set file or --theory")
        params = {}
    spec = parse_lfp(args.spec, cfg, {n: s.variants[0].arity for n, s in params.items()}, source="<argument>")
    used = {n: s for n, s in params.items() if n in predicates(spec.body)}
    out, trace = lfp(spec, cfg, used, args.cap)
    res.show(out, format_set(out, spec.name))
    res.value = trace.stabilized_at
    res.stats["iterations"] = trace.stabilized_at
    res.details = [f"stage {i}: {s.variants[0].constraint}" for i, s in enumerate(trace.stages)]


def _automaton(args, path):
    return parse_automaton(_read(path), _theory(args), source=path)


def cmd_aut_validate(args, res):
    report = aut.validate(_automaton(args, args.file))
    res.verdict = report.ok
    res.details = [report.summary()] + report.issues[1:]
    if report.ok:
        res.details.append(f"deterministic: {'true' if report.deterministic else 'false'}")
        res.details.append(f"total: {'true' if report.total else 'false'}")
    if report.witness is not None:
        res.witness = str(report.witness)


def cmd_aut_accepts(args, res):
    a = _automaton(args, args.file)
    word = parse_word(args.word, a.theory, a.alphabet, source="<argument>")
    res.verdict = aut.accepts(a, word)


def cmd_aut_empty(args, res):
    a = _automaton(args, args.file)
    res.verdict = aut.is_empty(a, args.cap)
    if not res.verdict:
        res.witness = format_word(aut.find_word(a, args.cap))


def cmd_aut_minimize(args, res):
    m = aut.minimize(_automaton(args, args.file), args.cap)
    res.show(m.automaton, format_automaton(m.automaton))
    res.value = m.orbits
    res.stats["iterations"] = m.rounds
    res.details = [f"quotient orbits: {m.orbits}", f"reachable orbits: {m.reachable_orbits}"]


def cmd_aut_equiv(args, res):
    a, b = _automaton(args, args.first), _automaton(args, args.second)
    w = aut.distinguishing_word(a, b, args.cap)
    res.verdict = w is None
    if w is not None:
        res.witness = format_word(w)


def cmd_aut_slice(args, res):
    if args.length < 0:
        raise UsageError("length must be non-negative")
    words = aut.accepted_words_of_length(_automaton(args, args.file), args.length)
    res.show(words, format_set(words, "words"))


def cmd_ra_compile(args, res):
    ra = parse_register_automaton(_read(args.file), _theory(args), source=args.file)
    a = compile_register_automaton(ra)
    res.show(a, format_automaton(a))


def _promonoid(args, path, want_recognizer=False):
    p = parse_promonoid(_read(path), _theory(args), source=path)
    if want_recognizer and not isinstance(p, mon.Recognizer):
        raise UsageError(f"{path} defines a promonoid without recognizer data")
    return p


def cmd_mon_laws(args, res):
    p = _promonoid(args, args.file)
    if isinstance(p, mon.Recognizer):
        p = p.promonoid
    report = mon.check_laws(p)
    res.verdict = report.ok
    res.details = mon.describe_laws(report).splitlines()
    bad = next((r for r in report.results if not r.holds and r.witness is not None), None)
    if bad is not None:
        res.witness = str(bad.witness)


def cmd_mon_from_aut(args, res):
    r = mon.from_nfa(_automaton(args, args.file))
    res.show(r, format_promonoid(r))


def cmd_mon_recognizes(args, res):
    r = _promonoid(args, args.file, want_recognizer=True)
    word = parse_word(args.word, r.theory, r.alphabet, source="<argument>")
    res.verdict = mon.recognizes(r, word)


def cmd_mon_to_aut(args, res):
    a = mon.to_nfa(_promonoid(args, args.file, want_recognizer=True))
    res.show(a, format_automaton(a))


# -- argument parsing ----------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", metavar="FILE", help="theory header file used when inputs lack one")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="iteration cap for fixed points")
    common.add_argument("--json", action="store_true", help="print one JSON record")
    common.add_argument("--seed", type=int, default=None, help="recorded in stats; the engine is deterministic")

    parser = argparse.ArgumentParser(prog="atomata", parents=[common],
                                     description="Definable sets, automata and promonoids over atoms.")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    for name, n, help_ in (("formula-sat", 1, "satisfiability of a formula"),
                           ("formula-valid", 1, "validity of a formula"),
                           ("formula-equiv", 2, "equivalence of two formulas"),
                           ("formula-qe", 1, "eliminate quantifiers")):
        p = verb(name, cmd_formula, help_)
        p.add_argument("inputs", nargs="+", metavar="ARG", help=f"[THEORY-FILE] then {n} formula(s)")

    p = verb("set-op", cmd_set_op, "Boolean, product and relational operations")
    p.add_argument("op", choices=["union", "intersect", "complement", "product", "difference",
                                  "image", "preimage", "compose"])
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b", nargs="?")
    p.add_argument("--name", default="result", help="name of the printed block")

    p = verb("set-compare", cmd_set_compare, "emptiness, inclusion and equality")
    p.add_argument("mode", choices=["empty", "subset", "equal"])
    p.add_argument("file")
    p.add_argument("a", nargs="?")
    p.add_argument("b", nargs="?")

    p = verb("set-orbits", cmd_set_orbits, "count orbits of a set")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--with-constants", action="store_true", help="fix the declared and used constants")

    p = verb("closure", cmd_closure, "transitive closure of a relation")
    p.add_argument("file")
    p.add_argument("name", nargs="?")

    p = verb("reach", cmd_reach, "reachability along a relation")
    p.add_argument("file")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--rel", default=None, help="relation or set name in FILE")

    p = verb("lfp", cmd_lfp, "least fixed point of (mu X (y ...) body)")
    p.add_argument("spec")
    p.add_argument("file", nargs="?", help="sets usable as relations in the body")

    p = verb("aut-validate", cmd_aut_validate, "check automaton invariants")
    p.add_argument("file")
    p = verb("aut-accepts", cmd_aut_accepts, "run an automaton on a word")
    p.add_argument("file")
    p.add_argument("word")
    p = verb("aut-empty", cmd_aut_empty, "language emptiness")
    p.add_argument("file")
    p = verb("aut-minimize", cmd_aut_minimize, "minimize a deterministic automaton")
    p.add_argument("file")
    p = verb("aut-equiv", cmd_aut_equiv, "language equivalence of deterministic automata")
    p.add_argument("first")
    p.add_argument("second")
    p = verb("aut-slice", cmd_aut_slice, "accepted words of a given length")
    p.add_argument("file")
    p.add_argument("length", type=int)
    p = verb("ra-compile", cmd_ra_compile, "compile a register automaton")
    p.add_argument("file")
    p = verb("mon-laws", cmd_mon_laws, "check promonoid laws")
    p.add_argument("file")
    p = verb("mon-from-aut", cmd_mon_from_aut, "recognizer of an automaton")
    p.add_argument("file")
    p = verb("mon-recognizes", cmd_mon_recognizes, "run a recognizer on a word")
    p.add_argument("file")
    p.add_argument("word")
    p = verb("mon-to-aut", cmd_mon_to_aut, "automaton of a recognizer")
    p.add_argument("file")
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, UsageError):
        return 2
    if isinstance(exc, (ParseError, TheoryError)):
        return 3
    if isinstance(exc, CapExceeded):
        return 4
    return 1


def execute(argv: list[str]) -> tuple[RunResult, int, bool]:
    parser = build_parser()
    args = parser.parse_args(argv)
    res = RunResult(args.verb)
    stats.qe_calls = 0
    stats.decide_calls = 0
    started = time.perf_counter()
    code = 0
    it = None
    try:
        if args.cap < 0:
            raise UsageError("--cap must be non-negative")
        args.fn(args, res)
    except AtomataError as e:
        code = _exit_code(e)
        it = res.stats.get("iterations", getattr(e, "iterations", None))
        res = RunResult(args.verb, status="error", error={"kind": type(e).__name__, "message": str(e)})
    if res.status == "error" and it is not None:
        res.stats["iterations"] = it
    res.stats.update(qe_calls=stats.qe_calls, decide_calls=stats.decide_calls,
                     wall_time=round(time.perf_counter() - started, 6), seed=args.seed)
    return res, code, args.json


def main(argv: list[str] | None = None) -> int:
    try:
        res, code, as_json = execute(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:  # argparse usage errors
        return int(e.code or 0)
    emit(res, as_json)
    return code


if __name__ == "__main__":
    sys.exit(main())
