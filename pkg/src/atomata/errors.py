"""Exception hierarchy shared by every module."""


class AtomataError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AtomataError):
    def __init__(self, message: str, pos: int | None = None, line: int | None = None, source: str | None = None):
        self.message = message
        self.pos = pos
        self.line = line
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.pos is not None:
            where.append(f"offset {self.pos}")
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class TheoryError(AtomataError):
    """Signature violations, undeclared constants, mixed theories."""


class ShapeError(AtomataError):
    """Incompatible tags or arities between definable sets or relations."""


class EvaluationError(AtomataError):
    """Missing bindings or ill-formed elements during evaluation."""


class CapExceeded(AtomataError):
    def __init__(self, what: str, iterations: int):
        self.what = what
        self.iterations = iterations
        super().__init__(f"{what}: iteration cap of {iterations} exceeded")


class InvalidAutomaton(AtomataError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class NotAnEquivalence(AtomataError):
    def __init__(self, law: str, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"relation is not an equivalence: {law} fails")
