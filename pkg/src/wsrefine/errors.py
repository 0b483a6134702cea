"""Exception hierarchy shared by every wsrefine module."""

from __future__ import annotations


class WsrefineError(Exception):
    """Base class for all library errors."""


class ParseError(WsrefineError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        where = f"{line}:{col}: " if line else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class ArityError(ParseError):
    pass


class FreeVarError(ParseError):
    def __init__(self, names, line: int = 0, col: int = 0):
        self.names = tuple(sorted(names))
        super().__init__(f"parametrised command has stray free variable(s) {', '.join(self.names)}", line, col)


class DuplicateFormal(WsrefineError):
    pass


class UnknownLaw(WsrefineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown law {name!r}")


class ConfigError(WsrefineError):
    pass


class UnknownVar(WsrefineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not declared in the universe")


class UniverseMismatch(WsrefineError):
    pass


class DomainViolation(WsrefineError):
    pass


class UndefinedTerm(WsrefineError):
    pass


class NotAChain(WsrefineError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"chain element {index} does not refine its successor")


class NotHealthy(WsrefineError):
    def __init__(self, prop: int, detail: str = ""):
        self.property = prop
        super().__init__(f"execution violates healthiness property ({prop}) {detail}".rstrip())


class MonotonicityViolation(WsrefineError):
    pass


class MatchFailure(WsrefineError):
    pass


class SideConditionFailure(WsrefineError):
    pass


class AmbiguousMatch(WsrefineError):
    pass


class NotWellFounded(WsrefineError):
    pass


class DuplicateProc(WsrefineError):
    pass


class HypothesisMismatch(WsrefineError):
    pass


class SemanticCheckFailed(WsrefineError):
    pass


class StepFailed(WsrefineError):
    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"step {index} failed: {reason}")


class ObligationFailed(StepFailed):
    def __init__(self, index: int, obligation):
        self.obligation = obligation
        super().__init__(index, f"obligation not discharged: {obligation}")


class UnorderableDataflow(WsrefineError):
    pass
