"""Abstract syntax for terms, predicates, commands, programs and derivation scripts.

All nodes are immutable.  Source locations ride along in a ``loc`` field that
does not take part in equality, so structurally equal trees compare equal no
matter where they were parsed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Loc = Optional[tuple]


def _loc():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class VarRef:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class FunApp:
    functor: str
    args: tuple = ()
    loc: Loc = _loc()


Term = Union[VarRef, FunApp]


def int_term(n: int) -> FunApp:
    return FunApp(str(n))


def nil_term() -> FunApp:
    return FunApp("nil")


def cons_term(h: Term, t: Term) -> FunApp:
    return FunApp("cons", (h, t))


def list_term(items, tail: Term | None = None) -> Term:
    out = tail if tail is not None else nil_term()
    for item in reversed(list(items)):
        out = cons_term(item, out)
    return out


def is_int_literal(name: str) -> bool:
    return name.lstrip("-").isdigit() and name not in ("-", "")


# ----------------------------------------------------------- predicates


@dataclass(frozen=True)
class TruePred:
    loc: Loc = _loc()


@dataclass(frozen=True)
class FalsePred:
    loc: Loc = _loc()


COMPARE_OPS = ("=", "\\=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: Term
    rhs: Term
    loc: Loc = _loc()


@dataclass(frozen=True)
class Member:
    term: Term
    lo: Term
    hi: Term
    loc: Loc = _loc()


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Not:
    body: "Pred"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Implies:
    left: "Pred"
    right: "Pred"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Iff:
    left: "Pred"
    right: "Pred"
    loc: Loc = _loc()


@dataclass(frozen=True)
class ExistsP:
    """Existential over a variable; ``lo``/``hi`` give an optional integer range."""

    var: str
    body: "Pred"
    lo: Optional[Term] = None
    hi: Optional[Term] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class ForallP:
    var: str
    body: "Pred"
    lo: Optional[Term] = None
    hi: Optional[Term] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class UserPred:
    name: str
    args: tuple = ()
    loc: Loc = _loc()


@dataclass(frozen=True)
class MetaPred:
    """Predicate metavariable, only produced when parsing law patterns."""

    name: str
    loc: Loc = _loc()


Pred = Union[TruePred, FalsePred, Compare, Member, And, Or, Not, Implies, Iff,
             ExistsP, ForallP, UserPred, MetaPred]


# ------------------------------------------------------------- commands


@dataclass(frozen=True)
class Spec:
    pred: Pred
    loc: Loc = _loc()


@dataclass(frozen=True)
class Assert:
    pred: Pred
    loc: Loc = _loc()


@dataclass(frozen=True)
class POr:
    left: "Command"
    right: "Command"
    loc: Loc = _loc()


@dataclass(frozen=True)
class PAnd:
    left: "Command"
    right: "Command"
    loc: Loc = _loc()


@dataclass(frozen=True)
class SAnd:
    left: "Command"
    right: "Command"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Command"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Command"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Call:
    proc: str
    args: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class MetaCmd:
    name: str
    loc: Loc = _loc()


Command = Union[Spec, Assert, POr, PAnd, SAnd, Exists, Forall, Call, MetaCmd]


def skip() -> Spec:
    return Spec(TruePred())


def fail() -> Spec:
    return Spec(FalsePred())


def abort() -> Assert:
    return Assert(FalsePred())


# ---------------------------------------------------- parametrised commands


@dataclass(frozen=True)
class Param:
    formals: tuple
    body: Command
    loc: Loc = _loc()


@dataclass(frozen=True)
class RecBlock:
    ident: str
    inner: "PCommand"
    loc: Loc = _loc()


PCommand = Union[Param, RecBlock]

BINARY_COMMANDS = (POr, PAnd, SAnd)
BINARY_PREDS = (And, Or, Implies, Iff)


def param_of(pc: PCommand) -> Param:
    while isinstance(pc, RecBlock):
        pc = pc.inner
    return pc


# --------------------------------------------------- universe declarations


@dataclass(frozen=True)
class ValuesInt:
    lo: int
    hi: int


@dataclass(frozen=True)
class ValuesLists:
    maxlen: int
    lo: int
    hi: int


@dataclass(frozen=True)
class ValuesAtoms:
    names: tuple


@dataclass(frozen=True)
class ValuesTerms:
    depth: int
    functors: tuple  # of (name, arity)
    int_range: Optional[tuple] = None


@dataclass(frozen=True)
class DomainSpec:
    """Domain of a declared variable.

    kind is one of ``range`` (args lo, hi), ``set`` (args ground terms),
    ``lists``, ``ints``, ``atoms`` or ``all``.
    """

    kind: str
    args: tuple = ()


@dataclass(frozen=True)
class VarDecl:
    names: tuple
    domain: DomainSpec


@dataclass(frozen=True)
class FunDecl:
    name: str
    arity: int
    builtin: Optional[str] = None
    rows: tuple = ()  # of (arg terms tuple, result term)


@dataclass(frozen=True)
class CapDecl:
    cap: int


@dataclass(frozen=True)
class UniverseDecl:
    items: tuple = ()


@dataclass(frozen=True)
class ModeDecl:
    name: str
    modes: tuple


@dataclass(frozen=True)
class PredDef:
    name: str
    params: tuple
    body: Pred


@dataclass(frozen=True)
class ProgramAst:
    universe: UniverseDecl
    procs: tuple = ()  # of (name, PCommand), ordered
    goals: tuple = ()  # of (name, Command), ordered
    modes: tuple = ()  # of ModeDecl
    preds: tuple = ()  # of PredDef

    @property
    def proc_map(self) -> dict:
        return dict(self.procs)

    @property
    def goal(self) -> Optional[Command]:
        return self.goals[0][1] if self.goals else None

    def goal_named(self, name: str) -> Command:
        for n, g in self.goals:
            if n == name:
                return g
        raise KeyError(name)

    @property
    def mode_map(self) -> dict:
        return {m.name: m.modes for m in self.modes}

    def with_proc(self, name: str, pc: PCommand) -> "ProgramAst":
        procs = list(self.procs)
        for i, (n, _) in enumerate(procs):
            if n == name:
                procs[i] = (name, pc)
                break
        else:
            procs.append((name, pc))
        return ProgramAst(self.universe, tuple(procs), self.goals, self.modes, self.preds)

    def with_modes(self, extra) -> "ProgramAst":
        return ProgramAst(self.universe, self.procs, self.goals, tuple(self.modes) + tuple(extra), self.preds)


# ------------------------------------------------------ derivation scripts


@dataclass(frozen=True)
class DerivationStep:
    law: str
    focus_path: tuple = ()
    params: tuple = ()  # of (name, value) where value is an AST node or identifier
    direction: Optional[str] = None  # 'forward', 'reverse' or None for automatic
    repeat: bool = False
    note: str = ""
    line: int = 0

    @property
    def param_map(self) -> dict:
        return dict(self.params)


PROTOCOL_STEPS = ("rec-intro", "close-rec", "focus", "unfocus")
BUILTIN_STEPS = PROTOCOL_STEPS + ("use-hypothesis", "semantic-check")


@dataclass(frozen=True)
class DerivationScript:
    target: str
    steps: tuple
    expected_result: Optional[object] = None

    @property
    def law_steps(self) -> tuple:
        return tuple(s for s in self.steps if s.law not in PROTOCOL_STEPS)
