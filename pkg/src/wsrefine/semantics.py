"""From commands to executions: environments, parametrised executions and recursion.

A parametrised command ``(V1, .., Vk . c)`` is represented by the status
table of ``c`` over the domains of its formals, laid out in formal order.
Applying it to argument terms evaluates the terms per binding and looks the
resulting values up in that table; there is no substitution.  A recursion
block is the limit of Kleene iteration from the everywhere-abort table,
computed over the whole (finite) formal domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from . import kernels as K
from .errors import (
    ArityError, ConfigError, DomainViolation, FreeVarError, MonotonicityViolation,
    UniverseMismatch,
)
from .execution import (
    Execution, Status, abort_exec, e_and, e_exists, e_forall, e_or, e_seq, from_assert,
    from_spec,
)
from .syntax.ast import (
    Assert, Call, Exists, Forall, MetaCmd, PAnd, Param, POr, ProgramAst, RecBlock, SAnd, Spec,
)
from .syntax.transforms import calls_in, free_vars
from .universe import Universe, build_universe
from .values import value_str

MAX_REC_NESTING = 8
MAX_ITERATIONS = 10_000

Environment = Mapping[str, "ParamExecution"]


class ParamExecution:
    """Status table of a parametrised command over its formals' domains."""

    def __init__(self, universe: Universe, formals: tuple, table: np.ndarray):
        self.universe = universe
        self.formals = tuple(formals)
        self.table = np.asarray(table, dtype=np.int8)
        self._cache: dict = {}

    @property
    def arity(self) -> int:
        return len(self.formals)

    def domains(self) -> tuple:
        return tuple(tuple(self.universe.domains[f]) for f in self.formals)

    def _compatible(self, other: "ParamExecution"):
        if self.universe is not other.universe:
            raise UniverseMismatch("parametrised executions belong to different universes")
        if self.arity != other.arity or self.domains() != other.domains():
            raise UniverseMismatch("parametrised executions have different parameter domains")

    def at(self, args: tuple) -> Execution:
        """Execution of this parametrised command applied to ``args``."""
        args = tuple(args)
        hit = self._cache.get(args)
        if hit is not None:
            return hit
        if len(args) != self.arity:
            raise ArityError(f"expected {self.arity} arguments, got {len(args)}", 0, 0)
        u = self.universe
        fs = [u.term_factor(a) for a in args]
        names = u.order(v for f in fs for v in f.vars)
        u.check_size(names)
        positions = []
        for formal, f in zip(self.formals, fs):
            idx = u.align(f, names)
            pos = u.dom_pos[formal][np.where(idx < 0, 0, idx)]
            stray = (idx >= 0) & (pos < 0)
            if np.any(stray):
                bad = u.values[int(np.broadcast_to(idx, stray.shape)[stray].flat[0])]
                raise DomainViolation(f"argument value {value_str(bad)} is outside the domain of {formal}")
            positions.append(np.where(idx < 0, -1, pos))
        out = K.k_gather(self.table, positions) if positions else self.table.copy()
        e = Execution(u, names, np.broadcast_to(np.asarray(out, np.int8), u.shape(names)))
        self._cache[args] = e
        return e

    def as_execution(self) -> Execution:
        """The table viewed as an execution over the formals (in universe order)."""
        u = self.universe
        order = u.order(self.formals)
        perm = [self.formals.index(n) for n in order]
        return Execution(u, order, np.transpose(self.table, perm))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamExecution):
            return NotImplemented
        self._compatible(other)
        return bool(np.array_equal(self.table, other.table))

    def __hash__(self) -> int:
        return hash((self.arity, self.table.tobytes()))

    def refines(self, other: "ParamExecution") -> bool:
        self._compatible(other)
        return K.k_refines(self.table, other.table)

    def meet(self, other: "ParamExecution") -> "ParamExecution":
        self._compatible(other)
        return ParamExecution(self.universe, self.formals, K.k_meet(self.table, other.table))

    def join(self, other: "ParamExecution") -> Optional["ParamExecution"]:
        self._compatible(other)
        out = K.k_join(self.table, other.table)
        return None if out is None else ParamExecution(self.universe, self.formals, out)

    def dump(self) -> str:
        u = self.universe
        lines = []
        for pos in itertools.product(*(range(s) for s in self.table.shape)):
            vals = ", ".join(f"{f}={value_str(u.values[int(u.domains[f][p])])}" for f, p in zip(self.formals, pos))
            lines.append(f"({vals}) → {Status(int(self.table[pos]))}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"ParamExecution(formals={self.formals}, shape={self.table.shape})"


class FixResult(ParamExecution):
    """Least fixed point together with the Kleene chain that reached it."""

    def __init__(self, universe: Universe, formals: tuple, table: np.ndarray, chain: list):
        super().__init__(universe, formals, table)
        self.chain = chain

    @property
    def iterations(self) -> int:
        return len(self.chain) - 1


def pabort(universe: Universe, formals: tuple) -> ParamExecution:
    shape = universe.shape(tuple(formals))
    return ParamExecution(universe, formals, np.zeros(shape, dtype=np.int8))


# --------------------------------------------------------------- cexec


def cexec(universe: Universe, c, env: Optional[Environment] = None) -> Execution:
    env = env or {}
    return _cexec(universe, c, env)


def _cexec(u: Universe, c, env) -> Execution:
    if isinstance(c, Spec):
        return from_spec(u, c.pred)
    if isinstance(c, Assert):
        return from_assert(u, c.pred)
    if isinstance(c, POr):
        return e_or(_cexec(u, c.left, env), _cexec(u, c.right, env))
    if isinstance(c, PAnd):
        return e_and(_cexec(u, c.left, env), _cexec(u, c.right, env))
    if isinstance(c, SAnd):
        return e_seq(_cexec(u, c.left, env), _cexec(u, c.right, env))
    if isinstance(c, Exists):
        return e_exists(c.var, _cexec(u, c.body, env))
    if isinstance(c, Forall):
        return e_forall(c.var, _cexec(u, c.body, env))
    if isinstance(c, Call):
        p = env.get(c.proc)
        if p is None:
            return abort_exec(u)
        return p.at(c.args)
    if isinstance(c, MetaCmd):
        raise ConfigError(f"cannot execute command metavariable {c.name}")
    raise TypeError(f"cannot execute {type(c).__name__}")


# --------------------------------------------------------------- pexec


def formals_of(pc) -> tuple:
    while isinstance(pc, RecBlock):
        pc = pc.inner
    return pc.formals


def pexec(universe: Universe, pc, env: Optional[Environment] = None, _depth: int = 0) -> ParamExecution:
    env = dict(env or {})
    if isinstance(pc, Param):
        stray = free_vars(pc.body) - set(pc.formals)
        if stray:
            raise FreeVarError(sorted(stray), 0, 0)
        body = _cexec(universe, pc.body, env)
        full = universe.expand(body.factor, pc.formals)
        order = universe.order(pc.formals)
        perm = [order.index(f) for f in pc.formals]
        return ParamExecution(universe, pc.formals, np.ascontiguousarray(np.transpose(full, perm)))
    if isinstance(pc, RecBlock):
        return fix(universe, pc, env, _depth=_depth)
    raise TypeError(f"not a parametrised command: {type(pc).__name__}")


def apply_pcmd(universe: Universe, pc, args: tuple, env: Optional[Environment] = None) -> Execution:
    return pexec(universe, pc, env).at(tuple(args))


def step_context(universe: Universe, rec: RecBlock, env: Optional[Environment] = None) -> Callable:
    """The function ``p ↦ pexec(env ⊕ {id ↦ p}, body)`` of a recursion block."""
    env = dict(env or {})

    def apply(p: ParamExecution) -> ParamExecution:
        inner_env = dict(env)
        inner_env[rec.ident] = p
        return pexec(universe, rec.inner, inner_env)

    return apply


def fix(universe: Universe, rec: RecBlock, env: Optional[Environment] = None, *, _depth: int = 0) -> FixResult:
    if _depth >= MAX_REC_NESTING:
        raise ConfigError(f"recursion blocks nested deeper than {MAX_REC_NESTING}")
    env = dict(env or {})
    formals = formals_of(rec)
    current = pabort(universe, formals)
    chain = [current]
    for i in range(MAX_ITERATIONS):
        inner_env = dict(env)
        inner_env[rec.ident] = current
        nxt = pexec(universe, rec.inner, inner_env, _depth=_depth + 1)
        nxt = ParamExecution(universe, formals, nxt.table)
        if not current.refines(nxt):
            raise MonotonicityViolation(f"iterate {i + 1} of {rec.ident} does not refine iterate {i}")
        if nxt == current:
            return FixResult(universe, formals, current.table, chain)
        chain.append(nxt)
        current = nxt
    raise ConfigError(f"fixed point of {rec.ident} not reached in {MAX_ITERATIONS} iterations")


# ------------------------------------------------------------- programs


def dependency_order(procs: Iterable[tuple]) -> list:
    """Procedures ordered so that callees precede callers where possible."""
    procs = list(procs)
    names = [n for n, _ in procs]
    deps = {n: (calls_in(pc) & set(names)) - {n} for n, pc in procs}
    done: list = []
    placed: set = set()
    pending = list(names)
    while pending:
        progress = False
        for n in list(pending):
            if deps[n] <= placed:
                done.append(n)
                placed.add(n)
                pending.remove(n)
                progress = True
        if not progress:  # cycle: keep declaration order for the rest
            done.extend(pending)
            break
    table = dict(procs)
    return [(n, table[n]) for n in done]


def program_env(universe: Universe, program: ProgramAst, base: Optional[Environment] = None) -> dict:
    env = dict(base or {})
    for name, pc in dependency_order(program.procs):
        env[name] = pexec(universe, pc, env)
    return env


@dataclass
class LoadedProgram:
    ast: ProgramAst
    universe: Universe
    env: dict

    def goal_exec(self, name: Optional[str] = None) -> Execution:
        goal = self.ast.goal_named(name) if name else self.ast.goal
        return cexec(self.universe, goal, self.env)


def load_program(program: ProgramAst, universe: Optional[Universe] = None) -> LoadedProgram:
    u = universe or build_universe(program.universe, program.preds)
    return LoadedProgram(program, u, program_env(u, program))


# ------------------------------------------------------ variant relations


@dataclass
class VariantRelation:
    """A binary relation on value tuples, used as a termination measure."""

    name: str
    decides: Callable[[tuple, tuple], bool]

    def adjacency(self, domain: list) -> np.ndarray:
        n = len(domain)
        adj = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(domain):
            for j, b in enumerate(domain):
                adj[i, j] = bool(self.decides(a, b))
        return adj


def check_wellfounded(rel: VariantRelation, domain: Iterable[tuple]) -> bool:
    """True iff the relation has no cycle on ``domain`` (finite, so no infinite descent)."""
    dom = list(domain)
    if not dom:
        return True
    return K.k_acyclic(rel.adjacency(dom))


def int_less() -> VariantRelation:
    return VariantRelation("int<", lambda a, b: a[0] < b[0])


def length_less(bound: int) -> VariantRelation:
    """Lists ordered by decreasing distance to a length bound."""
    from .values import as_pylist

    def dec(a, b):
        la, lb = as_pylist(a[0]), as_pylist(b[0])
        return la is not None and lb is not None and bound >= len(la) > len(lb)

    return VariantRelation(f"len<{bound}", dec)


def table_relation(name: str, pairs: Iterable[tuple]) -> VariantRelation:
    rel = {(tuple(a), tuple(b)) for a, b in pairs}
    return VariantRelation(name, lambda a, b: (tuple(a), tuple(b)) in rel)


def predicate_relation(universe: Universe, smaller: tuple, larger: tuple, pred) -> "PredicateRelation":
    return PredicateRelation(universe, tuple(smaller), tuple(larger), pred)


class PredicateRelation(VariantRelation):
    """``t1 ≺ t2`` iff ``pred`` holds with ``smaller := t1`` and ``larger := t2``.

    Only the components the predicate mentions take part; the relation is
    checked on the product of those components' domains.
    """

    def __init__(self, universe: Universe, smaller: tuple, larger: tuple, pred):
        if len(smaller) != len(larger):
            raise ConfigError("variant tuples have different lengths")
        self.universe = universe
        self.smaller = smaller
        self.larger = larger
        self.pred = pred
        fv = free_vars(pred)
        stray = fv - set(smaller) - set(larger)
        if stray:
            raise ConfigError(f"variant predicate mentions {', '.join(sorted(stray))}")
        self.components = tuple(k for k in range(len(larger)) if smaller[k] in fv or larger[k] in fv)

        def dec(a, b):
            u = self.universe
            assign = {}
            for i, k in enumerate(self.components):
                assign[self.smaller[k]] = a[i]
                assign[self.larger[k]] = b[i]
            try:
                bnd = u.binding(**assign)
            except DomainViolation:
                return False
            return int(u.eval_pred(self.pred, bnd)) == 2

        super().__init__(f"variant({', '.join(smaller)}) < ({', '.join(larger)})", dec)

    def domain(self) -> list:
        u = self.universe
        comps = [u.domain(self.larger[k]) for k in self.components]
        return [tuple(t) for t in itertools.product(*comps)]

    def adjacency(self, domain: list) -> np.ndarray:
        u = self.universe
        names = u.order([self.smaller[k] for k in self.components] + [self.larger[k] for k in self.components])
        f = u.pred_factor(self.pred)
        full = u.expand(f, names)
        n = len(domain)
        idx = []
        valid = np.ones((n, n), dtype=bool)
        for name in names:
            if name in self.smaller and self.smaller.index(name) in self.components:
                k = self.smaller.index(name)
                pos = np.array([u.dom_pos[name][u.value_index(t[self.components.index(k)])]
                                if u.has_value(t[self.components.index(k)]) else -1 for t in domain])
                arr = np.broadcast_to(pos[:, None], (n, n))
            else:
                k = self.larger.index(name)
                pos = np.array([u.dom_pos[name][u.value_index(t[self.components.index(k)])] for t in domain])
                arr = np.broadcast_to(pos[None, :], (n, n))
            valid &= arr >= 0
            idx.append(np.where(arr < 0, 0, arr))
        return valid & (full[tuple(idx)] == 2)

    def wellfounded(self) -> bool:
        return check_wellfounded(self, self.domain())
