"""Executions as per-binding status tables, and their algebra.

An execution maps every binding to Undefined, Fail or Succeed.  Applying it
to a state either falls outside its domain (some binding is Undefined) or
keeps exactly the Succeed bindings.  Tables are stored as factors: only the
variables a command depends on get an axis.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels as K
from .errors import NotAChain, UniverseMismatch, UnknownVar
from .universe import Binding, Factor, Universe


class Status(IntEnum):
    UNDEFINED = 0
    FAIL = 1
    SUCCEED = 2

    def __str__(self) -> str:
        return self.name.capitalize()


class _Marker:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name

    def __bool__(self) -> bool:
        return False


OutsideDomain = _Marker("OutsideDomain")
Incompatible = _Marker("Incompatible")


class Execution:
    """Immutable status table over a universe."""

    __slots__ = ("universe", "vars", "table", "_full")

    def __init__(self, universe: Universe, vars: tuple, table: np.ndarray):
        self.universe = universe
        self.vars = tuple(vars)
        self.table = np.asarray(table, dtype=np.int8)
        self._full = None

    @classmethod
    def constant(cls, universe: Universe, status: int) -> "Execution":
        return cls(universe, (), np.array(int(status), dtype=np.int8))

    @classmethod
    def from_factor(cls, universe: Universe, f: Factor) -> "Execution":
        return cls(universe, f.vars, f.table)

    @property
    def factor(self) -> Factor:
        return Factor(self.vars, self.table)

    def full(self) -> np.ndarray:
        """Status array over every declared variable, in declaration order."""
        if self._full is None:
            u = self.universe
            self._full = u.expand(self.factor, u.var_names)
        return self._full

    def over(self, names: tuple) -> np.ndarray:
        """Table broadcast over ``names``, which must contain every variable of this execution."""
        return self.universe.align(self.factor, names)

    def status(self, b: Binding) -> Status:
        return Status(int(self.universe._lookup(self.factor, b)))

    def compact(self) -> "Execution":
        """Drop axes along which the table is constant."""
        table = self.table
        keep = []
        for axis, name in enumerate(self.vars):
            first = np.take(table, [0], axis=axis)
            if np.array_equal(np.broadcast_to(first, table.shape), table):
                continue
            keep.append(axis)
        if len(keep) == len(self.vars):
            return self
        idx = tuple(slice(None) if a in keep else 0 for a in range(len(self.vars)))
        return Execution(self.universe, tuple(self.vars[a] for a in keep), np.ascontiguousarray(table[idx]))

    def depends_on(self) -> tuple:
        return self.compact().vars

    def counts(self) -> dict:
        full = self.full()
        return {s: int(np.count_nonzero(full == s)) for s in Status}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Execution):
            return NotImplemented
        _same(self, other)
        names = self.universe.order(self.vars + other.vars)
        return bool(np.array_equal(*np.broadcast_arrays(self.over(names), other.over(names))))

    def __hash__(self) -> int:
        return hash(self.compact_key())

    def compact_key(self) -> tuple:
        c = self.compact()
        return (c.vars, c.table.tobytes())

    def bindings_with(self, status: Status) -> frozenset:
        u = self.universe
        hits = np.argwhere(self.full() == int(status))
        return frozenset(Binding(u, u._idx_of(pos)) for pos in hits)

    def dump(self) -> str:
        return dump(self)

    def __repr__(self) -> str:
        # counted on the factored table; expanding could exceed the cap
        t = self.table
        return (f"Execution(vars={self.vars}, succeed={int(np.count_nonzero(t == 2))}, "
                f"fail={int(np.count_nonzero(t == 1))}, undefined={int(np.count_nonzero(t == 0))})")


def _same(*es: Execution) -> Universe:
    u = es[0].universe
    for e in es[1:]:
        if e.universe is not u:
            raise UniverseMismatch("executions belong to different universes")
    return u


def _binary(e1: Execution, e2: Execution, kernel) -> Execution:
    u = _same(e1, e2)
    f = u._combine(e1.factor, e2.factor, kernel)
    return Execution(u, f.vars, f.table)


# --------------------------------------------------------- constructors


def abort_exec(u: Universe) -> Execution:
    return Execution.constant(u, Status.UNDEFINED)


def fail_exec(u: Universe) -> Execution:
    return Execution.constant(u, Status.FAIL)


def skip_exec(u: Universe) -> Execution:
    return Execution.constant(u, Status.SUCCEED)


def from_spec(u: Universe, p) -> Execution:
    return Execution.from_factor(u, u.pred_factor(p))


def from_assert(u: Universe, p) -> Execution:
    f = u.pred_factor(p)
    return Execution(u, f.vars, K.k_assert(f.table))


# ---------------------------------------------------------- combinators


def e_and(e1: Execution, e2: Execution) -> Execution:
    return _binary(e1, e2, K.k_and)


def e_or(e1: Execution, e2: Execution) -> Execution:
    return _binary(e1, e2, K.k_or)


def e_seq(e1: Execution, e2: Execution) -> Execution:
    return _binary(e1, e2, K.k_seq)


def _quant(name: str, e: Execution, reducer) -> Execution:
    u = e.universe
    if name not in u.var_index:
        raise UnknownVar(name)
    if name not in e.vars:
        return e
    axis = e.vars.index(name)
    return Execution(u, e.vars[:axis] + e.vars[axis + 1:], reducer(e.table, axis))


def e_exists(name: str, e: Execution) -> Execution:
    return _quant(name, e, K.k_reduce_exists)


def e_forall(name: str, e: Execution) -> Execution:
    return _quant(name, e, K.k_reduce_forall)


# ------------------------------------------------------------ ordering


def refines(e1: Execution, e2: Execution) -> bool:
    u = _same(e1, e2)
    names = u.order(e1.vars + e2.vars)
    return K.k_refines(e1.over(names), e2.over(names))


def refines_under(ctx: Execution, e1: Execution, e2: Execution) -> bool:
    """Refinement restricted to bindings where ``ctx`` succeeds."""
    u = _same(ctx, e1, e2)
    names = u.order(ctx.vars + e1.vars + e2.vars)
    return K.k_refines_under(ctx.over(names), e1.over(names), e2.over(names))


def first_disagreement(e1: Execution, e2: Execution, ctx: Optional[Execution] = None):
    """A binding (as a dict) where ``e1`` is defined but ``e2`` differs, or None."""
    u = _same(e1, e2)
    extra = ctx.vars if ctx is not None else ()
    names = u.order(e1.vars + e2.vars + extra)
    arrays = [e1.over(names), e2.over(names)] + ([ctx.over(names)] if ctx is not None else [])
    a, b, *g = np.broadcast_arrays(*arrays)
    bad = (a != 0) & (a != b)
    if g:
        bad &= g[0] == 2
    hit = u.witness(Factor(names, a), bad)
    if hit is None:
        return None
    pos = tuple(int(u.dom_pos[n][u.value_index(hit[n])]) for n in names)
    return hit, Status(int(a[pos])), Status(int(b[pos]))


def meet(e1: Execution, e2: Execution) -> Execution:
    return _binary(e1, e2, K.k_meet)


def join(e1: Execution, e2: Execution):
    """Least upper bound, or ``Incompatible`` when some binding both fails and succeeds."""
    u = _same(e1, e2)
    names = u.order(e1.vars + e2.vars)
    out = K.k_join(e1.over(names), e2.over(names))
    if out is None:
        return Incompatible
    return Execution(u, names, np.broadcast_to(out, u.shape(names)))


class ExecChain(Sequence):
    """Finite ascending chain; the last element is taken to repeat forever."""

    def __init__(self, elements: Iterable[Execution], check: bool = True):
        self.elements = list(elements)
        if not self.elements:
            raise NotAChain(0)
        if check:
            for i in range(len(self.elements) - 1):
                if not refines(self.elements[i], self.elements[i + 1]):
                    raise NotAChain(i)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.elements[i]
        if i >= len(self.elements):
            return self.elements[-1]
        return self.elements[i]

    def __len__(self) -> int:
        return len(self.elements)


def chain_join(chain) -> Execution:
    if not isinstance(chain, ExecChain):
        chain = ExecChain(chain)
    acc = chain.elements[0]
    for e in chain.elements[1:]:
        nxt = join(acc, e)
        if nxt is Incompatible:  # pragma: no cover - excluded by the chain check
            raise NotAChain(0)
        acc = nxt
    return acc


# --------------------------------------------------------------- states


def apply_exec(e: Execution, s: Iterable[Binding]):
    out = set()
    for b in s:
        st = e.status(b)
        if st == Status.UNDEFINED:
            return OutsideDomain
        if st == Status.SUCCEED:
            out.add(b)
    return frozenset(out)


def dump(e: Execution) -> str:
    """One ``binding → status`` line per binding, in enumeration order."""
    u = e.universe
    full = e.full()
    lines = []
    for b in u.bindings():
        pos = tuple(int(u.dom_pos[n][i]) for n, i in zip(u.var_names, b.idx))
        lines.append(f"{b!r} → {Status(int(full[pos]))}")
    return "\n".join(lines) + ("\n" if lines else "")
