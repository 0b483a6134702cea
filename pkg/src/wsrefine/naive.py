"""Set-of-pairs executions, used as an independent oracle.

Everything here works on explicit partial functions from states (frozensets
of bindings) to states, and evaluates terms and predicates by plain
recursion over the syntax tree.  Nothing in this module touches the
vectorised tables, so agreement with :mod:`wsrefine.semantics` is a real
cross-check.  Costs are exponential in the number of bindings; keep
universes tiny.
"""

from __future__ import annotations

from itertools import chain, combinations
from typing import Callable, Mapping, Optional

from .errors import ConfigError, DomainViolation, NotHealthy
from .execution import Execution, Status
from .syntax.ast import (
    And, Assert, Call, Compare, Exists, ExistsP, FalsePred, Forall, ForallP, FunApp, Iff,
    Implies, Member, Not, Or, PAnd, Param, POr, RecBlock, SAnd, Spec, TruePred, UserPred,
    VarRef,
)
from .syntax.transforms import call_nodes
from .universe import BUILTIN_IMPL, LIBRARY_IMPL, Binding, Universe
from .values import Atom, Compound, is_int

_UNDEF = object()
MAX_BINDINGS = 12


def powerset(items) -> list:
    items = list(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


class NaiveExecution:
    """A partial function on states given by its explicit graph."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Mapping):
        self.pairs = {frozenset(k): frozenset(v) for k, v in dict(pairs).items()}

    def __call__(self, s):
        return self.pairs.get(frozenset(s))

    def defined(self, s) -> bool:
        return frozenset(s) in self.pairs

    @property
    def domain(self) -> set:
        return set(self.pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, NaiveExecution) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(frozenset(self.pairs.items()))

    def __len__(self) -> int:
        return len(self.pairs)

    def __repr__(self) -> str:  # pragma: no cover
        return f"NaiveExecution({len(self.pairs)} pairs)"


def _guard(u: Universe) -> list:
    bnds = list(u.bindings())
    if len(bnds) > MAX_BINDINGS:
        raise ConfigError(f"naive executions need at most {MAX_BINDINGS} bindings, universe has {len(bnds)}")
    return bnds


# ------------------------------------------------------ bridge + checks


def to_naive(e: Execution) -> NaiveExecution:
    u = e.universe
    bnds = _guard(u)
    defined = [b for b in bnds if e.status(b) != Status.UNDEFINED]
    keep = {b for b in defined if e.status(b) == Status.SUCCEED}
    return NaiveExecution({s: s & keep for s in powerset(defined)})


def check_properties(n: NaiveExecution, universe: Optional[Universe] = None) -> list:
    """Indices (1..5) of the healthiness properties ``n`` violates."""
    bad = []
    dom = n.domain
    singles = {next(iter(s)) for s in dom if len(s) == 1}
    if dom != set(powerset(sorted(singles, key=lambda b: b.idx))):
        bad.append(1)
    if any(not out <= s for s, out in n.pairs.items()):
        bad.append(2)

    def kept(b):
        r = n.pairs.get(frozenset([b]))
        return r is not None and b in r

    if any(out != frozenset(b for b in s if kept(b)) for s, out in n.pairs.items()):
        bad.append(3)
    p4 = True
    for s, out in n.pairs.items():
        parts = [n.pairs.get(frozenset([b])) for b in s]
        if any(p is None for p in parts) or out != frozenset().union(*parts):
            p4 = False
            break
    if not p4:
        bad.append(4)
    p5 = True
    for s, out in n.pairs.items():
        for sub in powerset(s):
            if n.pairs.get(sub) != out & sub:
                p5 = False
                break
        if not p5:
            break
    if not p5:
        bad.append(5)
    return bad


def from_naive(n: NaiveExecution, universe: Universe) -> Execution:
    bad = [k for k in check_properties(n) if k <= 3]
    if bad:
        raise NotHealthy(bad[0], f"property {bad[0]} fails")
    import numpy as np
    table = np.zeros(universe.shape(universe.var_names), dtype=np.int8)
    for b in _guard(universe):
        r = n.pairs.get(frozenset([b]))
        pos = tuple(int(universe.dom_pos[v][i]) for v, i in zip(universe.var_names, b.idx))
        table[pos] = Status.UNDEFINED if r is None else (Status.SUCCEED if r else Status.FAIL)
    return Execution(universe, universe.var_names, table)


# ---------------------------------------------- independent evaluation


def _apply_functor(u: Universe, name: str, args: list):
    if name in u.user_functors:
        arity, rows = u.user_functors[name]
        res = Compound(name, tuple(args)) if rows is None else rows.get(tuple(args))
    elif not args and name.lstrip("-").isdigit():
        res = int(name)
    elif name in BUILTIN_IMPL:
        res = BUILTIN_IMPL[name](*args)
    elif not args:
        res = Atom(name)
    else:
        return _UNDEF
    if res is None or not u.has_value(res):
        return _UNDEF
    return res


def naive_term(u: Universe, t, b: Binding):
    if isinstance(t, VarRef):
        return b[t.name]
    args = []
    for a in t.args:
        v = naive_term(u, a, b)
        if v is _UNDEF:
            return _UNDEF
        args.append(v)
    return _apply_functor(u, t.functor, args)


def _cmp(op: str, x, y) -> bool:
    if op == "=":
        return x == y
    if op == "\\=":
        return x != y
    if not (is_int(x) and is_int(y)):
        return False
    return {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]


def naive_pred(u: Universe, p, b: Binding):
    """Three-valued truth as ``True``, ``False`` or ``None`` (undefined)."""
    if isinstance(p, TruePred):
        return True
    if isinstance(p, FalsePred):
        return False
    if isinstance(p, Compare):
        x, y = naive_term(u, p.lhs, b), naive_term(u, p.rhs, b)
        if x is _UNDEF or y is _UNDEF:
            return None
        return _cmp(p.op, x, y)
    if isinstance(p, Member):
        vals = [naive_term(u, t, b) for t in (p.term, p.lo, p.hi)]
        if any(v is _UNDEF for v in vals):
            return None
        x, lo, hi = vals
        return all(is_int(v) for v in vals) and lo <= x <= hi
    if isinstance(p, UserPred):
        if p.name in u.macros:
            return naive_pred(u, u._expand_macro(p), b)
        vals = [naive_term(u, t, b) for t in p.args]
        if any(v is _UNDEF for v in vals):
            return None
        return bool(LIBRARY_IMPL[(p.name, len(vals))](*vals))
    if isinstance(p, Not):
        v = naive_pred(u, p.body, b)
        return None if v is None else not v
    if isinstance(p, (And, Or, Implies, Iff)):
        x, y = naive_pred(u, p.left, b), naive_pred(u, p.right, b)
        if x is None or y is None:
            return None
        if isinstance(p, And):
            return x and y
        if isinstance(p, Or):
            return x or y
        if isinstance(p, Implies):
            return (not x) or y
        return x == y
    if isinstance(p, (ExistsP, ForallP)):
        xs = u.domain(p.var)
        if p.lo is not None:
            lo, hi = naive_term(u, p.lo, b), naive_term(u, p.hi, b)
            if lo is _UNDEF or hi is _UNDEF or not (is_int(lo) and is_int(hi)):
                return None
            xs = [x for x in xs if is_int(x) and lo <= x <= hi]
            if len(xs) != max(0, hi - lo + 1):
                return None
        vals = [naive_pred(u, p.body, b.override(p.var, x)) for x in xs]
        if any(v is None for v in vals):
            return None
        return any(vals) if isinstance(p, ExistsP) else all(vals)
    raise TypeError(f"cannot evaluate {type(p).__name__}")


# ----------------------------------------------------- literal semantics


def n_spec(u: Universe, p) -> NaiveExecution:
    bnds = _guard(u)
    ok = [b for b in bnds if naive_pred(u, p, b) is not None]
    true = {b for b in ok if naive_pred(u, p, b)}
    return NaiveExecution({s: s & true for s in powerset(ok)})


def n_assert(u: Universe, p) -> NaiveExecution:
    ok = [b for b in _guard(u) if naive_pred(u, p, b) is True]
    return NaiveExecution({s: s for s in powerset(ok)})


def n_and(e1: NaiveExecution, e2: NaiveExecution) -> NaiveExecution:
    return NaiveExecution({s: e1.pairs[s] & e2.pairs[s] for s in e1.pairs if s in e2.pairs})


def n_or(e1: NaiveExecution, e2: NaiveExecution) -> NaiveExecution:
    return NaiveExecution({s: e1.pairs[s] | e2.pairs[s] for s in e1.pairs if s in e2.pairs})


def n_seq(e1: NaiveExecution, e2: NaiveExecution) -> NaiveExecution:
    return NaiveExecution({s: e2.pairs[m] for s, m in e1.pairs.items() if m in e2.pairs})


def n_quant(u: Universe, var: str, e: NaiveExecution, universal: bool) -> NaiveExecution:
    xs = u.domain(var)
    out = {}
    for s in powerset(_guard(u)):
        if u.unbind(var, s) not in e.pairs:
            continue
        test = all if universal else any
        out[s] = frozenset(b for b in s if test(e.pairs[frozenset([b.override(var, x)])] for x in xs))
    return NaiveExecution(out)


def n_abort() -> NaiveExecution:
    return NaiveExecution({frozenset(): frozenset()})


def _assign_all(u: Universe, formals: tuple, args: tuple, b: Binding):
    vals = [naive_term(u, a, b) for a in args]
    if any(v is _UNDEF for v in vals):
        return None
    out = b
    for f, v in zip(formals, vals):
        if u.dom_pos[f][u.value_index(v)] < 0:
            raise DomainViolation(f"value {v} is outside the domain of {f}")
        out = out.override(f, v)
    return out


def n_apply_param(u: Universe, formals: tuple, body: NaiveExecution, args: tuple) -> NaiveExecution:
    out = {}
    for s in powerset(_guard(u)):
        moved = [_assign_all(u, formals, args, b) for b in s]
        if any(m is None for m in moved):
            continue
        if frozenset(moved) not in body.pairs:
            continue
        out[s] = frozenset(b for b, m in zip(s, moved) if body.pairs[frozenset([m])])
    return NaiveExecution(out)


NaivePExec = Callable[[tuple], NaiveExecution]


def naive_cexec(u: Universe, c, env: Optional[Mapping[str, NaivePExec]] = None) -> NaiveExecution:
    env = env or {}
    if isinstance(c, Spec):
        return n_spec(u, c.pred)
    if isinstance(c, Assert):
        return n_assert(u, c.pred)
    if isinstance(c, POr):
        return n_or(naive_cexec(u, c.left, env), naive_cexec(u, c.right, env))
    if isinstance(c, PAnd):
        return n_and(naive_cexec(u, c.left, env), naive_cexec(u, c.right, env))
    if isinstance(c, SAnd):
        return n_seq(naive_cexec(u, c.left, env), naive_cexec(u, c.right, env))
    if isinstance(c, (Exists, Forall)):
        return n_quant(u, c.var, naive_cexec(u, c.body, env), isinstance(c, Forall))
    if isinstance(c, Call):
        if c.proc in env:
            return env[c.proc](c.args)
        return n_abort()
    raise TypeError(f"cannot execute {type(c).__name__}")


def naive_pexec(u: Universe, pc, env: Optional[Mapping[str, NaivePExec]] = None,
                max_iter: int = 200) -> NaivePExec:
    """Parametrised execution; recursion blocks iterate from the everywhere-abort map."""
    env = dict(env or {})
    if isinstance(pc, Param):
        body = naive_cexec(u, pc.body, env)
        return lambda args: n_apply_param(u, pc.formals, body, tuple(args))
    if isinstance(pc, RecBlock):
        inner = pc.inner
        terms = {tuple(call.args) for call in call_nodes(inner) if call.proc == pc.ident}
        cache: dict = {}

        def solve(query):
            keys = sorted(terms | {tuple(query)}, key=repr)
            table = {k: n_abort() for k in keys}
            for _ in range(max_iter):
                step_env = dict(env)
                step_env[pc.ident] = lambda args, _t=table: _t[tuple(args)]
                p = naive_pexec(u, inner, step_env)
                nxt = {k: p(k) for k in keys}
                if nxt == table:
                    return table
                table = nxt
            raise ConfigError("naive fixed-point iteration did not stabilise")

        def run(args):
            args = tuple(args)
            if args not in cache:
                cache[args] = solve(args)[args]
            return cache[args]

        return run
    raise TypeError(f"not a parametrised command: {type(pc).__name__}")
