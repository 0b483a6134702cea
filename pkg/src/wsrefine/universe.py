"""Finite semantic domains: values, variable domains, functor tables, bindings and states.

Term and predicate evaluation is vectorised: a term evaluates to a *factor*,
an array of value indices over the axes of just the variables it mentions,
and a predicate to a factor of three-valued codes.  Per-binding operations
are thin views over those factors.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping
from enum import IntEnum
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from . import kernels as K
from .errors import ConfigError, DomainViolation, UndefinedTerm, UnknownVar
from .library import BUILTIN_FUNCTORS, LIBRARY_PREDICATES, canonical_functor
from .syntax.ast import (
    And, CapDecl, Compare, DomainSpec, ExistsP, FalsePred, ForallP, FunApp, FunDecl, Iff,
    Implies, Member, MetaPred, Not, Or, PredDef, TruePred, UniverseDecl, UserPred, ValuesAtoms,
    ValuesInt, ValuesLists, ValuesTerms, VarDecl, VarRef,
)
from .values import NIL, Atom, Compound, Cons, Nil, Pair, as_pylist, from_pylist, is_int, value_str

DEFAULT_CAP = 10**7


class PredValue(IntEnum):
    UNDEFINED = 0
    FALSE = 1
    TRUE = 2

    def __str__(self) -> str:
        return self.name.capitalize()


class _UndefinedValue:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Undefined"

    def __bool__(self) -> bool:
        return False


Undefined = _UndefinedValue()


# ------------------------------------------------------------- factor


class Factor:
    """A table over the axes of ``vars`` (ordered by the universe's variable order)."""

    __slots__ = ("vars", "table")

    def __init__(self, vars: tuple, table: np.ndarray):
        self.vars = tuple(vars)
        self.table = table

    def __repr__(self) -> str:  # pragma: no cover
        return f"Factor({self.vars}, shape={self.table.shape})"


# ------------------------------------------------------ builtin functors


def _int_args(*vals):
    return all(is_int(v) for v in vals)


def _f_add(a, b):
    return a + b if _int_args(a, b) else None


def _f_sub(a, b):
    return a - b if _int_args(a, b) else None


def _f_mul(a, b):
    return a * b if _int_args(a, b) else None


def _f_div(a, b):
    if not _int_args(a, b) or b == 0:
        return None
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def _f_mod(a, b):
    if not _int_args(a, b) or b == 0:
        return None
    return a - b * _f_div(a, b)


def _f_fact(a):
    if not is_int(a) or a < 0 or a > 170:
        return None
    return math.factorial(a)


def _f_len(a):
    items = as_pylist(a)
    return None if items is None else len(items)


def _f_nth(a, i):
    items = as_pylist(a)
    if items is None or not is_int(i) or not 1 <= i <= len(items):
        return None
    return items[i - 1]


BUILTIN_IMPL: dict[str, Callable] = {
    "+": _f_add,
    "-": _f_sub,
    "*": _f_mul,
    "/": _f_div,
    "mod": _f_mod,
    "max": lambda a, b: max(a, b) if _int_args(a, b) else None,
    "min": lambda a, b: min(a, b) if _int_args(a, b) else None,
    "abs": lambda a: abs(a) if is_int(a) else None,
    "neg": lambda a: -a if is_int(a) else None,
    "suc": lambda a: a + 1 if is_int(a) else None,
    "fact": _f_fact,
    "len": _f_len,
    "nth": _f_nth,
    "cons": lambda h, t: Cons(h, t),
    "nil": lambda: NIL,
    "pair": lambda a, b: Pair(a, b),
    "fst": lambda p: p.left if isinstance(p, Pair) else None,
    "snd": lambda p: p.right if isinstance(p, Pair) else None,
}


# ------------------------------------------------------ library predicates


def _l_psoln(s, n) -> bool:
    items = as_pylist(s)
    if items is None or not is_int(n):
        return False
    if not all(is_int(x) and 1 <= x <= n for x in items):
        return False
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] == items[j] or abs(i - j) == abs(items[i] - items[j]):
                return False
    return True


def _l_notrow(h, t) -> bool:
    items = as_pylist(t)
    return items is not None and all(x != h for x in items)


def _l_notdiag(h, t) -> bool:
    items = as_pylist(t)
    if items is None or not is_int(h) or not all(is_int(x) for x in items):
        return False
    return all(i != abs(h - x) for i, x in enumerate(items, start=1))


def _l_suffix(p, s) -> bool:
    a, b = as_pylist(p), as_pylist(s)
    if a is None or b is None or len(a) > len(b):
        return False
    return b[len(b) - len(a):] == a


LIBRARY_IMPL: dict[tuple, Callable] = {
    ("nat", 1): lambda x: is_int(x) and x >= 0,
    ("int", 1): is_int,
    ("list", 1): lambda x: as_pylist(x) is not None,
    ("even", 1): lambda x: is_int(x) and x % 2 == 0,
    ("odd", 1): lambda x: is_int(x) and x % 2 == 1,
    ("suffix", 2): _l_suffix,
    ("member", 2): lambda x, l: (as_pylist(l) is not None) and x in as_pylist(l),
    ("length", 2): lambda l, n: as_pylist(l) is not None and is_int(n) and len(as_pylist(l)) == n,
    ("fact", 2): lambda n, f: is_int(n) and is_int(f) and n >= 0 and _f_fact(n) == f,
    ("psoln", 2): _l_psoln,
    ("notrow", 2): _l_notrow,
    ("notdiag", 2): _l_notdiag,
}


# ------------------------------------------------------------- binding


class Binding(Mapping):
    """Total map from every declared variable to a value of its domain."""

    __slots__ = ("universe", "idx")

    def __init__(self, universe: "Universe", idx: tuple):
        self.universe = universe
        self.idx = tuple(int(i) for i in idx)

    def __getitem__(self, name: str):
        try:
            k = self.universe.var_index[name]
        except KeyError:
            raise KeyError(name) from None
        return self.universe.values[self.idx[k]]

    def __iter__(self) -> Iterator[str]:
        return iter(self.universe.var_names)

    def __len__(self) -> int:
        return len(self.idx)

    def __hash__(self) -> int:
        return hash(self.idx)

    def __eq__(self, other) -> bool:
        if isinstance(other, Binding):
            return self.idx == other.idx and self.universe is other.universe
        return NotImplemented

    def override(self, name: str, value) -> "Binding":
        u = self.universe
        k = u.var_index[name]
        vi = u.value_index(value)
        if u.dom_pos[name][vi] < 0:
            raise DomainViolation(f"value {value_str(value)} is outside the domain of {name}")
        idx = list(self.idx)
        idx[k] = vi
        return Binding(u, tuple(idx))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={value_str(self[n])}" for n in self.universe.var_names)
        return "{" + inner + "}"


# ------------------------------------------------------------ universe


class Universe:
    """Immutable finite universe of discourse."""

    def __init__(self, values: Iterable, vars: Mapping[str, Iterable], *,
                 functors: Optional[Mapping[str, tuple]] = None,
                 cap: int = DEFAULT_CAP,
                 macros: Iterable[PredDef] = ()):
        vals = []
        seen = set()
        for v in values:
            if v not in seen:
                seen.add(v)
                vals.append(v)
        if not vals:
            raise ConfigError("universe needs at least one value")
        self.values: tuple = tuple(vals)
        self.n = len(self.values)
        self._index = {v: i for i, v in enumerate(self.values)}
        self.cap = int(cap)
        self.var_names: tuple = tuple(vars)
        self.var_index = {n: i for i, n in enumerate(self.var_names)}
        self.domains: dict[str, np.ndarray] = {}
        self.dom_pos: dict[str, np.ndarray] = {}
        for name, dom in vars.items():
            idx = []
            for v in dom:
                if v not in self._index:
                    raise ConfigError(f"domain of {name} mentions {value_str(v)}, which is not a universe value")
                idx.append(self._index[v])
            idx = list(dict.fromkeys(idx))
            if not idx:
                raise ConfigError(f"domain of {name} is empty")
            arr = np.array(idx, dtype=np.int32)
            self.domains[name] = arr
            pos = np.full(self.n, -1, dtype=np.int32)
            pos[arr] = np.arange(len(arr), dtype=np.int32)
            self.dom_pos[name] = pos
        self.user_functors: dict[str, tuple] = {}
        for name, (arity, rows) in (functors or {}).items():
            self.user_functors[canonical_functor(name)] = (arity, dict(rows) if rows is not None else None)
        self.macros = {m.name: m for m in macros}
        self.is_int = np.array([is_int(v) for v in self.values], dtype=bool)
        self.int_val = np.array([v if is_int(v) else 0 for v in self.values], dtype=np.int64)
        self._functor_tables: dict = {}
        self._pred_tables: dict = {}
        self._cmp_tables: dict = {}
        self._term_cache: dict = {}
        self._pred_cache: dict = {}

    # -------------------------------------------------------- basics
    def value_index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise DomainViolation(f"{value_str(v)} is not a value of this universe") from None

    def has_value(self, v) -> bool:
        return v in self._index

    def domain(self, name: str) -> tuple:
        return tuple(self.values[i] for i in self._dom(name))

    def _dom(self, name: str) -> np.ndarray:
        try:
            return self.domains[name]
        except KeyError:
            raise UnknownVar(name) from None

    def dom_size(self, name: str) -> int:
        return len(self._dom(name))

    def order(self, names: Iterable[str]) -> tuple:
        names = set(names)
        for n in names:
            if n not in self.var_index:
                raise UnknownVar(n)
        return tuple(sorted(names, key=self.var_index.__getitem__))

    def shape(self, names: tuple) -> tuple:
        return tuple(len(self._dom(n)) for n in names)

    def check_size(self, names: tuple):
        size = 1
        for n in names:
            size *= len(self._dom(n))
        if size > self.cap:
            raise ConfigError(f"table over {', '.join(names)} has {size} cells, above the cap of {self.cap}")
        return size

    def align(self, f: Factor, names: tuple) -> np.ndarray:
        """Reshape ``f.table`` so it broadcasts over the axes of ``names``."""
        if f.vars == names:
            return f.table
        shape = []
        it = iter(f.vars)
        nxt = next(it, None)
        for n in names:
            if n == nxt:
                shape.append(len(self.domains[n]))
                nxt = next(it, None)
            else:
                shape.append(1)
        if nxt is not None:
            raise ValueError(f"factor variables {f.vars} are not contained in {names}")
        return f.table.reshape(shape)

    def expand(self, f: Factor, names: tuple) -> np.ndarray:
        names = self.order(names)
        self.check_size(names)
        return np.broadcast_to(self.align(f, names), self.shape(names))

    def with_vars(self, extra: Mapping[str, str]) -> "Universe":
        """A copy with extra variables, each sharing the domain of an existing one."""
        vars = {n: self.domain(n) for n in self.var_names}
        for new, like in extra.items():
            if new not in vars:
                vars[new] = self.domain(like)
        u = Universe(self.values, vars, functors={k: (a, r) for k, (a, r) in self.user_functors.items()},
                     cap=self.cap, macros=self.macros.values())
        return u

    def bindings(self) -> Iterator[Binding]:
        self.check_size(self.var_names)
        for combo in itertools.product(*(self.domains[n] for n in self.var_names)):
            yield Binding(self, combo)

    def binding(self, **assignment) -> Binding:
        """Build a binding; unspecified variables take the first value of their domain."""
        idx = []
        for n in self.var_names:
            if n in assignment:
                vi = self.value_index(assignment[n])
                if self.dom_pos[n][vi] < 0:
                    raise DomainViolation(f"{value_str(assignment[n])} is outside the domain of {n}")
                idx.append(vi)
            else:
                idx.append(int(self.domains[n][0]))
        unknown = set(assignment) - set(self.var_names)
        if unknown:
            raise UnknownVar(sorted(unknown)[0])
        return Binding(self, tuple(idx))

    def all_states_size(self) -> int:
        return self.check_size(self.var_names)

    # ---------------------------------------------------- tables
    def functor_arity(self, name: str) -> int:
        if name in self.user_functors:
            return self.user_functors[name][0]
        if name in BUILTIN_FUNCTORS:
            return BUILTIN_FUNCTORS[name]
        raise ConfigError(f"unknown functor {name}")

    def _functor_impl(self, name: str) -> Callable:
        if name in self.user_functors:
            arity, rows = self.user_functors[name]
            if rows is None:
                def ctor(*args, _n=name):
                    return Compound(_n, tuple(args))
                return ctor
            return lambda *args: rows.get(tuple(args))
        if name in BUILTIN_IMPL:
            return BUILTIN_IMPL[name]
        raise ConfigError(f"unknown functor {name}")

    def functor_table(self, name: str) -> np.ndarray:
        """Dense table of result indices over value indices; -1 marks Undefined."""
        tab = self._functor_tables.get(name)
        if tab is not None:
            return tab
        arity = self.functor_arity(name)
        if self.n ** arity > self.cap:
            raise ConfigError(f"functor table for {name} would exceed the cap")
        fn = self._functor_impl(name)
        tab = np.full((self.n,) * arity, -1, dtype=np.int32)
        for combo in itertools.product(range(self.n), repeat=arity):
            res = fn(*(self.values[i] for i in combo))
            if res is not None and res in self._index:
                tab[combo] = self._index[res]
        self._functor_tables[name] = tab
        return tab

    def constant_index(self, name: str) -> int:
        """Index of a nullary functor or integer literal, -1 when outside the universe."""
        if name.lstrip("-").isdigit():
            v = int(name)
        elif name in self.user_functors or name in BUILTIN_IMPL:
            v = self._functor_impl(name)()
        else:
            v = Atom(name)
        return self._index.get(v, -1)

    def library_table(self, name: str, arity: int) -> np.ndarray:
        key = (name, arity)
        tab = self._pred_tables.get(key)
        if tab is not None:
            return tab
        fn = LIBRARY_IMPL.get(key)
        if fn is None:
            raise ConfigError(f"unknown library predicate {name}/{arity}")
        if self.n ** arity > self.cap:
            raise ConfigError(f"predicate table for {name} would exceed the cap")
        tab = np.full((self.n,) * arity, 1, dtype=np.int8)
        for combo in itertools.product(range(self.n), repeat=arity):
            if fn(*(self.values[i] for i in combo)):
                tab[combo] = 2
        self._pred_tables[key] = tab
        return tab

    def compare_table(self, op: str) -> np.ndarray:
        tab = self._cmp_tables.get(op)
        if tab is not None:
            return tab
        n = self.n
        eye = np.eye(n, dtype=bool)
        if op == "=":
            res = eye
        elif op == "\\=":
            res = ~eye
        else:
            a = self.int_val[:, None]
            b = self.int_val[None, :]
            both = self.is_int[:, None] & self.is_int[None, :]
            cmp = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
            res = both & cmp
        tab = np.where(res, 2, 1).astype(np.int8)
        self._cmp_tables[op] = tab
        return tab

    # ------------------------------------------------ vectorised eval
    def term_factor(self, t) -> Factor:
        f = self._term_cache.get(t)
        if f is None:
            f = self._term_factor(t)
            if len(self._term_cache) < 20000:
                self._term_cache[t] = f
        return f

    def _term_factor(self, t) -> Factor:
        if isinstance(t, VarRef):
            return Factor((t.name,), self._dom(t.name))
        if not t.args:
            return Factor((), np.array(self.constant_index(t.functor), dtype=np.int32))
        args = [self.term_factor(a) for a in t.args]
        names = self.order(v for a in args for v in a.vars)
        self.check_size(names)
        table = self.functor_table(t.functor)
        out = K.k_gather(table, [self.align(a, names) for a in args])
        return Factor(names, np.asarray(out, dtype=np.int32).reshape(self.shape(names)))

    def pred_factor(self, p) -> Factor:
        f = self._pred_cache.get(p)
        if f is None:
            f = self._pred_factor(p)
            if len(self._pred_cache) < 20000:
                self._pred_cache[p] = f
        return f

    def _combine(self, fa: Factor, fb: Factor, kernel) -> Factor:
        names = self.order(fa.vars + fb.vars)
        self.check_size(names)
        out = kernel(self.align(fa, names), self.align(fb, names))
        return Factor(names, np.broadcast_to(out, self.shape(names)) if out.shape != self.shape(names) else out)

    def _pred_factor(self, p) -> Factor:
        if isinstance(p, TruePred):
            return Factor((), np.array(2, dtype=np.int8))
        if isinstance(p, FalsePred):
            return Factor((), np.array(1, dtype=np.int8))
        if isinstance(p, Compare):
            return self._table_pred(self.compare_table(p.op), [p.lhs, p.rhs])
        if isinstance(p, UserPred):
            if p.name in self.macros:
                return self.pred_factor(self._expand_macro(p))
            return self._table_pred(self.library_table(p.name, len(p.args)), list(p.args))
        if isinstance(p, Member):
            return self._member(p)
        if isinstance(p, And):
            return self._combine(self.pred_factor(p.left), self.pred_factor(p.right), K.k_and)
        if isinstance(p, Or):
            return self._combine(self.pred_factor(p.left), self.pred_factor(p.right), K.k_or)
        if isinstance(p, Implies):
            return self._combine(self.pred_factor(p.left), self.pred_factor(p.right), K.k_implies)
        if isinstance(p, Iff):
            return self._combine(self.pred_factor(p.left), self.pred_factor(p.right), K.k_iff)
        if isinstance(p, Not):
            f = self.pred_factor(p.body)
            return Factor(f.vars, K.k_not(f.table))
        if isinstance(p, (ExistsP, ForallP)):
            if p.lo is not None:
                return self._bounded(p)
            f = self.pred_factor(p.body)
            self._dom(p.var)
            if p.var not in f.vars:
                return f
            axis = f.vars.index(p.var)
            red = K.k_reduce_exists if isinstance(p, ExistsP) else K.k_reduce_forall
            return Factor(f.vars[:axis] + f.vars[axis + 1:], red(f.table, axis))
        if isinstance(p, MetaPred):
            raise ConfigError(f"cannot evaluate predicate metavariable {p.name}")
        raise TypeError(f"cannot evaluate {type(p).__name__}")

    def _expand_macro(self, p: UserPred):
        from .syntax.transforms import subst
        m = self.macros[p.name]
        return subst(m.body, dict(zip(m.params, p.args)))

    def _table_pred(self, table: np.ndarray, args: list) -> Factor:
        fs = [self.term_factor(a) for a in args]
        names = self.order(v for f in fs for v in f.vars)
        self.check_size(names)
        out = K.k_gather(table, [self.align(f, names) for f in fs])
        return Factor(names, np.asarray(out, dtype=np.int8).reshape(self.shape(names)))

    def _int_of(self, idx: np.ndarray):
        safe = np.where(idx < 0, 0, idx)
        ok = (idx >= 0) & self.is_int[safe]
        return ok, self.int_val[safe]

    def _member(self, p: Member) -> Factor:
        ft, flo, fhi = (self.term_factor(x) for x in (p.term, p.lo, p.hi))
        names = self.order(ft.vars + flo.vars + fhi.vars)
        self.check_size(names)
        t, lo, hi = (self.align(f, names) for f in (ft, flo, fhi))
        defined = (t >= 0) & (lo >= 0) & (hi >= 0)
        t_ok, tv = self._int_of(t)
        lo_ok, lov = self._int_of(lo)
        hi_ok, hiv = self._int_of(hi)
        inside = t_ok & lo_ok & hi_ok & (tv >= lov) & (tv <= hiv)
        out = np.where(defined, np.where(inside, 2, 1), 0).astype(np.int8)
        return Factor(names, np.broadcast_to(out, self.shape(names)))

    def _bounded(self, p) -> Factor:
        from .syntax.transforms import term_vars
        if p.var in term_vars(p.lo) | term_vars(p.hi):
            raise ConfigError(f"range of the quantifier over {p.var} mentions {p.var}")
        fb = self.pred_factor(p.body)
        flo = self.term_factor(p.lo)
        fhi = self.term_factor(p.hi)
        names = self.order(fb.vars + flo.vars + fhi.vars + (p.var,))
        self.check_size(names)
        axis = names.index(p.var)
        body = np.broadcast_to(self.align(fb, names), self.shape(names))
        lo_ok, lov = self._int_of(self.align(flo, names))
        hi_ok, hiv = self._int_of(self.align(fhi, names))
        dom = self.domains[p.var]
        shape = [1] * len(names)
        shape[axis] = len(dom)
        iv_ok = self.is_int[dom].reshape(shape)
        iv = self.int_val[dom].reshape(shape)
        in_range = iv_ok & (iv >= lov) & (iv <= hiv)
        count = in_range.sum(axis=axis)
        need = np.maximum(np.squeeze(hiv - lov + 1, axis=axis), 0)
        covered = count == need
        ok = np.squeeze(lo_ok & hi_ok, axis=axis) & covered
        if isinstance(p, ForallP):
            red = K.k_reduce_forall(np.where(in_range, body, 2).astype(np.int8), axis)
        else:
            red = K.k_reduce_exists(np.where(in_range, body, 1).astype(np.int8), axis)
        out = np.where(ok, red, 0).astype(np.int8)
        rest = names[:axis] + names[axis + 1:]
        return Factor(rest, np.broadcast_to(out, self.shape(rest)))

    # ------------------------------------------------- per binding
    def _lookup(self, f: Factor, b: Binding):
        pos = tuple(int(self.dom_pos[n][b.idx[self.var_index[n]]]) for n in f.vars)
        return f.table[pos] if pos else f.table[()]

    def eval_term(self, t, b: Binding):
        v = int(self._lookup(self.term_factor(t), b))
        return Undefined if v < 0 else self.values[v]

    def eval_pred(self, p, b: Binding) -> PredValue:
        return PredValue(int(self._lookup(self.pred_factor(p), b)))

    def term_defined(self, t, s: Iterable[Binding]) -> bool:
        return all(self.eval_term(t, b) is not Undefined for b in s)

    def assign(self, name: str, t, s: Iterable[Binding]) -> frozenset:
        out = set()
        self._dom(name)
        for b in s:
            v = self.eval_term(t, b)
            if v is Undefined:
                raise UndefinedTerm(f"term is undefined at {b}")
            out.add(b.override(name, v))
        return frozenset(out)

    def unbind(self, name: str, s: Iterable[Binding]) -> frozenset:
        dom = self.domain(name)
        return frozenset(b.override(name, x) for b in s for x in dom)

    def pred_states(self, p) -> frozenset:
        f = self.pred_factor(p)
        full = self.expand(f, self.var_names)
        return frozenset(Binding(self, self._idx_of(pos)) for pos in zip(*np.nonzero(full == 2)))

    def _idx_of(self, positions) -> tuple:
        return tuple(int(self.domains[n][p]) for n, p in zip(self.var_names, positions))

    def entails(self, p, q, ctx=None) -> bool:
        """Every binding where ``ctx`` and ``p`` are True makes ``q`` True."""
        fp = self.pred_factor(p)
        if ctx is not None:
            fp = self._combine(self.pred_factor(ctx), fp, K.k_and)
        fq = self.pred_factor(q)
        names = self.order(fp.vars + fq.vars)
        self.check_size(names)
        a = self.align(fp, names)
        b = self.align(fq, names)
        return bool(np.all((a != 2) | (b == 2)))

    def witness(self, f: Factor, mask: np.ndarray) -> Optional[dict]:
        """First assignment (over ``f.vars``) where ``mask`` holds, as a dict of values."""
        hits = np.argwhere(np.broadcast_to(mask, self.shape(f.vars)))
        if len(hits) == 0:  # not hits.size: a 0-d hit has shape (1, 0)
            return None
        pos = hits[0]
        return {n: self.values[int(self.domains[n][p])] for n, p in zip(f.vars, pos)}


# ------------------------------------------------------------ builders


def _ground_value(u_funcs: dict, t) -> object:
    """Evaluate a ground term outside any universe (used while building one)."""
    if isinstance(t, VarRef):
        raise ConfigError(f"expected a ground term, found variable {t.name}")
    name = t.functor
    if name.lstrip("-").isdigit():
        return int(name)
    args = [_ground_value(u_funcs, a) for a in t.args]
    if name in u_funcs:
        arity, rows = u_funcs[name]
        if rows is None:
            return Compound(name, tuple(args))
        return rows.get(tuple(args))
    if name in BUILTIN_IMPL:
        return BUILTIN_IMPL[name](*args)
    if not args:
        return Atom(name)
    return Compound(name, tuple(args))


def _lists_upto(maxlen: int, elems: list) -> list:
    out = []
    for k in range(maxlen + 1):
        for combo in itertools.product(elems, repeat=k):
            out.append(from_pylist(combo))
    return out


def _term_closure(depth: int, functors, int_range, limit: int = 200000) -> list:
    consts = []
    if int_range is not None:
        consts.extend(range(int_range[0], int_range[1] + 1))

    def make(name, args):
        if name == "nil":
            return NIL
        if name == "cons":
            return Cons(*args)
        if name == "pair":
            return Pair(*args)
        if not args:
            return Atom(name)
        return Compound(name, tuple(args))

    for name, arity in functors:
        if arity == 0:
            consts.append(make(name, ()))
    levels = [list(dict.fromkeys(consts))]
    everything = list(levels[0])
    for _ in range(1, depth):
        new = []
        known = set(everything)
        for name, arity in functors:
            if arity == 0:
                continue
            for combo in itertools.product(everything, repeat=arity):
                v = make(name, combo)
                if v not in known:
                    known.add(v)
                    new.append(v)
                    if len(everything) + len(new) > limit:
                        raise ConfigError("ground-term closure is too large")
        everything.extend(new)
    return everything


def build_universe(decl: UniverseDecl, preds: Iterable[PredDef] = ()) -> Universe:
    values: list = []
    user_funcs: dict = {}
    cap = DEFAULT_CAP
    for item in decl.items:
        if isinstance(item, FunDecl) and item.builtin is None:
            user_funcs[item.name] = (item.arity, None)
        elif isinstance(item, ValuesTerms):
            for name, arity in item.functors:
                if name not in BUILTIN_IMPL and arity > 0:
                    user_funcs.setdefault(name, (arity, None))
    for item in decl.items:
        if isinstance(item, ValuesInt):
            values.extend(range(item.lo, item.hi + 1))
        elif isinstance(item, ValuesLists):
            values.extend(_lists_upto(item.maxlen, list(range(item.lo, item.hi + 1))))
        elif isinstance(item, ValuesAtoms):
            values.extend(Atom(a) for a in item.names)
        elif isinstance(item, ValuesTerms):
            values.extend(_term_closure(item.depth, item.functors, item.int_range))
        elif isinstance(item, CapDecl):
            cap = item.cap
    for item in decl.items:
        if isinstance(item, FunDecl) and item.builtin is None:
            rows = {}
            for args, res in item.rows:
                if len(args) != item.arity:
                    raise ConfigError(f"row for {item.name} has {len(args)} arguments, expected {item.arity}")
                rows[tuple(_ground_value(user_funcs, a) for a in args)] = _ground_value(user_funcs, res)
            user_funcs[item.name] = (item.arity, rows)
        elif isinstance(item, FunDecl) and item.builtin is not None:
            if canonical_functor(item.name) not in BUILTIN_IMPL:
                raise ConfigError(f"{item.name} is not a built-in functor")
    value_set = set(values)
    vars: dict = {}
    for item in decl.items:
        if not isinstance(item, VarDecl):
            continue
        dom = _domain_values(item.domain, values, value_set, user_funcs)
        for n in item.names:
            vars[n] = dom
    return Universe(values, vars, functors=user_funcs, cap=cap, macros=preds)


def _domain_values(d: DomainSpec, values: list, value_set: set, user_funcs: dict) -> list:
    if d.kind == "all":
        return list(values)
    if d.kind == "ints":
        return [v for v in values if is_int(v)]
    if d.kind == "lists":
        limit = d.args[0] if d.args else None
        return [v for v in values if as_pylist(v) is not None and (limit is None or len(as_pylist(v)) <= limit)]
    if d.kind == "atoms":
        return [v for v in values if isinstance(v, Atom)]
    if d.kind == "range":
        lo, hi = d.args
        out = list(range(lo, hi + 1))
    elif d.kind == "set":
        out = [_ground_value(user_funcs, t) for t in d.args]
    else:
        raise ConfigError(f"unknown domain kind {d.kind}")
    for v in out:
        if v not in value_set:
            raise ConfigError(f"domain value {value_str(v)} is not declared in the universe")
    return out


def small_universe(nvars: int, nvals: int, names: Optional[Iterable[str]] = None, cap: int = DEFAULT_CAP) -> Universe:
    """Uniform universe with integer values 0..nvals-1 and variables X, Y, Z, W, ..."""
    default = ["X", "Y", "Z", "W", "V", "T", "R", "Q"]
    names = list(names) if names is not None else default[:nvars]
    if len(names) < nvars:
        names += [f"X{i}" for i in range(len(names), nvars)]
    vals = list(range(nvals))
    return Universe(vals, {n: vals for n in names[:nvars]}, cap=cap)
