"""Executability analysis and translation of refined programs to Prolog.

The executable fragment consists of specifications whose predicate is a
conjunction of comparisons over arithmetic and list terms, disjunction,
sequential conjunction, existential quantification, calls and recursion
blocks.  Translation splits top-level disjunctions into clauses, drops
existentials, folds list patterns on input arguments into clause heads and
orders goals left to right so that every ``is`` has a ground right-hand side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import UnorderableDataflow
from .library import ARITHMETIC_FUNCTORS
from .syntax.ast import (
    And, Assert, Call, Compare, Exists, FalsePred, Forall, ForallP, FunApp, Param, PAnd,
    POr, ProgramAst, RecBlock, SAnd, Spec, TruePred, VarRef, is_int_literal,
)
from .syntax.transforms import all_vars, flatten, rename_calls, rename_var
from .values import as_pylist

# ------------------------------------------------------------ executability

REASONS = ("general-spec", "assumption", "universal-quantifier", "parallel-conjunction",
           "non-arithmetic-spec")

_TERM_FUNCTORS = ARITHMETIC_FUNCTORS | {"cons", "nil", "len"}


@dataclass
class ExecutabilityReport:
    violations: list = field(default_factory=list)  # of ((proc, path), reason)

    @property
    def verdict(self) -> str:
        return "rejected" if self.violations else "executable"

    @property
    def executable(self) -> bool:
        return not self.violations

    def reasons(self) -> set:
        return {r for _, r in self.violations}

    def text(self) -> str:
        if not self.violations:
            return "executable"
        lines = ["rejected:"]
        for (proc, path), reason in self.violations:
            lines.append(f"  {proc} at [{', '.join(map(str, path))}]: {reason}")
        return "\n".join(lines)


def _term_ok(t) -> bool:
    if isinstance(t, VarRef):
        return True
    if is_int_literal(t.functor):
        return True
    return t.functor in _TERM_FUNCTORS and all(_term_ok(a) for a in t.args)


def _pred_reason(p) -> Optional[str]:
    if isinstance(p, (TruePred, FalsePred)):
        return None
    if isinstance(p, And):
        return _pred_reason(p.left) or _pred_reason(p.right)
    if isinstance(p, Compare):
        return None if _term_ok(p.lhs) and _term_ok(p.rhs) else "non-arithmetic-spec"
    if isinstance(p, ForallP):
        return "universal-quantifier"
    return "general-spec"


def _command_violations(c, path: tuple, out: list):
    if isinstance(c, Spec):
        reason = _pred_reason(c.pred)
        if reason:
            out.append((path, reason))
    elif isinstance(c, Assert):
        out.append((path, "assumption"))
    elif isinstance(c, Forall):
        out.append((path, "universal-quantifier"))
        _command_violations(c.body, path + (0,), out)
    elif isinstance(c, PAnd):
        out.append((path, "parallel-conjunction"))
        _command_violations(c.left, path + (0,), out)
        _command_violations(c.right, path + (1,), out)
    elif isinstance(c, (POr, SAnd)):
        _command_violations(c.left, path + (0,), out)
        _command_violations(c.right, path + (1,), out)
    elif isinstance(c, Exists):
        _command_violations(c.body, path + (0,), out)
    elif isinstance(c, Param):
        _command_violations(c.body, path + (0,), out)
    elif isinstance(c, RecBlock):
        _command_violations(c.inner, path + (0,), out)
    elif not isinstance(c, Call):
        out.append((path, "general-spec"))


def check_executable(p) -> ExecutabilityReport:
    """Locate the constructs of ``p`` (a program or a single command) that Prolog cannot run."""
    rep = ExecutabilityReport()
    items = p.procs if isinstance(p, ProgramAst) else (("_", p),)
    for name, pc in items:
        found: list = []
        _command_violations(pc, (), found)
        rep.violations += [((name, path), reason) for path, reason in found]
    return rep


# -------------------------------------------------------------- Prolog terms


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PNum:
    value: int


@dataclass(frozen=True)
class PStruct:
    functor: str
    args: tuple = ()


NIL = PStruct("[]")
_INFIX = {"+": 500, "-": 500, "*": 400, "/": 400, "mod": 400}
_CMP = {"=": "=", "\\=": "=\\=", "<": "<", "<=": "=<", ">": ">", ">=": ">="}
_GOAL_INFIX = {"is", "=", "\\=", "=\\=", "=:=", "<", "=<", ">", ">=", "\\=="}


@dataclass
class PrologClause:
    head: PStruct
    body: list = field(default_factory=list)


@dataclass
class PrologUnit:
    clauses: list = field(default_factory=list)
    entries: list = field(default_factory=list)
    singletons: list = field(default_factory=list)  # (predicate, variable) rendered as _

    def predicates(self) -> list:
        seen: list = []
        for c in self.clauses:
            key = (c.head.functor, len(c.head.args))
            if key not in seen:
                seen.append(key)
        return seen

    def clauses_of(self, name: str) -> list:
        return [c for c in self.clauses if c.head.functor == name]


def _vars_of(t, out: list) -> list:
    if isinstance(t, PVar):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, PStruct):
        for a in t.args:
            _vars_of(a, out)
    elif isinstance(t, (list, tuple)):
        for a in t:
            _vars_of(a, out)
    return out


def _is_arith(t) -> bool:
    return isinstance(t, PStruct) and t.functor in _INFIX or (
        isinstance(t, PStruct) and t.functor in ("max", "min"))


def _is_list(t) -> bool:
    return isinstance(t, PStruct) and t.functor in (".", "[]")


# ------------------------------------------------------------------ emission


class _Names:
    def __init__(self, used):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        name = base
        n = 1
        while name in self.used:
            name = f"{base}{n}"
            n += 1
        self.used.add(name)
        return name


def _expr_name(t) -> str:
    if isinstance(t, PVar):
        return t.name
    if isinstance(t, PNum):
        return str(t.value).replace("-", "m")
    if t.functor in _INFIX:
        op = {"+": "", "-": "m", "*": "t", "/": "d", "mod": "mod"}[t.functor]
        return _expr_name(t.args[0]) + op + _expr_name(t.args[1])
    return t.functor.capitalize() + "".join(_expr_name(a) for a in t.args)


@dataclass
class _Goal:
    """A goal group: the goals it emits, the variables it needs ground and those it grounds."""

    goals: list
    needs: set
    makes: set


class _ClauseBuilder:
    def __init__(self, emitter: "_Emitter", names: _Names, ground: set, bound: Optional[set] = None):
        self.e = emitter
        self.names = names
        self.ground = set(ground)
        self.bound = bound if bound is not None else set()  # variable names in scope

    # terms ---------------------------------------------------------
    def term(self, t, pre: list):
        """Translate a term, pushing helper goals (length/abs) onto ``pre``."""
        if isinstance(t, VarRef):
            return PVar(t.name)
        f = t.functor
        if is_int_literal(f):
            return PNum(int(f))
        if f == "nil":
            return NIL
        if f == "cons":
            return PStruct(".", (self.term(t.args[0], pre), self.term(t.args[1], pre)))
        if f == "len":
            lst = self.term(t.args[0], pre)
            out = PVar(self.names.fresh("M"))
            pre.append(PStruct("length", (lst, out)))
            return out
        if f == "abs":
            inner = self.term(t.args[0], pre)
            if not isinstance(inner, (PVar, PNum)):
                v = PVar(self.names.fresh(_expr_name(inner)))
                pre.append(PStruct("is", (v, inner)))
                inner = v
            out = PVar(self.names.fresh("Abs" + _expr_name(inner)))
            pre.append(PStruct("abs", (inner, out)))
            return out
        if f == "neg":
            return PStruct("-", (PNum(0), self.term(t.args[0], pre)))
        if f == "suc":
            return PStruct("+", (self.term(t.args[0], pre), PNum(1)))
        return PStruct(f, tuple(self.term(a, pre) for a in t.args))

    # goals -----------------------------------------------------------
    def compare(self, c: Compare) -> _Goal:
        for a, b in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
            if (c.op == "=" and isinstance(a, FunApp) and a.functor == "len"
                    and (isinstance(b, VarRef) or is_int_literal(getattr(b, "functor", "")))):
                lst, n = self.term(a.args[0], []), self.term(b, [])
                return _Goal([PStruct("length", (lst, n))], set(_vars_of(lst, [])), set(_vars_of(n, [])))
        pre: list = []
        lhs = self.term(c.lhs, pre)
        rhs = self.term(c.rhs, pre)
        needs = set()
        makes = set()
        for g in pre:
            if g.functor == "length":
                needs |= set(_vars_of(g.args[0], []))
                makes |= set(_vars_of(g.args[1], []))
            elif g.functor == "is":
                needs |= set(_vars_of(g.args[1], [])) - makes
                makes.add(g.args[0].name)
            else:  # abs
                makes.add(g.args[1].name)
        return _Goal(pre + [("cmp", c.op, lhs, rhs)], needs, makes)

    def call(self, c: Call) -> _Goal:
        name = self.e.proc_names.get(c.proc, c.proc)
        pre: list = []
        args = []
        modes = self.e.modes.get(name)
        needs: set = set()
        for k, a in enumerate(c.args):
            t = self.term(a, pre)
            if _is_arith(t):
                v = PVar(self.names.fresh(_expr_name(t)))
                pre.append(PStruct("is", (v, t)))
                needs |= set(_vars_of(t, []))
                t = v
            if modes is not None and k < len(modes) and modes[k] == "in":
                needs |= set(_vars_of(t, []))
            args.append(t)
        made = {g.args[0].name for g in pre if g.functor == "is"}
        makes = set(_vars_of(args, [])) | made
        return _Goal(pre + [PStruct(name, tuple(args))], needs - made, makes)

    def resolve(self, g) -> Optional[list]:
        """Concrete goals for ``g`` given the current ground set, or None if not ready."""
        out = []
        for item in g.goals:
            if isinstance(item, tuple):
                goal = self._resolve_cmp(*item[1:])
                if goal is None:
                    return None
                out.append(goal)
            else:
                out.append(item)
        return out

    def _resolve_cmp(self, op, lhs, rhs):
        gl = set(_vars_of(lhs, [])) <= self.ground
        gr = set(_vars_of(rhs, [])) <= self.ground
        if op == "=":
            if gl and gr:
                return PStruct("=:=" if _is_arith(lhs) or _is_arith(rhs) else "=", (lhs, rhs))
            if isinstance(lhs, PVar) and not gl and gr:
                return PStruct("is" if _is_arith(rhs) else "=", (lhs, rhs))
            if isinstance(rhs, PVar) and not gr and gl:
                return PStruct("is" if _is_arith(lhs) else "=", (rhs, lhs))
            if not (_is_arith(lhs) or _is_arith(rhs)) and (gl or gr):
                return PStruct("=", (lhs, rhs))
            return None
        if not (gl and gr):
            return None
        if op == "\\=" and (_is_list(lhs) or _is_list(rhs)):
            return PStruct("\\==", (lhs, rhs))
        return PStruct(_CMP[op], (lhs, rhs))

    def order(self, groups: list, where: str) -> list:
        """Producers before consumers, otherwise source order."""
        pending = list(groups)
        body = []
        while pending:
            for i, g in enumerate(pending):
                if not g.needs <= self.ground:
                    continue
                saved = self.ground
                self.ground = saved | g.makes  # helper outputs feed the goal's own comparison
                goals = self.resolve(g)
                self.ground = saved
                if goals is None:
                    continue
                body += goals
                for goal in goals:
                    self.ground |= set(_vars_of(goal, [])) if goal.functor != "\\==" else set()
                self.ground |= g.makes
                del pending[i]
                break
            else:
                stuck = "; ".join(render_goal(x) if not isinstance(x, tuple) else _render_cmp_src(x)
                                  for g in pending for x in g.goals)
                raise UnorderableDataflow(f"{where}: no goal order grounds the inputs of: {stuck}")
        return body


def _render_cmp_src(item) -> str:
    _, op, lhs, rhs = item
    return f"{render_term(lhs)} {op} {render_term(rhs)}"


class _Emitter:
    def __init__(self, program: ProgramAst):
        self.program = program
        self.modes = dict(program.mode_map)
        self.proc_names: dict = {}

    def emit(self) -> PrologUnit:
        unit = PrologUnit()
        for name, pc in self.program.procs:
            unit.entries.append(name)
            unit.clauses += self.procedure(name, pc, unit)
        return unit

    def procedure(self, name: str, pc, unit: PrologUnit) -> list:
        while isinstance(pc, RecBlock):
            self.proc_names[pc.ident] = name
            pc = Param(pc.inner.formals, rename_calls(pc.inner.body, pc.ident, name)) \
                if isinstance(pc.inner, Param) else pc.inner
        self.proc_names[name] = name
        formals = pc.formals
        modes = self.modes.get(name, ("in",) * len(formals))
        clauses = []
        for branch in flatten(pc.body, POr):
            clauses.append(self.clause(name, formals, modes, branch, unit))
        return clauses

    def clause(self, name, formals, modes, branch, unit) -> PrologClause:
        names = _Names(set(formals) | all_vars(branch))
        bound = set(formals)
        items = self._items(branch, bound, names)
        head = [PVar(f) for f in formals]
        # fold list patterns on input arguments into the head
        while items and isinstance(items[0], Spec) and isinstance(items[0].pred, Compare):
            cmp = items[0].pred
            if not (cmp.op == "=" and isinstance(cmp.lhs, VarRef) and cmp.lhs.name in formals
                    and isinstance(cmp.rhs, FunApp) and cmp.rhs.functor in ("nil", "cons")):
                break
            k = formals.index(cmp.lhs.name)
            if modes[k] != "in" or head[k] != PVar(cmp.lhs.name):
                break
            head[k] = _ClauseBuilder(self, names, set()).term(cmp.rhs, [])
            items = items[1:]
        ground = set(_vars_of([h for h, m in zip(head, modes) if m == "in"], []))
        b = _ClauseBuilder(self, names, ground, bound)
        groups = [self.group(b, it) for it in items]
        body = b.order(groups, f"{name}/{len(formals)}")
        body = [g for g in body if g != PStruct("true")]  # a bare `true` makes the clause a fact
        clause = PrologClause(PStruct(name, tuple(head)), body)
        return self._mark_singletons(clause, unit)

    def group(self, b: _ClauseBuilder, item) -> _Goal:
        if isinstance(item, Call):
            return b.call(item)
        if isinstance(item, Spec):
            parts = flatten(item.pred, And)
            if len(parts) == 1:
                p = parts[0]
                if isinstance(p, TruePred):
                    return _Goal([PStruct("true")], set(), set())
                if isinstance(p, FalsePred):
                    return _Goal([PStruct("fail")], set(), set())
                return b.compare(p)
            subs = [self.group(b, Spec(p)) for p in parts]
            return _Goal([x for s in subs for x in s.goals], set().union(*(s.needs for s in subs)),
                         set().union(*(s.makes for s in subs)))
        if isinstance(item, POr):
            branches = []
            needs, makes = set(), None
            for br in flatten(item, POr):
                inner = _ClauseBuilder(self, b.names, b.ground, set(b.bound))
                its = self._items(br, inner.bound, b.names)
                goals = inner.order([self.group(inner, it) for it in its], "disjunction")
                branches.append(goals)
                made = inner.ground - b.ground
                makes = made if makes is None else makes & made
            return _Goal([PStruct(";", tuple(tuple(g) for g in branches))], needs, makes or set())
        raise UnorderableDataflow(f"cannot translate {type(item).__name__}")

    def _items(self, c, bound: set, names: _Names) -> list:
        """Sequential items of ``c`` with existentials dropped.

        A bound variable whose name is already in use in the clause is
        renamed inside its own scope only.
        """
        out = []
        for part in flatten(c, SAnd):
            while isinstance(part, Exists):
                var, body = part.var, part.body
                if var in bound:
                    fresh = names.fresh(var)
                    body = rename_var(body, var, fresh)
                    var = fresh
                bound.add(var)
                part = body
            if isinstance(part, SAnd):
                out += self._items(part, bound, names)
            else:
                out.append(part)
        return out

    def _mark_singletons(self, clause: PrologClause, unit: PrologUnit) -> PrologClause:
        counts: dict = {}

        def count(t):
            if isinstance(t, PVar):
                counts[t.name] = counts.get(t.name, 0) + 1
            elif isinstance(t, PStruct):
                for a in t.args:
                    if isinstance(a, tuple):
                        for g in a:
                            count(g)
                    else:
                        count(a)
            elif isinstance(t, tuple):
                for a in t:
                    count(a)

        count(clause.head)
        for g in clause.body:
            count(g)
        singles = {n for n, k in counts.items() if k == 1}
        if not singles:
            return clause
        unit.singletons += [(clause.head.functor, n) for n in sorted(singles)]
        return PrologClause(_anon(clause.head, singles), [_anon(g, singles) for g in clause.body])


def _anon(t, names: set):
    if isinstance(t, PVar):
        return PVar("_") if t.name in names else t
    if isinstance(t, PStruct):
        return PStruct(t.functor, tuple(_anon(a, names) for a in t.args))
    if isinstance(t, tuple):
        return tuple(_anon(a, names) for a in t)
    return t


def emit_prolog(p: ProgramAst) -> PrologUnit:
    """Translate an executable program; raises ``UnorderableDataflow`` when no goal order works."""
    rep = check_executable(p)
    if not rep.executable:
        raise ValueError(f"program is not executable: {rep.text()}")
    return _Emitter(p).emit()


# ----------------------------------------------------------------- render


def render_term(t, prec: int = 1200) -> str:
    if isinstance(t, PVar):
        return t.name
    if isinstance(t, PNum):
        return str(t.value)
    if t.functor == "[]":
        return "[]"
    if t.functor == ".":
        items = []
        while isinstance(t, PStruct) and t.functor == ".":
            items.append(render_term(t.args[0]))
            t = t.args[1]
        tail = "" if t == NIL else "|" + render_term(t)
        return "[" + ",".join(items) + tail + "]"
    if t.functor in _INFIX and len(t.args) == 2:
        p = _INFIX[t.functor]
        op = {"/": "//", "mod": " rem "}.get(t.functor, t.functor)
        s = render_term(t.args[0], p) + op + render_term(t.args[1], p - 1)
        return f"({s})" if p > prec else s
    if not t.args:
        return t.functor
    return f"{t.functor}({','.join(render_term(a) for a in t.args)})"


def render_goal(g) -> str:
    if g.functor == ";":
        return "(" + " ; ".join(", ".join(render_goal(x) for x in br) for br in g.args) + ")"
    if g.functor in _GOAL_INFIX and len(g.args) == 2:
        sep = " is " if g.functor == "is" else g.functor
        return render_term(g.args[0], 699) + sep + render_term(g.args[1], 699)
    return render_term(g)


def render(unit: PrologUnit) -> str:
    """One clause per line, a blank line between predicates."""
    lines = []
    prev = None
    for c in unit.clauses:
        key = (c.head.functor, len(c.head.args))
        if prev is not None and key != prev:
            lines.append("")
        prev = key
        head = render_term(c.head)
        lines.append(f"{head} :- {', '.join(render_goal(g) for g in c.body)}." if c.body else f"{head}.")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------- ground harness


class _Ref:
    __slots__ = ("name",)
    _ids = itertools.count()

    def __init__(self, name):
        self.name = f"{name}#{next(self._ids)}"


def _walk(t, s):
    while isinstance(t, _Ref) and t in s:
        t = s[t]
    return t


def _unify(a, b, s):
    a, b = _walk(a, s), _walk(b, s)
    if a is b or (not isinstance(a, (_Ref, tuple)) and a == b):
        return s
    if isinstance(a, _Ref):
        return {**s, a: b}
    if isinstance(b, _Ref):
        return {**s, b: a}
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b) and a[0] == b[0]:
        for x, y in zip(a[1:], b[1:]):
            s = _unify(x, y, s)
            if s is None:
                return None
        return s
    return None


def _fresh(t, m):
    if isinstance(t, PVar):
        if t.name == "_":
            return _Ref("_")
        return m.setdefault(t.name, _Ref(t.name))
    if isinstance(t, PNum):
        return t.value
    if isinstance(t, PStruct):
        if t.functor == "[]":
            return "[]"
        return (t.functor,) + tuple(_fresh(a, m) if not isinstance(a, tuple) else tuple(
            tuple(_fresh(g, m) for g in br) for br in (a,))[0] for a in t.args)
    return t


def _arith(t, s):
    t = _walk(t, s)
    if isinstance(t, int):
        return t
    if isinstance(t, _Ref) or not isinstance(t, tuple):
        raise UnorderableDataflow("arithmetic on an unbound variable")
    x = [_arith(a, s) for a in t[1:]]
    f = t[0]
    if f in ("/", "mod"):
        q = abs(x[0]) // abs(x[1])  # ZeroDivisionError surfaces as in Prolog
        q = q if (x[0] >= 0) == (x[1] > 0) else -q
        return q if f == "/" else x[0] - x[1] * q
    return {"+": lambda: x[0] + x[1], "-": lambda: x[0] - x[1], "*": lambda: x[0] * x[1],
            "max": lambda: max(x), "min": lambda: min(x)}[f]()


def _to_list(t, s):
    out = []
    t = _walk(t, s)
    while isinstance(t, tuple) and t[0] == ".":
        out.append(t[1])
        t = _walk(t[2], s)
    return out if t == "[]" else None


_TESTS = {"<": lambda a, b: a < b, "=<": lambda a, b: a <= b, ">": lambda a, b: a > b,
          ">=": lambda a, b: a >= b, "=:=": lambda a, b: a == b, "=\\=": lambda a, b: a != b}


def _solve(program: dict, goals: tuple, s: dict, depth: int) -> Iterator[dict]:
    if not goals:
        yield s
        return
    if depth <= 0:
        raise RecursionError("ground harness depth exceeded")
    g, rest = goals[0], goals[1:]
    f = g[0]
    if f == "true":
        yield from _solve(program, rest, s, depth)
    elif f == "fail":
        return
    elif f in ("=", "is"):
        rhs = g[2] if f == "=" else _arith(g[2], s)
        s2 = _unify(g[1], rhs, s)
        if s2 is not None:
            yield from _solve(program, rest, s2, depth)
    elif f == "\\==":
        if _walk(g[1], s) != _walk(g[2], s):
            yield from _solve(program, rest, s, depth)
    elif f in _TESTS:
        if _TESTS[f](_arith(g[1], s), _arith(g[2], s)):
            yield from _solve(program, rest, s, depth)
    elif f == "abs":
        s2 = _unify(g[2], abs(_arith(g[1], s)), s)
        if s2 is not None:
            yield from _solve(program, rest, s2, depth)
    elif f == "length":
        items = _to_list(g[1], s)
        if items is None:
            raise UnorderableDataflow("length/2 on a partial list")
        s2 = _unify(g[2], len(items), s)
        if s2 is not None:
            yield from _solve(program, rest, s2, depth)
    elif f == ";":
        for br in g[1:]:
            yield from _solve(program, tuple(br) + rest, s, depth)
    else:
        for head, body in program.get((f, len(g) - 1), ()):
            m: dict = {}
            h = _fresh(head, m)
            s2 = _unify(h, g, s)
            if s2 is not None:
                yield from _solve(program, tuple(_fresh(b, m) for b in body) + rest, s2, depth - 1)


def _from_value(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    items = as_pylist(v) if not isinstance(v, (list, tuple)) else list(v)
    if items is None:
        raise TypeError(f"no Prolog counterpart for value {v!r}")
    out = "[]"
    for x in reversed(items):
        out = (".", _from_value(x), out)
    return out


def ground_query(unit: PrologUnit, name: str, args: tuple, depth: int = 200) -> bool:
    """Does the ground query ``name(args)`` succeed under the clauses of ``unit``?"""
    program: dict = {}
    for c in unit.clauses:
        program.setdefault((c.head.functor, len(c.head.args)), []).append((c.head, c.body))
    goal = (name,) + tuple(_from_value(a) for a in args)
    return next(_solve(program, (goal,), {}, depth), None) is not None


def spot_check(unit: PrologUnit, name: str, table) -> list:
    """Ground queries where Prolog and the denotation disagree.

    ``table`` is a parametrised execution of ``name``; only arguments with a
    defined status are compared.  Returns ``[(args, status, prolog_succeeds)]``.
    """
    bad = []
    for idx in itertools.product(*(range(len(d)) for d in table.domains())):
        status = int(table.table[idx])
        if status == 0:
            continue
        args = tuple(table.universe.values[d[i]] for d, i in zip(table.domains(), idx))
        got = ground_query(unit, name, args)
        if got != (status == 2):
            bad.append((args, status, got))
    return bad
