"""Structural utilities over the AST: free variables, substitution, focus paths,
associativity normalisation, alpha-equivalence and the mutual-recursion encoding."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Iterable

from ..errors import DuplicateFormal, MatchFailure
from .ast import (
    And, Assert, Call, Command, Compare, Exists, ExistsP, FalsePred, Forall, ForallP,
    FunApp, Iff, Implies, Member, MetaCmd, MetaPred, Not, Or, PAnd, POr, Param,
    RecBlock, SAnd, Spec, TruePred, UserPred, VarRef, int_term,
)

# --------------------------------------------------------------- free vars


def term_vars(t) -> set[str]:
    if isinstance(t, VarRef):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(node) -> set[str]:
    """Free variables of a term, predicate, command or parametrised command."""
    if isinstance(node, (VarRef, FunApp)):
        return term_vars(node)
    if isinstance(node, (TruePred, FalsePred, MetaPred, MetaCmd)):
        return set()
    if isinstance(node, Compare):
        return term_vars(node.lhs) | term_vars(node.rhs)
    if isinstance(node, Member):
        return term_vars(node.term) | term_vars(node.lo) | term_vars(node.hi)
    if isinstance(node, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Not):
        return free_vars(node.body)
    if isinstance(node, (ExistsP, ForallP)):
        out = free_vars(node.body) - {node.var}
        if node.lo is not None:
            out |= term_vars(node.lo) | term_vars(node.hi)
        return out
    if isinstance(node, UserPred):
        out = set()
        for a in node.args:
            out |= term_vars(a)
        return out
    if isinstance(node, (Spec, Assert)):
        return free_vars(node.pred)
    if isinstance(node, (Exists, Forall)):
        return free_vars(node.body) - {node.var}
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= term_vars(a)
        return out
    if isinstance(node, Param):
        return free_vars(node.body) - set(node.formals)
    if isinstance(node, RecBlock):
        return free_vars(node.inner)
    raise TypeError(f"free_vars: unsupported node {type(node).__name__}")


def calls_in(node) -> set[str]:
    """Procedure identifiers called anywhere inside a command or pcommand."""
    out: set[str] = set()

    def walk(n):
        if isinstance(n, Call):
            out.add(n.proc)
        elif isinstance(n, (POr, PAnd, SAnd)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Exists, Forall)):
            walk(n.body)
        elif isinstance(n, Param):
            walk(n.body)
        elif isinstance(n, RecBlock):
            walk(n.inner)

    walk(node)
    return out


def call_nodes(node) -> list:
    """Every ``Call`` node inside a command or pcommand, left to right."""
    out: list = []

    def walk(n):
        if isinstance(n, Call):
            out.append(n)
        elif isinstance(n, (POr, PAnd, SAnd)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Exists, Forall, Param)):
            walk(n.body)
        elif isinstance(n, RecBlock):
            walk(n.inner)

    walk(node)
    return out


def bound_vars(node) -> set[str]:
    out: set[str] = set()

    def walk(n):
        if isinstance(n, (Exists, Forall, ExistsP, ForallP)):
            out.add(n.var)
            walk(n.body)
        elif isinstance(n, (POr, PAnd, SAnd, And, Or, Implies, Iff)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Not):
            walk(n.body)
        elif isinstance(n, (Spec, Assert)):
            walk(n.pred)
        elif isinstance(n, Param):
            out.update(n.formals)
            walk(n.body)
        elif isinstance(n, RecBlock):
            walk(n.inner)

    walk(node)
    return out


def all_vars(node) -> set[str]:
    return free_vars(node) | bound_vars(node)


# ------------------------------------------------------------ substitution


class CaptureError(MatchFailure):
    pass


def subst_term(t, mapping: dict):
    if isinstance(t, VarRef):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return FunApp(t.functor, tuple(subst_term(a, mapping) for a in t.args), t.loc)


def _check_capture(var: str, mapping: dict):
    for value in mapping.values():
        if var in free_vars(value):
            raise CaptureError(f"substitution would capture variable {var}")


def subst(node, mapping: dict):
    """Capture-checked substitution of variables by terms.

    Raises CaptureError instead of renaming: every caller works on
    alpha-distinct trees, so capture signals a genuine mismatch.
    """
    if not mapping:
        return node
    if isinstance(node, (VarRef, FunApp)):
        return subst_term(node, mapping)
    if isinstance(node, (TruePred, FalsePred, MetaPred, MetaCmd)):
        return node
    if isinstance(node, Compare):
        return Compare(node.op, subst_term(node.lhs, mapping), subst_term(node.rhs, mapping), node.loc)
    if isinstance(node, Member):
        return Member(subst_term(node.term, mapping), subst_term(node.lo, mapping),
                      subst_term(node.hi, mapping), node.loc)
    if isinstance(node, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
        return type(node)(subst(node.left, mapping), subst(node.right, mapping), node.loc)
    if isinstance(node, Not):
        return Not(subst(node.body, mapping), node.loc)
    if isinstance(node, (ExistsP, ForallP)):
        lo = subst_term(node.lo, mapping) if node.lo is not None else None
        hi = subst_term(node.hi, mapping) if node.hi is not None else None
        inner = {k: v for k, v in mapping.items() if k != node.var}
        _check_capture(node.var, inner)
        return type(node)(node.var, subst(node.body, inner), lo, hi, node.loc)
    if isinstance(node, UserPred):
        return UserPred(node.name, tuple(subst_term(a, mapping) for a in node.args), node.loc)
    if isinstance(node, (Spec, Assert)):
        return type(node)(subst(node.pred, mapping), node.loc)
    if isinstance(node, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != node.var}
        _check_capture(node.var, inner)
        return type(node)(node.var, subst(node.body, inner), node.loc)
    if isinstance(node, Call):
        return Call(node.proc, tuple(subst_term(a, mapping) for a in node.args), node.loc)
    if isinstance(node, Param):
        inner = {k: v for k, v in mapping.items() if k not in node.formals}
        for f in node.formals:
            _check_capture(f, inner)
        return Param(node.formals, subst(node.body, inner), node.loc)
    if isinstance(node, RecBlock):
        return RecBlock(node.ident, subst(node.inner, mapping), node.loc)
    raise TypeError(f"subst: unsupported node {type(node).__name__}")


def rename_var(node, old: str, new: str):
    """Rename every occurrence (free or bound) of variable ``old``."""
    if isinstance(node, VarRef):
        return VarRef(new, node.loc) if node.name == old else node
    if isinstance(node, FunApp):
        return FunApp(node.functor, tuple(rename_var(a, old, new) for a in node.args), node.loc) if node.args else node
    if isinstance(node, (TruePred, FalsePred, MetaPred, MetaCmd)):
        return node
    if isinstance(node, Compare):
        return Compare(node.op, rename_var(node.lhs, old, new), rename_var(node.rhs, old, new), node.loc)
    if isinstance(node, Member):
        return Member(*(rename_var(x, old, new) for x in (node.term, node.lo, node.hi)), node.loc)
    if isinstance(node, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
        return type(node)(rename_var(node.left, old, new), rename_var(node.right, old, new), node.loc)
    if isinstance(node, Not):
        return Not(rename_var(node.body, old, new), node.loc)
    if isinstance(node, (ExistsP, ForallP)):
        return type(node)(new if node.var == old else node.var, rename_var(node.body, old, new),
                          rename_var(node.lo, old, new) if node.lo is not None else None,
                          rename_var(node.hi, old, new) if node.hi is not None else None, node.loc)
    if isinstance(node, UserPred):
        return UserPred(node.name, tuple(rename_var(a, old, new) for a in node.args), node.loc)
    if isinstance(node, (Spec, Assert)):
        return type(node)(rename_var(node.pred, old, new), node.loc)
    if isinstance(node, (Exists, Forall)):
        return type(node)(new if node.var == old else node.var, rename_var(node.body, old, new), node.loc)
    if isinstance(node, Call):
        return Call(node.proc, tuple(rename_var(a, old, new) for a in node.args), node.loc)
    if isinstance(node, Param):
        return Param(tuple(new if f == old else f for f in node.formals), rename_var(node.body, old, new), node.loc)
    if isinstance(node, RecBlock):
        return RecBlock(node.ident, rename_var(node.inner, old, new), node.loc)
    raise TypeError(type(node).__name__)


def rename_calls(node, old: str, new: str):
    """Rename procedure identifier ``old`` in calls (and recursion blocks)."""
    if isinstance(node, Call):
        return Call(new, node.args, node.loc) if node.proc == old else node
    if isinstance(node, (POr, PAnd, SAnd)):
        return type(node)(rename_calls(node.left, old, new), rename_calls(node.right, old, new), node.loc)
    if isinstance(node, (Exists, Forall)):
        return type(node)(node.var, rename_calls(node.body, old, new), node.loc)
    if isinstance(node, Param):
        return Param(node.formals, rename_calls(node.body, old, new), node.loc)
    if isinstance(node, RecBlock):
        return RecBlock(new if node.ident == old else node.ident, rename_calls(node.inner, old, new), node.loc)
    return node


# ------------------------------------------------------------ focus paths


def children(node) -> tuple:
    if isinstance(node, (POr, PAnd, SAnd)):
        return (node.left, node.right)
    if isinstance(node, (Exists, Forall)):
        return (node.body,)
    if isinstance(node, Param):
        return (node.body,)
    if isinstance(node, RecBlock):
        return (node.inner,)
    return ()


def with_child(node, index: int, child):
    if isinstance(node, (POr, PAnd, SAnd)):
        if index == 0:
            return type(node)(child, node.right, node.loc)
        if index == 1:
            return type(node)(node.left, child, node.loc)
    elif isinstance(node, (Exists, Forall)) and index == 0:
        return type(node)(node.var, child, node.loc)
    elif isinstance(node, Param) and index == 0:
        return Param(node.formals, child, node.loc)
    elif isinstance(node, RecBlock) and index == 0:
        return RecBlock(node.ident, child, node.loc)
    raise IndexError(f"no child {index} in {type(node).__name__}")


def subterm(node, path: Iterable[int]):
    for i in path:
        kids = children(node)
        if not 0 <= i < len(kids):
            raise IndexError(f"focus path step {i} is invalid at {type(node).__name__}")
        node = kids[i]
    return node


def replace_at(node, path, new):
    path = tuple(path)
    if not path:
        return new
    kids = children(node)
    if not 0 <= path[0] < len(kids):
        raise IndexError(f"focus path step {path[0]} is invalid at {type(node).__name__}")
    return with_child(node, path[0], replace_at(kids[path[0]], path[1:], new))


# ------------------------------------------------------- normalisation


def flatten(node, cls) -> list:
    if isinstance(node, cls):
        return flatten(node.left, cls) + flatten(node.right, cls)
    return [node]


def build_right(items: list, cls):
    items = list(items)
    out = items[-1]
    for item in reversed(items[:-1]):
        out = cls(item, out)
    return out


_ASSOC = (POr, PAnd, SAnd, And, Or)


def normalize(node):
    """Right-nest every associative chain (``,``, ``/\\``, ``\\/`` and predicate ``/\\``, ``\\/``)."""
    if isinstance(node, _ASSOC):
        cls = type(node)
        items = [normalize(x) for x in flatten(node, cls)]
        return build_right(items, cls)
    if isinstance(node, (Implies, Iff)):
        return type(node)(normalize(node.left), normalize(node.right), node.loc)
    if isinstance(node, Not):
        return Not(normalize(node.body), node.loc)
    if isinstance(node, (ExistsP, ForallP)):
        return replace(node, body=normalize(node.body))
    if isinstance(node, (Spec, Assert)):
        return type(node)(normalize(node.pred), node.loc)
    if isinstance(node, (Exists, Forall)):
        return type(node)(node.var, normalize(node.body), node.loc)
    if isinstance(node, Param):
        return Param(node.formals, normalize(node.body), node.loc)
    if isinstance(node, RecBlock):
        return RecBlock(node.ident, normalize(node.inner), node.loc)
    return node


def alpha_equal(a, b, env: dict | None = None) -> bool:
    """Structural equality modulo consistent renaming of bound variables."""
    env = env or {}
    if type(a) is not type(b):
        return False
    if isinstance(a, VarRef):
        return env.get(a.name, a.name) == b.name
    if isinstance(a, FunApp):
        return a.functor == b.functor and len(a.args) == len(b.args) and all(
            alpha_equal(x, y, env) for x, y in zip(a.args, b.args))
    if isinstance(a, (TruePred, FalsePred)):
        return True
    if isinstance(a, (MetaPred, MetaCmd)):
        return a.name == b.name
    if isinstance(a, Compare):
        return a.op == b.op and alpha_equal(a.lhs, b.lhs, env) and alpha_equal(a.rhs, b.rhs, env)
    if isinstance(a, Member):
        return all(alpha_equal(x, y, env) for x, y in ((a.term, b.term), (a.lo, b.lo), (a.hi, b.hi)))
    if isinstance(a, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
        return alpha_equal(a.left, b.left, env) and alpha_equal(a.right, b.right, env)
    if isinstance(a, Not):
        return alpha_equal(a.body, b.body, env)
    if isinstance(a, (ExistsP, ForallP)):
        if (a.lo is None) != (b.lo is None):
            return False
        if a.lo is not None and not (alpha_equal(a.lo, b.lo, env) and alpha_equal(a.hi, b.hi, env)):
            return False
        return alpha_equal(a.body, b.body, {**env, a.var: b.var})
    if isinstance(a, UserPred):
        return a.name == b.name and len(a.args) == len(b.args) and all(
            alpha_equal(x, y, env) for x, y in zip(a.args, b.args))
    if isinstance(a, (Spec, Assert)):
        return alpha_equal(a.pred, b.pred, env)
    if isinstance(a, (Exists, Forall)):
        return alpha_equal(a.body, b.body, {**env, a.var: b.var})
    if isinstance(a, Call):
        return a.proc == b.proc and len(a.args) == len(b.args) and all(
            alpha_equal(x, y, env) for x, y in zip(a.args, b.args))
    if isinstance(a, Param):
        if len(a.formals) != len(b.formals):
            return False
        return alpha_equal(a.body, b.body, {**env, **dict(zip(a.formals, b.formals))})
    if isinstance(a, RecBlock):
        return a.ident == b.ident and alpha_equal(a.inner, b.inner, env)
    return a == b


def structurally_equal(a, b) -> bool:
    """Equality modulo alpha-renaming and associativity of the chain operators."""
    return alpha_equal(normalize(a), normalize(b))


# ------------------------------------------------------ mutual recursion


def encode_mutual_recursion(defs, fresh: Callable[[str], str], name: str = "p",
                            selector: str = "I"):
    """Encode mutually recursive definitions as one recursive procedure.

    ``defs`` is a list of ``(identifier, Param)``.  The result is
    ``(name, RecBlock(name, Param((I, V1..Vn), <I=1>, C1 \\/ ... )))`` where every
    call ``p_k(t)`` becomes ``p(k, _, .., t, .., _)`` with fresh existential
    placeholders in the unused slots.  ``fresh(v)`` must return a new variable
    name of the same domain as ``v``.  Returns also the list of (placeholder,
    original formal) pairs so callers can declare the placeholders.
    """
    if not defs:
        raise ValueError("encode_mutual_recursion needs at least one definition")
    seen: set[str] = {selector}
    slots: list[tuple] = []
    for ident, pc in defs:
        if not isinstance(pc, Param):
            raise TypeError(f"definition {ident} must be a parametrised command")
        for f in pc.formals:
            if f in seen:
                raise DuplicateFormal(f"formal parameter {f} is used more than once")
            seen.add(f)
        slots.append(pc.formals)
    index = {ident: k for k, (ident, _) in enumerate(defs)}
    placeholders: list[tuple[str, str]] = []

    def rewrite(c):
        if isinstance(c, Call) and c.proc in index:
            k = index[c.proc]
            if len(c.args) != len(slots[k]):
                raise DuplicateFormal(f"call {c.proc} has wrong arity")
            args = [int_term(k + 1)]
            fresh_vars = []
            for j, formals in enumerate(slots):
                if j == k:
                    args.extend(c.args)
                else:
                    for f in formals:
                        v = fresh(f)
                        placeholders.append((v, f))
                        fresh_vars.append(v)
                        args.append(VarRef(v))
            out = Call(name, tuple(args), c.loc)
            for v in reversed(fresh_vars):
                out = Exists(v, out)
            return out
        if isinstance(c, (POr, PAnd, SAnd)):
            return type(c)(rewrite(c.left), rewrite(c.right), c.loc)
        if isinstance(c, (Exists, Forall)):
            return type(c)(c.var, rewrite(c.body), c.loc)
        return c

    branches = []
    for k, (ident, pc) in enumerate(defs):
        guard = Spec(Compare("=", VarRef(selector), int_term(k + 1)))
        branches.append(SAnd(guard, rewrite(pc.body)))
    body = build_right(branches, POr)
    formals = (selector,) + tuple(f for fs in slots for f in fs)
    return name, RecBlock(name, Param(formals, body)), placeholders


def map_commands(node, fn: Callable):
    """Bottom-up rebuild of a command tree applying ``fn`` to every node."""
    if isinstance(node, (POr, PAnd, SAnd)):
        node = type(node)(map_commands(node.left, fn), map_commands(node.right, fn), node.loc)
    elif isinstance(node, (Exists, Forall)):
        node = type(node)(node.var, map_commands(node.body, fn), node.loc)
    elif isinstance(node, Param):
        node = Param(node.formals, map_commands(node.body, fn), node.loc)
    elif isinstance(node, RecBlock):
        node = RecBlock(node.ident, map_commands(node.inner, fn), node.loc)
    return fn(node)
