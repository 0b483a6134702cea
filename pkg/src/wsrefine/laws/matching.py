"""Pattern matching of law sides against commands, and law application at a focus."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import AmbiguousMatch, MatchFailure, SideConditionFailure
from ..syntax.ast import (
    And, Assert, Exists, ExistsP, FalsePred, Forall, ForallP, Iff, Implies, MetaCmd, MetaPred,
    Not, Or, PAnd, POr, Param, RecBlock, SAnd, Spec, TruePred,
)
from ..syntax.pretty import pretty_print
from ..syntax.transforms import (
    alpha_equal, children, free_vars, normalize, replace_at, subterm,
)
from .catalogue import CONTEXT_META, EQUIVALENT, Law
from .obligations import Entails, Equiv, SemanticRefines, conj

_BINARY = (POr, PAnd, SAnd, And, Or, Implies, Iff)


def match(pattern, node, law_metas: dict, binding: Optional[dict] = None) -> Optional[dict]:
    """Extend ``binding`` so that ``pattern`` instantiates to ``node``.

    ``law_metas`` holds the variable metavariable names (under key ``var``).
    Returns the extended binding or None.
    """
    b = dict(binding or {})
    return b if _match(pattern, node, set(law_metas.get("var", ())), b) else None


def _bind(b: dict, name: str, value) -> bool:
    if name in b:
        old = b[name]
        if isinstance(old, str) or isinstance(value, str):
            return old == value
        return alpha_equal(old, value)
    b[name] = value
    return True


def _match(p, n, var_metas: set, b: dict) -> bool:
    if isinstance(p, (MetaCmd, MetaPred)):
        return _bind(b, p.name, n)
    if type(p) is not type(n):
        return False
    if isinstance(p, _BINARY):
        return _match(p.left, n.left, var_metas, b) and _match(p.right, n.right, var_metas, b)
    if isinstance(p, Not):
        return _match(p.body, n.body, var_metas, b)
    if isinstance(p, (Spec, Assert)):
        return _match(p.pred, n.pred, var_metas, b)
    if isinstance(p, (Exists, Forall)):
        return _bind_var(p.var, n.var, var_metas, b) and _match(p.body, n.body, var_metas, b)
    if isinstance(p, (ExistsP, ForallP)):
        if p.lo is not None or n.lo is not None:
            return False
        return _bind_var(p.var, n.var, var_metas, b) and _match(p.body, n.body, var_metas, b)
    if isinstance(p, (TruePred, FalsePred)):
        return True
    return alpha_equal(p, n)


def _bind_var(meta: str, actual: str, var_metas: set, b: dict) -> bool:
    if meta in var_metas:
        return _bind(b, meta, actual)
    return meta == actual


def instantiate(pattern, b: dict):
    """Replace every metavariable of ``pattern`` by its binding."""
    p = pattern
    if isinstance(p, (MetaCmd, MetaPred)):
        if p.name not in b:
            raise MatchFailure(f"metavariable {p.name} is not bound; supply it with 'with {p.name} := ...'")
        return b[p.name]
    if isinstance(p, _BINARY):
        return type(p)(instantiate(p.left, b), instantiate(p.right, b))
    if isinstance(p, Not):
        return Not(instantiate(p.body, b))
    if isinstance(p, (Spec, Assert)):
        return type(p)(instantiate(p.pred, b))
    if isinstance(p, (Exists, Forall)):
        return type(p)(b.get(p.var, p.var), instantiate(p.body, b))
    if isinstance(p, (ExistsP, ForallP)):
        return type(p)(b.get(p.var, p.var), instantiate(p.body, b))
    return p


def _metas_in(node, out: set):
    if node is None:
        return out
    if isinstance(node, (MetaCmd, MetaPred)):
        out.add(node.name)
    elif isinstance(node, _BINARY):
        _metas_in(node.left, out)
        _metas_in(node.right, out)
    elif isinstance(node, Not):
        _metas_in(node.body, out)
    elif isinstance(node, (Spec, Assert)):
        _metas_in(node.pred, out)
    elif isinstance(node, (Exists, Forall, ExistsP, ForallP)):
        out.add(node.var)
        _metas_in(node.body, out)
    return out


# ---------------------------------------------------------------- context


def contribution(c) -> list:
    """Predicates known to hold wherever the command ``c`` succeeds, syntactically."""
    if isinstance(c, Spec):
        return [c.pred]
    if isinstance(c, Assert):
        return [c.pred]
    if isinstance(c, SAnd):
        return contribution(c.left) + contribution(c.right)
    return []


def context_at(target, path) -> list:
    """Ordered context conjuncts in force at ``path`` inside ``target``.

    Walking right into a sequential conjunction adds what its left operand
    establishes; crossing a quantifier drops conjuncts that mention the bound
    variable; entering a procedure body restarts from the empty context.
    """
    ctx: list = []
    node = target
    for i in path:
        if isinstance(node, SAnd) and i == 1:
            ctx = ctx + contribution(node.left)
        elif isinstance(node, (Exists, Forall)):
            ctx = [p for p in ctx if node.var not in free_vars(p)]
        elif isinstance(node, (Param, RecBlock)):
            ctx = []
        kids = children(node)
        if not 0 <= i < len(kids):
            raise MatchFailure(f"focus path step {i} is invalid at {type(node).__name__}")
        node = kids[i]
    return _dedupe(ctx)


def _dedupe(preds: list) -> list:
    out = []
    for p in preds:
        if not any(alpha_equal(p, q) for q in out):
            out.append(p)
    return out


def drop_mentioning(ctx: list, var: str) -> list:
    return [p for p in ctx if var not in free_vars(p)]


# -------------------------------------------------------------- application


@dataclass
class Application:
    """Outcome of applying one law at one focus."""

    law: Law
    direction: str
    binding: dict
    before: object
    after: object
    program: object
    obligations: list = field(default_factory=list)
    count: int = 1

    def describe(self) -> str:
        parts = [f"{k} := {v if isinstance(v, str) else pretty_print(v)}" for k, v in sorted(self.binding.items())]
        return f"{self.law.name} {self.direction} [{', '.join(parts)}]"


def _as_param_binding(law: Law, params: dict) -> dict:
    metas = law.metas()
    b = {}
    for k, v in (params or {}).items():
        if k in metas["var"]:
            b[k] = v.name if hasattr(v, "name") and not isinstance(v, str) else str(v)
        else:
            b[k] = v
    return b


def _try_direction(law: Law, direction: str, node, params: dict):
    src, dst = (law.lhs, law.rhs) if direction == "forward" else (law.rhs, law.lhs)
    metas = law.metas()
    b = match(src, node, metas, _as_param_binding(law, params))
    if b is None:
        return None, f"{law.name} ({direction}) does not match {pretty_print(node)}"
    needed = _metas_in(dst, set())
    for pr in law.premises:
        _metas_in(pr.left, needed)
        _metas_in(pr.right, needed)
        _metas_in(pr.ctx, needed)
    needed.discard(CONTEXT_META)
    missing = sorted(m for m in needed if m not in b and m not in metas["var"])
    if missing:
        return None, f"{law.name} ({direction}) leaves {', '.join(missing)} unbound; supply params"
    for kind, var_meta, cmd_meta in law.side:
        if kind == "notfree":
            var = b.get(var_meta, var_meta)
            if var in free_vars(b[cmd_meta]):
                raise SideConditionFailure(
                    f"{law.name}: variable {var} occurs free in {pretty_print(b[cmd_meta])}")
    return (b, instantiate(dst, b)), None


def _obligations(law: Law, b: dict, ctx: list, before, after) -> list:
    out = []
    for pr in law.premises:
        local = list(ctx)
        if pr.binder is not None:
            local = drop_mentioning(local, b.get(pr.binder, pr.binder))
        if pr.ctx is not None:
            local.append(instantiate(pr.ctx, b))
        context = conj(local)
        left, right = instantiate(pr.left, b), instantiate(pr.right, b)
        if pr.kind == "entails":
            out.append(Entails(context, left, right))
        elif pr.kind == "pequiv":
            out.append(Equiv(context, left, right))
        elif pr.kind == "refines":
            out.append(SemanticRefines(left, right, context))
        elif pr.kind == "equivalent":
            out.append(SemanticRefines(left, right, context))
            out.append(SemanticRefines(right, left, context))
        else:  # pragma: no cover - catalogue invariant
            raise ValueError(pr.kind)
    return out


def rewrite_once(law: Law, node, params: dict, direction: Optional[str]):
    """Rewrite ``node`` itself; returns (direction, binding, new node)."""
    if law.builtin:
        raise MatchFailure(f"{law.name} is a built-in law and is applied by the derivation engine")
    if direction is None:
        dirs = ["forward", "reverse"] if law.relation == EQUIVALENT else ["forward"]
    elif direction == "reverse" and law.relation != EQUIVALENT:
        raise MatchFailure(f"{law.name} is a refinement and only applies left to right")
    else:
        dirs = [direction]
    found = []
    reasons = []
    side_error = None
    for d in dirs:
        try:
            res, why = _try_direction(law, d, node, params)
        except SideConditionFailure as exc:
            side_error = exc
            continue
        if res is None:
            reasons.append(why)
        else:
            found.append((d, *res))
    if not found:
        if side_error is not None:
            raise side_error
        raise MatchFailure("; ".join(reasons))
    if len(found) == 2 and not alpha_equal(normalize(found[0][2]), normalize(found[1][2])):
        raise AmbiguousMatch(f"{law.name} matches in both directions; say 'forward' or 'reverse'")
    return found[0]


def apply_law(law: Law, target, focus=(), params: Optional[dict] = None, ctx: Optional[list] = None,
              direction: Optional[str] = None, repeat: bool = False, max_repeat: int = 100) -> Application:
    """Rewrite the subterm of ``target`` at ``focus`` by ``law``.

    ``ctx`` is the list of context conjuncts above ``target``; the conjuncts
    collected along ``focus`` are added to it.  With ``repeat`` the same
    direction is re-applied top-down below the focus until nothing matches.
    Obligations come back undischarged.
    """
    focus = tuple(focus)
    params = dict(params or {})
    try:
        node = subterm(target, focus)
    except IndexError as exc:
        raise MatchFailure(str(exc)) from None
    local = _dedupe(list(ctx or []) + context_at(target, focus))
    d, b, new = rewrite_once(law, node, params, direction)
    obligations = _obligations(law, b, local, node, new)
    count = 1
    if repeat:
        new, more, count = _repeat(law, new, params, d, local, max_repeat)
        obligations += more
    new = normalize(new)
    program = normalize(replace_at(target, focus, new))
    return Application(law, d, b, node, new, program, obligations, count)


def _repeat(law, node, params, direction, ctx, limit):
    """Pre-order re-application below ``node``; returns (node, obligations, count)."""
    obligations: list = []
    count = 1
    progress = True
    while progress and count < limit:
        progress = False
        for path in _paths(node):
            sub = subterm(node, path)
            try:
                d, b, new = rewrite_once(law, sub, params, direction)
            except (MatchFailure, SideConditionFailure, AmbiguousMatch):
                continue
            local = _dedupe(ctx + context_at(node, path))
            obligations += _obligations(law, b, local, sub, new)
            node = replace_at(node, path, new)
            count += 1
            progress = True
            break
    return node, obligations, count


def _paths(node, prefix=()):
    yield prefix
    for i, k in enumerate(children(node)):
        yield from _paths(k, prefix + (i,))


