"""Pretty-printer producing text that parses back to the same tree."""

from __future__ import annotations

from .ast import (
    And, Assert, Call, CapDecl, Compare, DomainSpec, Exists, ExistsP, FalsePred, Forall, ForallP,
    FunApp, FunDecl, Iff, Implies, Member, MetaCmd, MetaPred, Not, Or, PAnd, POr, Param,
    ProgramAst, RecBlock, SAnd, Spec, TruePred, UniverseDecl, UserPred, ValuesAtoms, ValuesInt,
    ValuesLists, ValuesTerms, VarDecl, VarRef,
)

# ---------------------------------------------------------------- terms

_TERM_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "mod": 2}


def _list_items(t):
    items = []
    while isinstance(t, FunApp) and t.functor == "cons" and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    return items, t


def term_str(t, prec: int = 0) -> str:
    if isinstance(t, VarRef):
        return t.name
    f = t.functor
    if f == "nil" and not t.args:
        return "[]"
    if f == "cons" and len(t.args) == 2:
        items, tail = _list_items(t)
        body = ", ".join(term_str(i) for i in items)
        if isinstance(tail, FunApp) and tail.functor == "nil" and not tail.args:
            return f"[{body}]"
        return f"[{body}|{term_str(tail)}]"
    if f in _TERM_PREC and len(t.args) == 2:
        p = _TERM_PREC[f]
        left = term_str(t.args[0], p)
        right = term_str(t.args[1], p + 1)
        s = f"{left} {f} {right}"
        return f"({s})" if p < prec else s
    if not t.args:
        if f.startswith("-") and prec > 0:
            return f"({f})"
        return f
    return f"{f}({', '.join(term_str(a) for a in t.args)})"


# ----------------------------------------------------------- predicates

# precedence levels: iff 1, implies 2, or 3, and 4, not/atom 5
_PRED_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_PRED_OP = {Iff: "<=>", Implies: "=>", Or: "\\/", And: "/\\"}


def pred_str(p, level: int = 0, open_tail: bool = True) -> str:
    cls = type(p)
    if cls is TruePred:
        return "true"
    if cls is FalsePred:
        return "false"
    if cls is MetaPred:
        return p.name
    if cls is Compare:
        return f"{term_str(p.lhs)} {p.op} {term_str(p.rhs)}"
    if cls is Member:
        return f"{term_str(p.term)} in {term_str(p.lo)}..{term_str(p.hi)}"
    if cls is UserPred:
        return f"{p.name}({', '.join(term_str(a) for a in p.args)})"
    if cls is Not:
        return f"~{pred_str(p.body, 5, open_tail)}"
    if cls in _PRED_LEVEL:
        lv = _PRED_LEVEL[cls]
        # all binary connectives are right associative
        s = f"{pred_str(p.left, lv + 1, False)} {_PRED_OP[cls]} {pred_str(p.right, lv, open_tail if lv >= level else True)}"
        return f"({s})" if lv < level else s
    if cls in (ExistsP, ForallP):
        kw = "exists" if cls is ExistsP else "forall"
        names = [p.var]
        body = p.body
        if p.lo is None:
            while type(body) is cls and body.lo is None:
                names.append(body.var)
                body = body.body
            head = f"{kw} {', '.join(names)}"
        else:
            head = f"{kw} {p.var} in {term_str(p.lo)}..{term_str(p.hi)}"
        s = f"{head} . {pred_str(body, 0, True)}"
        return s if open_tail else f"({s})"
    raise TypeError(f"pred_str: {cls.__name__}")


# ------------------------------------------------------------- commands

# precedence: por 1, sand 2, pand 3, primary 4
_CMD_LEVEL = {POr: 1, SAnd: 2, PAnd: 3}
_CMD_OP = {POr: " \\/ ", SAnd: ", ", PAnd: " /\\ "}


def command_str(c, level: int = 0, open_tail: bool = True) -> str:
    cls = type(c)
    if cls is Spec:
        if isinstance(c.pred, TruePred):
            return "skip"
        if isinstance(c.pred, FalsePred):
            return "fail"
        return f"<{pred_str(c.pred)}>"
    if cls is Assert:
        if isinstance(c.pred, FalsePred):
            return "abort"
        return "{" + pred_str(c.pred) + "}"
    if cls is MetaCmd:
        return c.name
    if cls is Call:
        return f"{c.proc}({', '.join(term_str(a) for a in c.args)})"
    if cls in _CMD_LEVEL:
        lv = _CMD_LEVEL[cls]
        inner_open = open_tail if lv >= level else True
        # sequences under a disjunction get parentheses purely for readability
        lv_left = 3 if cls is POr and type(c.left) is SAnd else lv + 1
        lv_right = 3 if cls is POr and type(c.right) is SAnd else lv
        s = f"{command_str(c.left, lv_left, False)}{_CMD_OP[cls]}{command_str(c.right, lv_right, inner_open)}"
        return f"({s})" if lv < level else s
    if cls in (Exists, Forall):
        kw = "exists" if cls is Exists else "forall"
        names = [c.var]
        body = c.body
        while type(body) is cls:
            names.append(body.var)
            body = body.body
        s = f"{kw} {', '.join(names)} . {command_str(body, 0, True)}"
        return s if open_tail else f"({s})"
    raise TypeError(f"command_str: {cls.__name__}")


def pcommand_str(pc) -> str:
    if isinstance(pc, RecBlock):
        return f"re {pc.ident} . {pcommand_str(pc.inner)} er"
    return f"({', '.join(pc.formals)} . {command_str(pc.body)})"


# ------------------------------------------------------------- programs


def _domain_str(d: DomainSpec) -> str:
    if d.kind == "range":
        return f"{d.args[0]}..{d.args[1]}"
    if d.kind == "set":
        return "{" + ", ".join(term_str(t) for t in d.args) + "}"
    if d.kind == "lists" and d.args:
        return f"lists maxlen {d.args[0]}"
    return d.kind


def universe_item_str(item) -> str:
    if isinstance(item, ValuesInt):
        return f"values int {item.lo}..{item.hi};"
    if isinstance(item, ValuesLists):
        return f"values lists maxlen {item.maxlen} over {item.lo}..{item.hi};"
    if isinstance(item, ValuesAtoms):
        return f"values atoms {', '.join(item.names)};"
    if isinstance(item, ValuesTerms):
        parts = [f"{n}/{a}" for n, a in item.functors]
        if item.int_range is not None:
            parts.append(f"{item.int_range[0]}..{item.int_range[1]}")
        return f"values terms depth {item.depth} over {{{', '.join(parts)}}};"
    if isinstance(item, VarDecl):
        if item.domain.kind == "all":
            return f"var {', '.join(item.names)};"
        return f"var {', '.join(item.names)} in {_domain_str(item.domain)};"
    if isinstance(item, FunDecl):
        if item.builtin:
            return f"fun {item.name}/{item.arity} builtin {item.builtin};"
        rows = " ".join(f"({', '.join(term_str(a) for a in args)}) -> {term_str(r)};" for args, r in item.rows)
        return f"fun {item.name}/{item.arity} {{ {rows} }}"
    if isinstance(item, CapDecl):
        return f"cap {item.cap};"
    raise TypeError(type(item).__name__)


def program_str(p: ProgramAst) -> str:
    lines = ["universe {"]
    lines += [f"  {universe_item_str(i)}" for i in p.universe.items]
    lines.append("}")
    for pd in p.preds:
        lines.append(f"pred {pd.name}({', '.join(pd.params)}) := {pred_str(pd.body)};")
    for m in p.modes:
        lines.append(f"mode {m.name}({', '.join(m.modes)});")
    for name, pc in p.procs:
        lines.append(f"proc {name} = {pcommand_str(pc)};")
    for name, g in p.goals:
        lines.append(f"goal {name} = {command_str(g)};")
    return "\n".join(lines) + "\n"


def pretty_print(node) -> str:
    if isinstance(node, ProgramAst):
        return program_str(node)
    if isinstance(node, (Param, RecBlock)):
        return pcommand_str(node)
    if isinstance(node, (Spec, Assert, POr, PAnd, SAnd, Exists, Forall, Call, MetaCmd)):
        return command_str(node)
    if isinstance(node, (VarRef, FunApp)):
        return term_str(node)
    if isinstance(node, UniverseDecl):
        return "\n".join(universe_item_str(i) for i in node.items)
    return pred_str(node)
