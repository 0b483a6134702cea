"""The refinement-law catalogue, kept as data.

Each law is a pair of command patterns plus premise templates.  Lower-case
identifiers (``c``, ``c1`` .. ``c4``) are command metavariables, the upper
case names ``P Q A B I`` are predicate metavariables and quantifier binders
are variable metavariables.  The derivation engine and the meta-verifier
both read this table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

from ..errors import UnknownLaw
from ..syntax.ast import (
    And, Assert, Exists, ExistsP, Forall, ForallP, Iff, Implies, MetaCmd, MetaPred, Not, Or,
    PAnd, POr, SAnd, Spec,
)
from ..syntax.parser import parse_command, parse_pred

CMD_METAS = ("c", "c1", "c2", "c3", "c4")
PRED_METAS = ("P", "Q", "A", "B", "I")
CONTEXT_META = "G"

REFINES = "refines"
EQUIVALENT = "equivalent"


@dataclass(frozen=True)
class Premise:
    """A proof-obligation template.

    ``kind`` is ``entails`` (left ⊨ right), ``pequiv`` (left and right agree as
    three-valued predicates), ``refines`` or ``equivalent`` (between command
    patterns).  ``ctx`` is an extra hypothesis conjoined with the ambient
    context; ``binder`` names a variable metavariable whose scope the premise
    sits under, so context conjuncts mentioning it are dropped.
    """

    kind: str
    left: object
    right: object
    ctx: Optional[object] = None
    binder: Optional[str] = None


@dataclass(frozen=True)
class Law:
    name: str
    group: str
    lhs: object
    rhs: object
    relation: str
    premises: tuple = ()
    side: tuple = ()  # of ("notfree", var_meta, cmd_meta)
    contextual: bool = False
    builtin: bool = False
    description: str = field(default="", compare=False)

    @property
    def is_equivalence(self) -> bool:
        return self.relation == EQUIVALENT

    def converse(self) -> "Law":
        """The law read right to left; for a refinement this is usually false."""
        return replace(self, name=self.name + "-converse", lhs=self.rhs, rhs=self.lhs)

    def metas(self) -> dict:
        """Metavariables by kind: ``cmd``, ``pred`` and ``var``."""
        out = {"cmd": [], "pred": [], "var": []}
        nodes = [self.lhs, self.rhs]
        for p in self.premises:
            nodes += [p.left, p.right, p.ctx]
        for n in nodes:
            if n is not None:
                _collect_metas(n, out)
        return out

    def __str__(self) -> str:
        from ..syntax.pretty import pretty_print
        if self.builtin:
            return f"{self.name} (built-in)"
        rel = "≈" if self.is_equivalence else "⊑"
        if self.contextual:
            rel += "̇"
        return f"{pretty_print(self.lhs)} {rel} {pretty_print(self.rhs)}"


def _add(lst: list, name: str):
    if name not in lst:
        lst.append(name)


def _collect_metas(n, out: dict):
    if isinstance(n, MetaCmd):
        _add(out["cmd"], n.name)
    elif isinstance(n, MetaPred):
        _add(out["pred"], n.name)
    elif isinstance(n, (Exists, Forall)):
        _add(out["var"], n.var)
        _collect_metas(n.body, out)
    elif isinstance(n, (ExistsP, ForallP)):
        _add(out["var"], n.var)
        _collect_metas(n.body, out)
    elif isinstance(n, (Spec, Assert)):
        _collect_metas(n.pred, out)
    elif isinstance(n, (POr, PAnd, SAnd, And, Or, Implies, Iff)):
        _collect_metas(n.left, out)
        _collect_metas(n.right, out)
    elif isinstance(n, Not):
        _collect_metas(n.body, out)


# ------------------------------------------------------------- the table

def _c(text: str):
    return parse_command(text, cmd_metas=CMD_METAS, pred_metas=PRED_METAS + (CONTEXT_META,))


def _p(text: str):
    return parse_pred(text, pred_metas=PRED_METAS + (CONTEXT_META,))


# name, group, lhs, relation, rhs
_PLAIN = [
    ("pandcommute", "algebraic", "c1 /\\ c2", EQUIVALENT, "c2 /\\ c1"),
    ("pandassoc", "algebraic", "(c1 /\\ c2) /\\ c3", EQUIVALENT, "c1 /\\ (c2 /\\ c3)"),
    ("pandidempotent", "algebraic", "c /\\ c", EQUIVALENT, "c"),
    ("porcommute", "algebraic", "c1 \\/ c2", EQUIVALENT, "c2 \\/ c1"),
    ("porassoc", "algebraic", "(c1 \\/ c2) \\/ c3", EQUIVALENT, "c1 \\/ (c2 \\/ c3)"),
    ("poridempotent", "algebraic", "c \\/ c", EQUIVALENT, "c"),
    ("sandassoc", "algebraic", "(c1, c2), c3", EQUIVALENT, "c1, (c2, c3)"),
    ("sandidempotent", "algebraic", "c1, c1", EQUIVALENT, "c1"),
    ("panddistrib", "algebraic", "c1 /\\ (c2 \\/ c3)", EQUIVALENT, "(c1 /\\ c2) \\/ (c1 /\\ c3)"),
    ("pordistrib", "algebraic", "c1 \\/ (c2 /\\ c3)", EQUIVALENT, "(c1 \\/ c2) /\\ (c1 \\/ c3)"),
    ("leftsandoverpor", "algebraic", "c1, (c2 \\/ c3)", EQUIVALENT, "(c1, c2) \\/ (c1, c3)"),
    ("leftsandoverpand", "algebraic", "c1, (c2 /\\ c3)", EQUIVALENT, "(c1, c2) /\\ (c1, c3)"),
    ("pandoversand", "algebraic", "c1 /\\ (c2, c3)", REFINES, "(c1 /\\ c2), c3"),
    ("rightsandoverpor", "algebraic", "(c1 \\/ c2), c3", EQUIVALENT, "(c1, c3) \\/ (c2, c3)"),
    ("foralldistrib", "algebraic", "forall X . (c1 /\\ c2)", EQUIVALENT, "(forall X . c1) /\\ (forall X . c2)"),
    ("existsdistrib", "algebraic", "exists X . (c1 \\/ c2)", EQUIVALENT, "(exists X . c1) \\/ (exists X . c2)"),
    ("pandtosand", "algebraic", "c1 /\\ c2", REFINES, "c1, c2"),
    ("refstoreflex", "relation", "c", REFINES, "c"),
    ("refeqreflex", "relation", "c", EQUIVALENT, "c"),
    ("liftpand", "lifting", "<P> /\\ <Q>", EQUIVALENT, "<P /\\ Q>"),
    ("liftpor", "lifting", "<P> \\/ <Q>", EQUIVALENT, "<P \\/ Q>"),
    ("liftexists", "lifting", "exists X . <P>", EQUIVALENT, "<exists X . P>"),
    ("liftforall", "lifting", "forall X . <P>", EQUIVALENT, "<forall X . P>"),
    ("removeassumpt", "specification", "{A}, c", REFINES, "c"),
    ("combineassumpt", "specification", "{A}, {B}", EQUIVALENT, "{A /\\ B}"),
    ("establishassumpt", "specification", "<P>", EQUIVALENT, "<P>, {P}"),
]


def _build() -> list:
    laws = []
    for name, group, lhs, rel, rhs in _PLAIN:
        laws.append(Law(name, group, _c(lhs), _c(rhs), rel))

    def law(name, group, lhs, rel, rhs, premises=(), side=(), contextual=False):
        laws.append(Law(name, group, _c(lhs), _c(rhs), rel, tuple(premises), tuple(side), contextual))

    def pr(kind, left, right, ctx=None, binder=None, cmd=False):
        conv = _c if cmd else _p
        return Premise(kind, conv(left), conv(right), _p(ctx) if ctx else None, binder)

    law("extendscopeexistsoverpand", "algebraic", "(exists X . c1) /\\ c2", EQUIVALENT,
        "exists X . (c1 /\\ c2)", side=[("notfree", "X", "c2")])

    law("refstotrans", "relation", "c1", REFINES, "c3",
        [pr("refines", "c1", "c2", cmd=True), pr("refines", "c2", "c3", cmd=True)])
    law("refeqtrans", "relation", "c1", EQUIVALENT, "c3",
        [pr("equivalent", "c1", "c2", cmd=True), pr("equivalent", "c2", "c3", cmd=True)])
    law("refeqsymm", "relation", "c2", EQUIVALENT, "c1", [pr("equivalent", "c1", "c2", cmd=True)])
    law("refstoantisymm", "relation", "c1", EQUIVALENT, "c2",
        [pr("refines", "c1", "c2", cmd=True), pr("refines", "c2", "c1", cmd=True)])
    law("refeqstrongerrefsto", "relation", "c1", REFINES, "c2", [pr("equivalent", "c1", "c2", cmd=True)])

    for name, op in (("pandmono", "/\\"), ("pormono", "\\/"), ("sandmono", ",")):
        law(name, "monotonicity", f"c1 {op} c3", REFINES, f"c2 {op} c4",
            [pr("refines", "c1", "c2", cmd=True), pr("refines", "c3", "c4", cmd=True)])
    law("existsmono", "monotonicity", "exists X . c1", REFINES, "exists X . c2",
        [pr("refines", "c1", "c2", binder="X", cmd=True)])
    law("forallmono", "monotonicity", "forall X . c1", REFINES, "forall X . c2",
        [pr("refines", "c1", "c2", binder="X", cmd=True)])

    law("weakenassumpt", "specification", "{A}", REFINES, "{B}", [pr("entails", "A", "B")])
    law("equivspec", "specification", "<P>", EQUIVALENT, "<Q>", [pr("pequiv", "P", "Q")])
    law("assumptafterspec", "specification", "<P>", EQUIVALENT, "<P>, {A}", [pr("entails", "P", "A")])

    law("introduceassumpt", "context", "c", EQUIVALENT, "{A}, c", [pr("entails", "true", "A")], contextual=True)
    law("introducespec", "context", "c", EQUIVALENT, "<B> /\\ c", [pr("entails", "true", "B")], contextual=True)
    law("assumptincontext", "context", "{A}, c1", REFINES, "{A}, c2",
        [pr("refines", "c1", "c2", ctx="A", cmd=True)], contextual=True)
    law("specincontext", "context", "<A>, c1", REFINES, "<A>, c2",
        [pr("refines", "c1", "c2", ctx="A", cmd=True)], contextual=True)
    law("equivunderassumpt", "context", "{A}, <P>", EQUIVALENT, "{A}, <Q>", [pr("entails", "A", "P <=> Q")])
    law("useparallelspec", "context", "<I> /\\ <P>", EQUIVALENT, "<I> /\\ <Q>", [pr("entails", "I", "P <=> Q")])
    law("caseanalysis", "context", "c", REFINES, "(<P>, c) \\/ (<Q>, c)",
        [pr("entails", "true", "P \\/ Q")], contextual=True)

    for name in BUILTIN_LAWS:
        laws.append(Law(name, "builtin", None, None, REFINES, builtin=True))
    return laws


BUILTIN_LAWS = ("recursionintro", "propertyoverlist", "propertyoverlistindexed")

BUILTIN_PARAM_KINDS = {
    "recursionintro": {},
    "propertyoverlist": {"proc": "ident", "rec": "ident", "head": "var", "tail": "var", "index": "var"},
    "propertyoverlistindexed": {"proc": "ident", "rec": "ident", "head": "var", "tail": "var",
                                "index": "var", "counter": "var"},
}


@lru_cache(maxsize=1)
def _table() -> dict:
    return {law.name: law for law in _build()}


def catalogue() -> list:
    return list(_table().values())


def lookup(name: str) -> Law:
    try:
        return _table()[name]
    except KeyError:
        raise UnknownLaw(name) from None


def param_kinds(name: str) -> Optional[dict]:
    """Parameter names a derivation step may bind for ``name``, with their syntactic kind."""
    if name in BUILTIN_PARAM_KINDS:
        return dict(BUILTIN_PARAM_KINDS[name])
    law = _table().get(name)
    if law is None:
        return None
    m = law.metas()
    kinds = {n: "cmd" for n in m["cmd"]}
    kinds.update({n: "pred" for n in m["pred"] if n != CONTEXT_META})
    kinds.update({n: "var" for n in m["var"]})
    return kinds
