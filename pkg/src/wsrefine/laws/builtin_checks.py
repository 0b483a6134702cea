"""Meta-verification of the three built-in laws.

These laws introduce procedures or manipulate hypotheses, so they are not
pattern pairs.  Each check builds a family of concrete instances over a
small universe and tests the semantic claim with the real interpreter.
"""

from __future__ import annotations

import itertools
import time

import numpy as np

from ..execution import refines
from ..semantics import ParamExecution, cexec, fix, pexec
from ..syntax.ast import Call, ForallP, FunApp, PAnd, Param, RecBlock, Spec, VarRef, int_term
from ..syntax.parser import parse_command, parse_pred
from ..syntax.transforms import subst
from ..universe import Universe
from ..values import as_pylist, from_pylist
from .verify import LawResult, VerifyConfig


def check_builtin(law, cfg: VerifyConfig) -> LawResult:
    start = time.perf_counter()
    fn = {"recursionintro": _recursion_intro,
          "propertyoverlist": lambda: _property_over_list(False),
          "propertyoverlistindexed": lambda: _property_over_list(True)}[law.name]
    res = fn()
    res.seconds = time.perf_counter() - start
    return res


# ------------------------------------------------------- recursion intro


_PC_BODIES = ["<X >= 0>", "<X = 0>", "<X < 2>", "<X > 0>", "{X < 3}, <X = 1>", "<false>", "{X > 0}, <X > 1>"]
_BRANCHES = ["<X = 0>", "<X = 1>", "<X < 2>", "<true>", "<false>", "{X = 0}"]
_TEMPLATES = [
    "id(X)",
    "{B1} \\/ (exists Y . <Y < X>, id(Y))",
    "(<X = 0>, {B1}) \\/ (<X > 0>, exists Y . <Y = X - 1>, id(Y), {B2})",
    "(<X = 0>, {B1}) \\/ (<X > 0>, exists Y . <Y = X - 1>, id(Y))",
    "{B1} /\\ (<X > 0>, exists Y . <Y = X - 1>, id(Y) \\/ <X = 0>)",
]


def _recursion_intro() -> LawResult:
    """pc ⊑ re id . (X . C(id)) er whenever, for every V, the weakest id meeting
    the induction hypothesis below V already gives pc(V) ⊑ C(id)(V)."""
    u = Universe(list(range(-1, 4)), {"X": range(0, 4), "Y": range(0, 4)})
    res = LawResult("recursionintro", "pass", mode="exhaustive")
    dom = u.domain("X")
    for body_txt in _PC_BODIES:
        pc = Param(("X",), parse_command(body_txt))
        spec = pexec(u, pc)
        for tmpl in _TEMPLATES:
            for b1, b2 in itertools.product(_BRANCHES, repeat=2):
                text = tmpl.replace("{B1}", b1).replace("{B2}", b2)
                if "{B2}" not in tmpl and b2 != _BRANCHES[0]:
                    continue
                if "{B1}" not in tmpl and b1 != _BRANCHES[0]:
                    continue
                body = parse_command(text)
                res.enumerated += 1
                if not _premise(u, spec, body, dom):
                    continue
                res.instances += 1
                rec = RecBlock("id", Param(("X",), body))
                if not spec.refines(fix(u, rec)):
                    res.status = "fail"
                    res.detail = f"pc = (X . {body_txt}), C = {text}"
                    return res
    return res


def _premise(u, spec: ParamExecution, body, dom) -> bool:
    for v in range(len(dom)):
        below = np.array([a < dom[v] for a in dom])
        weakest = ParamExecution(u, ("X",), np.where(below, spec.table, 0).astype(np.int8))
        got = cexec(u, body, {"id": weakest}).over(("X",))
        got = np.broadcast_to(got, (len(dom),))
        want = spec.table[v]
        if want != 0 and want != got[v]:
            return False
    return True


# ------------------------------------------------------ property over list


_PROPS = ["V \\= H", "V < H", "V = H", "H > 0", "V + H > 1", "true", "false", "V = 1 / H"]
_IPROPS = ["J \\= V - H", "J > H", "J \\= abs(V - H)", "H < J", "true", "J = 1 / H"]


def _list_universe() -> Universe:
    ints = list(range(-2, 5))  # J + 1 leaves the value set at the top of J's domain
    lists = [from_pylist(list(t)) for n in range(3) for t in itertools.product(range(0, 2), repeat=n)]
    # tails are one shorter than lists so that [H|T] never leaves the value set
    tails = [v for v in lists if len(as_pylist(v)) < 2]
    return Universe(ints + lists, {
        "V": range(0, 2), "H": range(0, 2), "I": range(1, 4), "J": range(1, 5),
        "L": lists, "T": tails,
    })


def _property_over_list(indexed: bool) -> LawResult:
    u = _list_universe()
    name = "propertyoverlistindexed" if indexed else "propertyoverlist"
    res = LawResult(name, "pass", mode="exhaustive")
    for ptxt in (_IPROPS if indexed else _PROPS):
        prop = parse_pred(ptxt)
        inst = subst(prop, {"H": FunApp("nth", (VarRef("L"), VarRef("I")))})
        if indexed:
            inst = subst(inst, {"J": VarRef("I")})
        lhs = parse_command("<list(L)>")
        lhs = PAnd(lhs, Spec(ForallP("I", inst, int_term(1), FunApp("len", (VarRef("L"),)))))
        if indexed:
            body = parse_command(
                f"<L = []> \\/ (exists H, T . <L = [H|T]>, <{ptxt}>, p(V, T, J + 1))")
            rec = RecBlock("p", Param(("V", "L", "J"), body))
            call = Call("proc", (VarRef("V"), VarRef("L"), int_term(1)))
        else:
            body = parse_command(f"<L = []> \\/ (exists H, T . <L = [H|T]>, <{ptxt}>, p(V, T))")
            rec = RecBlock("p", Param(("V", "L"), body))
            call = Call("proc", (VarRef("V"), VarRef("L")))
        env = {"proc": fix(u, rec)}
        before = cexec(u, lhs, env)
        after = cexec(u, call, env)
        res.enumerated += 1
        res.instances += 1
        if not refines(before, after):
            res.status = "fail"
            res.detail = f"property {ptxt}"
            return res
    return res
