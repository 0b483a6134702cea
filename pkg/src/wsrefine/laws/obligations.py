"""Proof obligations produced by law application, and their discharge by enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..syntax.ast import And, TruePred
from ..syntax.pretty import pretty_print
from ..syntax.transforms import alpha_equal
from ..values import value_str


def conj(preds) -> object:
    """Right-nested conjunction of ``preds`` (``true`` when empty)."""
    preds = [p for p in preds if not isinstance(p, TruePred)]
    if not preds:
        return TruePred()
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = And(p, out)
    return out


@dataclass(frozen=True)
class Entails:
    context: object
    hyp: object
    concl: object

    def __str__(self) -> str:
        return f"{pretty_print(self.context)} ⊨ ({pretty_print(self.hyp)}) ⟹ ({pretty_print(self.concl)})"


@dataclass(frozen=True)
class Equiv:
    context: object
    P: object
    Q: object

    def __str__(self) -> str:
        return f"{pretty_print(self.context)} ⊨ ({pretty_print(self.P)}) ≡ ({pretty_print(self.Q)})"


@dataclass(frozen=True)
class WellFounded:
    rel: object
    domain: Optional[tuple] = None

    def __str__(self) -> str:
        return f"well-founded {self.rel.name}"


@dataclass(frozen=True)
class SemanticRefines:
    before: object
    after: object
    context: object

    def __str__(self) -> str:
        return f"{pretty_print(self.context)} ⊨ {pretty_print(self.before)} ⊑̇ {pretty_print(self.after)}"


@dataclass
class Discharge:
    ok: bool
    witness: Optional[dict] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _factors(u, *preds):
    fs = [u.pred_factor(p) for p in preds]
    names = u.order(v for f in fs for v in f.vars)
    u.check_size(names)
    return names, [np.broadcast_to(u.align(f, names), u.shape(names)) for f in fs]


def discharge_detail(ob, u, env=None) -> Discharge:
    """Discharge ``ob`` over universe ``u``, reporting a witness binding on failure."""

    if isinstance(ob, Entails):
        if alpha_equal(ob.hyp, ob.concl):
            return Discharge(True)
        names, (g, h, c) = _factors(u, ob.context, ob.hyp, ob.concl)
        bad = (g == 2) & (h == 2) & (c != 2)
        return _verdict(u, names, bad)
    if isinstance(ob, Equiv):
        names, (g, p, q) = _factors(u, ob.context, ob.P, ob.Q)
        bad = (g == 2) & (p != q)
        return _verdict(u, names, bad)
    if isinstance(ob, WellFounded):
        from ..semantics import check_wellfounded
        if ob.domain is None and hasattr(ob.rel, "wellfounded"):
            ok = ob.rel.wellfounded()
        else:
            ok = check_wellfounded(ob.rel, ob.domain or ())
        return Discharge(ok, None, "" if ok else f"{ob.rel.name} has a cycle")
    if isinstance(ob, SemanticRefines):
        from ..derivation import pointwise_witness
        hit = pointwise_witness(u, ob.before, ob.after, ob.context, env)
        if hit is None:
            return Discharge(True)
        binding, s1, s2 = hit
        return Discharge(False, binding, f"{s1} before, {s2} after")
    raise TypeError(f"not an obligation: {ob!r}")


def _verdict(u, names, bad) -> Discharge:
    if not bad.any():
        return Discharge(True)
    pos = np.argwhere(bad)[0]
    w = {n: u.values[int(u.domains[n][p])] for n, p in zip(names, pos)}
    return Discharge(False, w, "fails at " + ", ".join(f"{k}={value_str(v)}" for k, v in w.items()))


def discharge(ob, u, env=None) -> bool:
    return discharge_detail(ob, u, env).ok
