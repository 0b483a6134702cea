"""Exhaustive command enumeration for the small-universe cross checks.

Commands are built level by level; a command of depth d has at least one
immediate sub-command of depth d - 1.  The naive set-of-pairs execution of
every command is composed bottom-up from its children with the literal
combinators, so the oracle cost per command is one combinator application.
"""

import itertools

from wsrefine.naive import n_and, n_assert, n_or, n_quant, n_seq, n_spec
from wsrefine.syntax.ast import Assert, Exists, Forall, PAnd, POr, SAnd, Spec
from wsrefine.syntax.parser import parse_pred

ATOMS = ("X = Y", "Y = 0", "X = 1 / Y")

_BIN = ((POr, n_or), (PAnd, n_and), (SAnd, n_seq))


def levels(u, depth: int, atoms=ATOMS) -> list:
    """``levels[d]`` lists ``(command, naive)`` pairs of depth exactly ``d + 1``."""
    preds = [parse_pred(a) for a in atoms]
    first = []
    for p in preds:
        first.append((Spec(p), n_spec(u, p)))
        first.append((Assert(p), n_assert(u, p)))
    out = [first]
    for _ in range(depth - 1):
        below = [x for lvl in out for x in lvl]
        top = out[-1]
        top_ids = {id(c) for c, _ in top}
        new = []
        for (a, na), (b, nb) in itertools.product(below, repeat=2):
            if id(a) not in top_ids and id(b) not in top_ids:
                continue
            for ctor, nop in _BIN:
                new.append((ctor(a, b), nop(na, nb)))
        for c, nc in top:
            for v in u.var_names:
                new.append((Exists(v, c), n_quant(u, v, nc, False)))
                new.append((Forall(v, c), n_quant(u, v, nc, True)))
        out.append(new)
    return out


def all_commands(u, depth: int, atoms=ATOMS) -> list:
    return [x for lvl in levels(u, depth, atoms) for x in lvl]
