import itertools

import numpy as np
import pytest

from conftest import load
from wsrefine.execution import Status, abort_exec, fail_exec, from_spec, refines
from wsrefine.semantics import (
    ParamExecution, cexec, check_wellfounded, fix, int_less, length_less, load_program, pabort, pexec,
    step_context, table_relation,
)
from wsrefine.syntax.ast import int_term
from wsrefine.syntax.parser import parse_command, parse_pcommand, parse_pred
from wsrefine.universe import Universe
from wsrefine.values import from_pylist


@pytest.fixture(scope="module")
def ux():
    return Universe([0, 1, 2, 3], {"X": [0, 1, 2, 3]})


@pytest.fixture(scope="module")
def p123():
    return load_program(load("p123.wsl"))


@pytest.mark.parametrize("goal, expected", [("P1", Status.UNDEFINED), ("P2", Status.FAIL),
                                            ("P3", Status.UNDEFINED)])
def test_guarded_division_at_zero(p123, goal, expected):
    e = p123.goal_exec(goal)
    u = p123.universe
    for y in u.domain("Y"):
        assert e.status(u.binding(X=0, Y=y)) == expected


def test_guarded_division_elsewhere(p123):
    u = p123.universe
    e1, e2 = p123.goal_exec("P1"), p123.goal_exec("P2")
    for b in u.bindings():
        if b["X"] != 0:
            assert e1.status(b) == e2.status(b)


def test_parallel_spec_is_not_spec_of_conjunction(u22):
    joined = cexec(u22, parse_command("<X = Y> /\\ <Y = 1 / X>"))
    single = cexec(u22, parse_command("<X = Y /\\ Y = 1 / X>"))
    # both are undefined where the division is; they agree on the rest here
    assert refines(joined, single) and refines(single, joined)
    # but a sequential guard makes the single spec strictly better
    guarded = cexec(u22, parse_command("<~(X = 0)>, <Y = 1 / X>"))
    assert refines(joined, guarded) and not refines(guarded, joined)


def test_unbound_call_aborts(u22):
    assert cexec(u22, parse_command("q(X)")) == abort_exec(u22)


def test_pexec_identity_and_call(ux):
    p = pexec(ux, parse_pcommand("(X . <X = 1>)"))
    assert p.formals == ("X",)
    assert list(p.table) == [Status.FAIL, Status.SUCCEED, Status.FAIL, Status.FAIL]
    called = cexec(ux, parse_command("p(X + 1)"), {"p": p})
    got = [called.status(ux.binding(X=x)) for x in range(4)]
    assert got == [Status.SUCCEED, Status.FAIL, Status.FAIL, Status.UNDEFINED]  # 3 + 1 leaves Val


def test_pexec_at_constant(ux):
    p = pexec(ux, parse_pcommand("(X . <X = 2>)"))
    assert p.at((int_term(2),)) == from_spec(ux, parse_pred("true"))
    assert p.at((int_term(0),)) == fail_exec(ux)


# ------------------------------------------------------------ recursion


def test_trivial_recursion_is_pabort(ux):
    r = fix(ux, parse_pcommand("re p . (X . p(X)) er"))
    assert r == pabort(ux, ("X",))


@pytest.mark.parametrize("op", ["/\\", "\\/"])
def test_parallel_variants_are_pabort(ux, op):
    r = fix(ux, parse_pcommand(f"re p . (X . <X = 1> {op} p(X)) er"))
    assert r == pabort(ux, ("X",))


def test_sequential_variant(ux):
    r = fix(ux, parse_pcommand("re p . (X . <X = 1>, p(X)) er"))
    want = pexec(ux, parse_pcommand("(X . <X = 1>, abort)"))
    assert r == want
    assert list(r.table) == [Status.FAIL, Status.UNDEFINED, Status.FAIL, Status.FAIL]


_BLOCKS = [
    "re p . (X . p(X)) er",
    "re p . (X . <X = 0> \\/ p(X - 1)) er",
    "re p . (X . <X = 3> \\/ <X < 3>, p(X + 1)) er",
    "re p . (X . <X = 0>, <X = 0> \\/ <X > 0>, p(X - 1)) er",
    "re p . (X . <X = 1>, p(X)) er",
    "re p . (X . {X < 3}, p(X + 1) \\/ <X = 2>) er",
]


@pytest.mark.parametrize("text", _BLOCKS)
def test_fixed_point_equation_and_unfolding(ux, text):
    rec = parse_pcommand(text)
    r = fix(ux, rec)
    assert step_context(ux, rec)(r) == r
    assert pexec(ux, rec.inner, {rec.ident: r}) == r
    for a, b in zip(r.chain, r.chain[1:]):
        assert a.refines(b)


@pytest.mark.parametrize("text", _BLOCKS)
def test_leastness(ux, text):
    rec = parse_pcommand(text)
    r = fix(ux, rec)
    ctx = step_context(ux, rec)
    fixed = 0
    for combo in itertools.product((0, 1, 2), repeat=4):
        p = ParamExecution(ux, ("X",), np.array(combo, dtype=np.int8))
        if ctx(p) == p:
            fixed += 1
            assert r.refines(p)
    assert fixed >= 1


def test_countdown_succeeds_everywhere(ux):
    r = fix(ux, parse_pcommand("re p . (X . <X = 0>, <X = 0> \\/ <X > 0>, p(X - 1)) er"))
    assert list(r.table) == [Status.SUCCEED] * 4
    assert r.iterations == 4


def test_factorial_fixed_point(factorial_program):
    prog = load_program(factorial_program)
    rec = parse_pcommand("re f . (U, V . (<U = 0>, <V = 1>) \\/ (<U > 0>, exists U1, V1 . "
                         "<U1 = U - 1>, f(U1, V1), <V = V1 * U>)) er")
    r = fix(prog.universe, rec, prog.env)
    facts = [1, 1, 2, 6, 24]
    us, vs = prog.universe.domain("U"), prog.universe.domain("V")
    succ = {(int(us[i]), int(vs[j])) for i, j in zip(*np.nonzero(r.table == Status.SUCCEED))}
    assert succ == {(n, facts[n]) for n in range(5)}
    assert not (r.table == Status.UNDEFINED).any()


# ------------------------------------------------------ well-foundedness


def test_int_less_wellfounded():
    assert check_wellfounded(int_less(), [(i,) for i in range(10)])


def test_successor_mod_three_cycles():
    rel = table_relation("succ3", [((i,), ((i + 1) % 3,)) for i in range(3)])
    assert not check_wellfounded(rel, [(i,) for i in range(3)])


def test_list_length_order_wellfounded():
    lists = [(from_pylist(list(t)),) for n in range(4) for t in itertools.product([1, 2, 3], repeat=n)]
    assert check_wellfounded(length_less(3), lists)


def test_empty_domain_wellfounded():
    assert check_wellfounded(int_less(), [])
