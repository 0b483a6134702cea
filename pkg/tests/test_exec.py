import itertools

import numpy as np
import pytest

from cmdgen import all_commands
from wsrefine.errors import NotAChain, NotHealthy, UniverseMismatch
from wsrefine.execution import (
    ExecChain, Execution, Incompatible, first_disagreement, OutsideDomain, Status, abort_exec, apply_exec, chain_join,
    e_and, e_exists, e_forall, e_or, e_seq, fail_exec, from_assert, from_spec, join, meet, refines,
    skip_exec,
)
from wsrefine.naive import NaiveExecution, check_properties, from_naive, to_naive
from wsrefine.semantics import cexec
from wsrefine.syntax.parser import parse_pred
from wsrefine.universe import small_universe


@pytest.fixture(scope="module")
def execs22(u22):
    """Every execution over the four bindings of |Var| = 2, |Val| = 2."""
    out = []
    for combo in itertools.product((0, 1, 2), repeat=4):
        out.append(Execution(u22, u22.var_names, np.array(combo, dtype=np.int8).reshape(2, 2)))
    return out


def _s(u, *pairs):
    return frozenset(u.binding(X=x, Y=y) for x, y in pairs)


def test_golden_equality_spec(u22):
    e = from_spec(u22, parse_pred("X = Y"))
    everything = frozenset(u22.bindings())
    assert apply_exec(e, everything) == _s(u22, (0, 0), (1, 1))
    assert apply_exec(e, _s(u22, (0, 1))) == frozenset()
    assert apply_exec(e, frozenset()) == frozenset()
    assert apply_exec(abort_exec(u22), _s(u22, (0, 0))) is OutsideDomain
    assert apply_exec(abort_exec(u22), frozenset()) == frozenset()


def test_spec_and_assert_constructors(u22):
    everything = frozenset(u22.bindings())
    assert apply_exec(from_spec(u22, parse_pred("false")), everything) == frozenset()
    assert apply_exec(from_spec(u22, parse_pred("true")), everything) == everything
    e = from_spec(u22, parse_pred("Y = 1 / X"))
    for b in u22.bindings():
        assert (e.status(b) == Status.UNDEFINED) == (b["X"] == 0)
    assert to_naive(from_assert(u22, parse_pred("false"))) == NaiveExecution({frozenset(): frozenset()})
    assert from_assert(u22, parse_pred("true")) == skip_exec(u22)
    a = from_assert(u22, parse_pred("~(X = 0)"))
    assert apply_exec(a, _s(u22, (0, 1), (1, 1))) is OutsideDomain


def test_units_and_zeros(execs22, u22):
    skip, fail, abort = skip_exec(u22), fail_exec(u22), abort_exec(u22)
    for e in execs22:
        assert e_and(skip, e) == e
        assert e_or(fail, e) == e
        assert e_and(abort, e) == abort and e_or(abort, e) == abort
        assert e_seq(skip, e) == e == e_seq(e, skip)
        assert e_seq(abort, e) == abort
    assert e_seq(fail, abort) == fail


def test_quantifiers(u22):
    eq = from_spec(u22, parse_pred("X = Y"))
    assert e_exists("Y", eq) == skip_exec(u22)
    assert e_forall("Y", eq) == fail_exec(u22)
    assert e_exists("X", abort_exec(u22)) == abort_exec(u22)


def test_refines_examples(execs22, u22):
    abort = abort_exec(u22)
    for e in execs22:
        assert refines(abort, e)
        assert refines(e, e)
    for a in ["X = 0", "X = Y", "false", "true"]:
        for e in execs22:
            assert refines(e_seq(from_assert(u22, parse_pred(a)), e), e)


def test_meet_join_examples(execs22, u22):
    abort = abort_exec(u22)
    for e in execs22:
        assert meet(e, e) == e and join(e, e) == e
        assert meet(e, abort) == abort
    f0 = from_spec(u22, parse_pred("X = 0"))
    assert join(f0, from_spec(u22, parse_pred("~(X = 0)"))) is Incompatible


def test_join_completes_domain(u22):
    # two restrictions of <X = 0> to disjoint parts of the binding space
    left = e_seq(from_assert(u22, parse_pred("Y = 0")), from_spec(u22, parse_pred("X = 0")))
    right = e_seq(from_assert(u22, parse_pred("Y = 1")), from_spec(u22, parse_pred("X = 0")))
    j = join(left, right)
    assert j == from_spec(u22, parse_pred("X = 0"))
    assert to_naive(j).domain == {frozenset(s) for s in _powerset(u22.bindings())}


def _powerset(items):
    items = list(items)
    return [c for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def test_universe_mismatch(u22):
    other = small_universe(2, 2)
    with pytest.raises(UniverseMismatch):
        e_and(skip_exec(u22), skip_exec(other))


def test_chain_join_examples(u22, execs22):
    e = from_spec(u22, parse_pred("X = Y"))
    assert chain_join(ExecChain([e, e, e])) == e
    assert chain_join(ExecChain([abort_exec(u22), e])) == e
    with pytest.raises(NotAChain):
        ExecChain([skip_exec(u22), fail_exec(u22)])


def test_naive_round_trip(execs22):
    for e in execs22:
        n = to_naive(e)
        assert check_properties(n) == []
        assert from_naive(n, e.universe) == e


def test_naive_abort():
    u = small_universe(1, 2)
    assert to_naive(abort_exec(u)) == NaiveExecution({frozenset(): frozenset()})


def test_not_healthy_property_two(u22):
    b = u22.binding(X=0, Y=0)
    other = u22.binding(X=1, Y=1)
    bad = NaiveExecution({frozenset(): frozenset(), frozenset([b]): frozenset([other])})
    with pytest.raises(NotHealthy) as exc:
        from_naive(bad, u22)
    assert exc.value.property == 2


def test_combinators_monotone(execs22, u22):
    # sample pairs e1 ⊑ e2 and check every combinator preserves the order
    pairs = [(a, b) for a in execs22[::4] for b in execs22[::3] if refines(a, b)]
    others = execs22[::7]
    assert len(pairs) > 20
    for a, b in pairs:
        for c in others:
            for op in (e_and, e_or, e_seq):
                assert refines(op(a, c), op(b, c))
                assert refines(op(c, a), op(c, b))
        for v in ("X", "Y"):
            assert refines(e_exists(v, a), e_exists(v, b))
            assert refines(e_forall(v, a), e_forall(v, b))


def test_oracle_depth_two(u22):
    # the full depth-3 sweep lives in the acceptance suite
    for c, n in all_commands(u22, 2):
        assert to_naive(cexec(u22, c)) == n


def test_dump_format(u22):
    text = from_spec(u22, parse_pred("X = Y")).dump()
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0] == "{X=0, Y=0} → Succeed"
    assert lines[1] == "{X=0, Y=1} → Fail"


def test_disagreement_between_constant_executions(u22):
    hit = first_disagreement(skip_exec(u22).compact(), fail_exec(u22).compact())
    assert hit is not None
    binding, s1, s2 = hit
    assert (s1, s2) == (Status.SUCCEED, Status.FAIL)
