import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsrefine.errors import ConfigError, UndefinedTerm
from wsrefine.syntax.parser import parse_pred, parse_program, parse_term
from wsrefine.universe import PredValue, Undefined, Universe, build_universe, small_universe
from wsrefine.values import as_pylist, from_pylist

F_TABLE = {(0,): 1, (1,): 0}


@pytest.fixture(scope="module")
def u3():
    return Universe([0, 1], {"X": [0, 1], "Y": [0, 1], "Z": [0, 1]}, functors={"f": (1, F_TABLE)})


def test_eval_var(u3):
    b = u3.binding(X=0, Y=1, Z=0)
    assert u3.eval_term(parse_term("X"), b) == 0
    assert u3.eval_term(parse_term("Y"), b) == 1


def test_eval_user_functor(u3):
    b = u3.binding(X=1, Y=0, Z=0)
    assert u3.eval_term(parse_term("f(X)"), b) == F_TABLE[(1,)]


def test_division_by_zero_undefined(u22):
    b = u22.binding(X=1, Y=0)
    assert u22.eval_term(parse_term("X / Y"), b) is Undefined
    assert u22.eval_term(parse_term("X + Y"), u22.binding(X=1, Y=1)) is Undefined  # 2 is outside Val
    assert u22.eval_term(parse_term("X / Y"), u22.binding(X=1, Y=1)) == 1


def test_term_defined(u22):
    assert u22.term_defined(parse_term("X / Y"), [])
    assert not u22.term_defined(parse_term("X / Y"), list(u22.bindings()))
    states = [b for b in u22.bindings() if b["Y"] == 1]
    assert u22.term_defined(parse_term("X / Y"), states)


def test_assign(u3):
    b = u3.binding(X=0, Y=1, Z=0)
    assert u3.assign("X", parse_term("Y"), {b}) == {u3.binding(X=1, Y=1, Z=0)}
    assert u3.assign("X", parse_term("Y"), set()) == frozenset()


def test_assign_reproduces_function_graph(u3):
    # assigning Y := f(X) over every binding yields the graph of f, four bindings
    s = set(u3.bindings())
    out = u3.assign("Y", parse_term("f(X)"), s)
    expected = {u3.binding(X=x, Y=F_TABLE[(x,)], Z=z) for x in (0, 1) for z in (0, 1)}
    assert out == expected
    assert out == u3.pred_states(parse_pred("Y = f(X)"))


def test_assign_undefined(u22):
    with pytest.raises(UndefinedTerm):
        u22.assign("X", parse_term("1 / Y"), {u22.binding(X=0, Y=0)})


def test_unbind(u22):
    b = u22.binding(X=0, Y=1)
    assert u22.unbind("X", set()) == frozenset()
    once = u22.unbind("X", {b})
    assert len(once) == 2
    assert u22.unbind("X", once) == once


def test_eval_pred_three_valued(u22):
    b = u22.binding(X=0, Y=1)
    assert u22.eval_pred(parse_pred("X = 0"), b) == PredValue.TRUE
    assert u22.eval_pred(parse_pred("false"), b) == PredValue.FALSE
    assert u22.eval_pred(parse_pred("Y = 1 / X"), b) == PredValue.UNDEFINED
    # strict propagation: false /\ undefined stays undefined
    assert u22.eval_pred(parse_pred("false /\\ Y = 1 / X"), b) == PredValue.UNDEFINED
    # quantifiers need every instance defined
    assert u22.eval_pred(parse_pred("exists X . Y = 1 / X"), b) == PredValue.UNDEFINED


def test_pred_states(u22):
    allb = set(u22.bindings())
    assert u22.pred_states(parse_pred("true")) == allb
    assert u22.pred_states(parse_pred("false")) == frozenset()
    assert u22.pred_states(parse_pred("X < Y")) == {b for b in allb if b["X"] < b["Y"]}


def test_entails(u22):
    assert u22.entails(parse_pred("false"), parse_pred("X = 1"))
    assert not u22.entails(parse_pred("X = 0"), parse_pred("X = 1"))
    assert u22.entails(parse_pred("X = 0 /\\ Y = 0"), parse_pred("X = Y"))


def test_entails_factorial_case(factorial_program):
    u = build_universe(factorial_program.universe)
    assert u.entails(parse_pred("U = 0"), parse_pred("V = fact(U) <=> V = 1"))
    assert not u.entails(parse_pred("true"), parse_pred("V = fact(U) <=> V = 1"))


def test_cap_guardrail():
    u = Universe(list(range(10)), {f"X{i}": range(10) for i in range(8)}, cap=10 ** 7)
    with pytest.raises(ConfigError):
        u.pred_states(parse_pred(" /\\ ".join(f"X{i} = 0" for i in range(8))))


def test_lists_domain_with_length_bound():
    p = parse_program("values int 1..2; values lists maxlen 2 over 1..2;"
                      "var L in lists; var T in lists maxlen 1;")
    u = build_universe(p.universe)
    dom_t, dom_l = u.domain("T"), u.domain("L")
    assert max(len(as_pylist(v)) for v in dom_t) == 1
    assert max(len(as_pylist(v)) for v in dom_l) == 2
    assert from_pylist([1, 2]) in dom_l


_ATOMS = ["X = 0", "X = 1", "Y = 0", "X = Y", "X < Y", "Y = 1 / X", "true", "false"]
_preds = st.recursive(
    st.sampled_from(_ATOMS),
    lambda sub: st.one_of(
        st.builds(lambda a, b: f"({a} /\\ {b})", sub, sub),
        st.builds(lambda a, b: f"({a} \\/ {b})", sub, sub),
        st.builds(lambda a: f"~({a})", sub),
    ),
    max_leaves=5,
)


@given(_preds, _preds, _preds)
def test_entails_is_a_preorder(p, q, r):
    u = small_universe(2, 2)
    P, Q, R = parse_pred(p), parse_pred(q), parse_pred(r)
    assert u.entails(P, P)
    if u.entails(P, Q) and u.entails(Q, R):
        assert u.entails(P, R)


@given(_preds, _preds)
def test_pred_states_of_connectives(p, q):
    u = small_universe(2, 2)
    P, Q = parse_pred(p), parse_pred(q)
    assert u.pred_states(parse_pred(f"({p}) /\\ ({q})")) == u.pred_states(P) & u.pred_states(Q)
    total = all(u.eval_pred(x, b) != PredValue.UNDEFINED for x in (P, Q) for b in u.bindings())
    if total:
        assert u.pred_states(parse_pred(f"({p}) \\/ ({q})")) == u.pred_states(P) | u.pred_states(Q)


def test_table_extension_only_resolves_undefined():
    small = Universe([0, 1], {"X": [0, 1]}, functors={"g": (1, {(0,): 1})})
    big = Universe([0, 1], {"X": [0, 1]}, functors={"g": (1, {(0,): 1, (1,): 1})})
    for text in ["g(X) = 1", "g(X) = X", "~(g(X) = 0)", "g(X) = 1 \\/ X = 1"]:
        p = parse_pred(text)
        for x in (0, 1):
            a = small.eval_pred(p, small.binding(X=x))
            b = big.eval_pred(p, big.binding(X=x))
            assert a == PredValue.UNDEFINED or a == b


def test_binding_enumeration_order(u22):
    got = [(b["X"], b["Y"]) for b in u22.bindings()]
    assert got == list(itertools.product([0, 1], [0, 1]))
