import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA, load
from wsrefine.errors import FreeVarError, ParseError, UnknownLaw
from wsrefine.semantics import cexec, fix, pexec
from wsrefine.syntax.ast import (
    Assert, Call, Compare, Exists, Forall, FunApp, PAnd, Param, POr, RecBlock, SAnd, Spec,
    TruePred, VarRef, int_term,
)
from wsrefine.syntax.parser import (
    parse_command, parse_derivation, parse_pcommand, parse_pred, parse_program, parse_term,
)
from wsrefine.syntax.pretty import pretty_print
from wsrefine.syntax.transforms import (
    CaptureError, encode_mutual_recursion, free_vars, normalize, structurally_equal, subst,
)
from wsrefine.universe import Universe


def test_single_param_proc():
    p = parse_program("values int 0..1; var V in 0..1; proc id = (V . <V = 0>);")
    (name, pc), = p.procs
    assert name == "id"
    assert pc == Param(("V",), Spec(Compare("=", VarRef("V"), int_term(0))))


def test_factorial_block_shape():
    pc = parse_pcommand("re f . (U, V . (<U = 0>, <V = 1>) \\/ (<U > 0>, exists U1, V1 . "
                        "<U1 = U - 1>, f(U1, V1), <V = V1 * U>)) er")
    assert isinstance(pc, RecBlock) and pc.ident == "f"
    assert pc.inner.formals == ("U", "V")
    left, right = pc.inner.body.left, pc.inner.body.right
    assert isinstance(pc.inner.body, POr)
    assert left == SAnd(Spec(parse_pred("U = 0")), Spec(parse_pred("V = 1")))
    assert isinstance(right.right, Exists) and right.right.var == "U1"


def test_stray_free_variable():
    with pytest.raises(FreeVarError, match="W"):
        parse_program("values int 0..1; var V, W in 0..1; proc p = (V . <W = 0>);")


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_program("values int 0..1;\nvar X in 0..1;\ngoal g = <X = >;")
    assert exc.value.line == 3 and exc.value.col > 0
    assert exc.value.expected


def test_derivation_single_step():
    (script,) = parse_derivation("derivation p; step pandtosand at [0];")
    assert script.target == "p"
    assert len(script.steps) == 1
    assert script.steps[0].law == "pandtosand" and script.steps[0].focus_path == (0,)


def test_unknown_law():
    with pytest.raises(UnknownLaw, match="bogus"):
        parse_derivation("derivation p; step bogus at [];")


def test_factorial_script_has_eleven_law_steps():
    (script,) = parse_derivation((DATA / "factorial.wsd").read_text())
    assert len(script.law_steps) == 11
    laws = [s.law for s in script.law_steps]
    assert laws == ["caseanalysis", "equivspec", "equivspec", "liftexists", "liftpand", "pandtosand",
                    "pandtosand", "assumptafterspec", "assumptafterspec", "use-hypothesis",
                    "removeassumpt"]


@pytest.mark.parametrize("text, expected", [
    ("X", {"X"}),
    ("f(X, Y)", {"X", "Y"}),
    ("g(1, h(Z))", {"Z"}),
])
def test_free_vars_terms(text, expected):
    assert free_vars(parse_term(text)) == expected


def test_free_vars_binder():
    assert free_vars(parse_command("exists X . <X = Y>")) == {"Y"}
    assert free_vars(parse_command("p(X + 1), forall Y . {Y < Z}")) == {"X", "Z"}


def _term_oracle(t):
    if isinstance(t, VarRef):
        return {t.name}
    return set().union(set(), *(_term_oracle(a) for a in t.args))


_terms = st.recursive(
    st.sampled_from([VarRef("X"), VarRef("Y"), VarRef("Z"), int_term(0), int_term(1)]),
    lambda sub: st.one_of(
        st.builds(lambda a: FunApp("f", (a,)), sub),
        st.builds(lambda a, b: FunApp("g", (a, b)), sub, sub),
        st.builds(lambda a, b: FunApp("+", (a, b)), sub, sub),
    ),
    max_leaves=8,
)


@given(_terms)
def test_free_vars_agrees_with_oracle(t):
    assert free_vars(t) == _term_oracle(t)


def test_pretty_sugar():
    assert pretty_print(Spec(TruePred())) == "skip"
    assert pretty_print(SAnd(Assert(parse_pred("A = 0")), Spec(parse_pred("P = 1")))) == "{A = 0}, <P = 1>"
    assert pretty_print(parse_command("fail")) == "fail"
    assert pretty_print(parse_command("abort")) == "abort"


@pytest.mark.parametrize("name", ["factorial.wsl", "nqueens.wsl", "p123.wsl"])
def test_program_round_trip(name):
    p = load(name)
    again = parse_program(pretty_print(p))
    assert again.procs == p.procs and again.goals == p.goals and again.modes == p.modes
    assert again.universe == p.universe


_ATOMS = ["X = 0", "X = Y", "Y = 1 / X", "true", "false", "p(X)", "X in 0..1"]


def _commands(depth):
    base = []
    for a in _ATOMS[:5]:
        base += [f"<{a}>", f"{{{a}}}"]
    base.append("p(X)")
    out = list(base)
    if depth >= 2:
        for a, b in itertools.product(base[:6], repeat=2):
            for op in (" \\/ ", " /\\ ", ", "):
                out.append(f"({a}{op}{b})")
        for a in base[:6]:
            out += [f"(exists X . {a})", f"(forall Y . {a})"]
    return out


_cmd_texts = st.recursive(
    st.sampled_from([f"<{a}>" for a in _ATOMS] + [f"{{{a}}}" for a in _ATOMS[:5]] + ["p(X)", "p(X + 1)"]),
    lambda sub: st.one_of(
        st.builds(lambda a, b, op: f"({a}{op}{b})", sub, sub, st.sampled_from([" \\/ ", " /\\ ", ", "])),
        st.builds(lambda a, v: f"(exists {v} . {a})", sub, st.sampled_from("XY")),
        st.builds(lambda a, v: f"(forall {v} . {a})", sub, st.sampled_from("XY")),
    ),
    max_leaves=6,
)


def test_round_trip_enumerated():
    for text in _commands(2):
        c = parse_command(text)
        assert structurally_equal(parse_command(pretty_print(c)), c), text


@given(_cmd_texts)
def test_round_trip_generated(text):
    c = parse_command(text)
    assert structurally_equal(parse_command(pretty_print(c)), c)


def test_precedence():
    c = parse_command("<X = 0>, <Y = 0> \\/ <X = 1> /\\ <Y = 1>")
    assert isinstance(c, POr)
    assert isinstance(c.left, SAnd)
    assert isinstance(c.right, PAnd)


def test_normalize_right_nests():
    c = parse_command("((<X = 0>, <Y = 0>), <X = 1>)")
    n = normalize(c)
    assert isinstance(n.right, SAnd) and n.left == Spec(parse_pred("X = 0"))


def test_substitution_refuses_capture():
    c = parse_command("exists Y . <X = Y>")
    with pytest.raises(CaptureError):
        subst(c, {"X": VarRef("Y")})
    assert subst(c, {"X": VarRef("Z")}) == parse_command("exists Y . <Z = Y>")


# ------------------------------------------------------------ mutual recursion


def _fresh_factory():
    counter = itertools.count()
    return lambda v: f"{v}_{next(counter)}"


def test_mutual_single_def():
    pc = parse_pcommand("(X . <X = 0> \\/ exists Y . <Y = X - 1>, q(Y))")
    name, block, placeholders = encode_mutual_recursion([("q", pc)], _fresh_factory())
    assert placeholders == []
    assert block.inner.formals == ("I", "X")
    assert isinstance(block.inner.body, SAnd)
    assert block.inner.body.left == Spec(parse_pred("I = 1"))
    assert "p" in {c.proc for c in _calls(block)}


def _calls(node):
    out = []
    if isinstance(node, Call):
        out.append(node)
    for f in getattr(node, "__dataclass_fields__", {}):
        v = getattr(node, f)
        if hasattr(v, "__dataclass_fields__"):
            out += _calls(v)
    return out


def test_mutual_two_defs_shape():
    c1 = parse_pcommand("(A . <A = 0>)")
    c2 = parse_pcommand("(B . <B = 1>)")
    _, block, _ = encode_mutual_recursion([("p1", c1), ("p2", c2)], _fresh_factory())
    body = block.inner.body
    assert isinstance(body, POr)
    assert body.left == SAnd(Spec(parse_pred("I = 1")), Spec(parse_pred("A = 0")))
    assert body.right == SAnd(Spec(parse_pred("I = 2")), Spec(parse_pred("B = 1")))


def test_mutual_even_odd_matches_direct_definition():
    vals = list(range(-3, 6))  # N - 2 must stay inside the value set
    doms = {"I": [1, 2], "N": range(0, 4), "M": range(0, 4), "K": range(0, 4)}
    fresh_names = iter(["F0", "F1", "F2", "F3"])
    ev = parse_pcommand("(N . <N = 0> \\/ (exists K . <K = N - 1>, odd(K)))")
    od = parse_pcommand("(M . exists K . <K = M - 1>, even(K))")
    name, block, placeholders = encode_mutual_recursion([("even", ev), ("odd", od)], lambda v: next(fresh_names))
    for v, orig in placeholders:
        doms[v] = doms[orig]
    u = Universe(vals, doms)
    encoded = fix(u, block)
    direct = fix(u, parse_pcommand("re e . (N . <N = 0> \\/ (exists K . <K = N - 2>, e(K))) er"))
    for n in range(4):
        got = encoded.at((int_term(1), int_term(n), int_term(0)))
        want = direct.at((int_term(n),))
        assert got == want, n
    # the encoding keeps the free-variable discipline of parametrised commands
    assert free_vars(block.inner.body) <= set(block.inner.formals)
    assert pexec(u, block) == encoded
    assert cexec(u, parse_command("p(1, 2, 0)"), {"p": encoded}).counts()
