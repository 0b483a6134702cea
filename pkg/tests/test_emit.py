import pytest

from cmdgen import all_commands
from conftest import GOLDEN, load
from wsrefine.emit import (
    PrologClause, PrologUnit, PStruct, PVar, check_executable, emit_prolog, ground_query, render,
    spot_check,
)
from wsrefine.errors import UnorderableDataflow
from wsrefine.semantics import load_program, pexec
from wsrefine.syntax.ast import Param
from wsrefine.syntax.parser import parse_command, parse_program
from wsrefine.universe import small_universe

BASE = "values int 0..2; var X, Y, Z in 0..2;"


def _prog(body: str, formals=("X", "Y"), modes=None):
    text = f"{BASE} proc p = ({', '.join(formals)} . {body});"
    if modes:
        text += f" mode p({', '.join(modes)});"
    return parse_program(text)


def test_factorial_golden(factorial_reports):
    unit = emit_prolog(factorial_reports[-1].program)
    assert render(unit) == (GOLDEN / "factorial.pl").read_text()


def test_nqueens_golden(nqueens_reports):
    unit = emit_prolog(nqueens_reports[-1].program)
    assert render(unit) == (GOLDEN / "nqueens.pl").read_text()
    arities = {(c.head.functor, len(c.head.args)) for c in unit.clauses}
    assert arities == {("nqueens", 2), ("nqacc", 3), ("memrng", 2), ("norowclash", 2), ("nodiagAcc", 3)}


def test_unrefined_factorial_rejected(factorial_program):
    rep = check_executable(factorial_program)
    assert rep.verdict == "rejected"
    assert set(rep.reasons()) == {"assumption", "non-arithmetic-spec"}
    with pytest.raises(ValueError):
        emit_prolog(factorial_program)


def test_refined_factorial_executable(factorial_reports):
    rep = check_executable(factorial_reports[-1].program)
    assert rep.executable and rep.verdict == "executable" and rep.violations == []


@pytest.mark.parametrize("body, reason", [
    ("forall Y . <X = Y>", "universal-quantifier"),
    ("<X = 0> /\\ <Y = 0>", "parallel-conjunction"),
    ("{X = 0}, <Y = 0>", "assumption"),
    ("<forall Z in 0..1 . X = Y>", "universal-quantifier"),
    ("<exists Z . X = Y>", "general-spec"),
])
def test_rejection_reasons(body, reason):
    rep = check_executable(_prog(body))
    assert reason in rep.reasons()
    assert rep.verdict == "rejected"


def test_unbound_divisor_is_unorderable():
    with pytest.raises(UnorderableDataflow):
        emit_prolog(_prog("<Y = 1 / X>", modes=("out", "out")))


def test_fact_rendering():
    unit = PrologUnit([PrologClause(PStruct("p", (PVar("X"),)), [])], ["p"])
    assert render(unit) == "p(X).\n"
    assert render(emit_prolog(_prog("skip", formals=("X",)))) == "p(_).\n"


def test_is_for_outputs():
    unit = emit_prolog(_prog("<Y = X + 1> \\/ <Y = 0>", modes=("in", "out")))
    assert render(unit) == "p(X,Y) :- Y is X+1.\np(_,Y) :- Y=0.\n"


def test_scoped_renaming_of_existentials():
    unit = emit_prolog(_prog("<X = 1>, exists X . <X = Y>"))
    text = render(unit)
    assert text.startswith("p(X,Y) :- X=1")
    assert spot_check(unit, "p", pexec(small_universe(2, 2), Param(("X", "Y"),
                                                                   parse_command("<X = 1>")))) == []


@pytest.mark.parametrize("which", ["factorial", "nqueens"])
def test_spot_check_agrees(which, factorial_reports, nqueens_reports):
    reports = factorial_reports if which == "factorial" else nqueens_reports
    program = reports[-1].program
    loaded = load_program(program)
    unit = emit_prolog(program)
    for name, _ in program.procs:
        assert spot_check(unit, name, loaded.env[name]) == [], name


def test_ground_queries_factorial(factorial_reports):
    unit = emit_prolog(factorial_reports[-1].program)
    assert ground_query(unit, "f", (4, 24))
    assert not ground_query(unit, "f", (3, 7))


def test_emission_total_on_executable_fragment():
    """Every executable depth-3 command emits, or is rejected for dataflow; emitted ones agree with cexec."""
    u = small_universe(2, 2)
    base = parse_program("values int 0..1; var X, Y in 0..1;")
    emitted = rejected = 0
    for c, _ in all_commands(u, 3):
        if not check_executable(c).executable:
            continue
        prog = base.with_proc("p", Param(("X", "Y"), c))
        try:
            unit = emit_prolog(prog)
        except UnorderableDataflow:
            rejected += 1
            continue
        emitted += 1
        assert spot_check(unit, "p", pexec(u, Param(("X", "Y"), c))) == []
    assert emitted > 1000 and rejected < emitted


def test_unrefined_nqueens_rejected():
    prog = load("nqueens.wsl")
    assert check_executable(prog).verdict == "rejected"
