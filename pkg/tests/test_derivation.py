import itertools

import numpy as np
import pytest

from conftest import load, scripts
from wsrefine.derivation import (
    DerivationState, close_recursion, open_recursion, pointwise_refines, pointwise_witness, replay,
    use_hypothesis,
)
from wsrefine.errors import (
    DuplicateProc, HypothesisMismatch, NotWellFounded, ObligationFailed, StepFailed,
)
from wsrefine.execution import Status, refines
from wsrefine.semantics import cexec, load_program, pexec
from wsrefine.syntax.ast import Param
from wsrefine.syntax.parser import parse_command, parse_derivation, parse_pred, parse_program
from wsrefine.syntax.pretty import pretty_print
from wsrefine.universe import build_universe
from wsrefine.values import as_pylist, from_pylist

from cmdgen import all_commands

TOY = """
values int 0..3;
var X, Y in 0..3;
proc p = (X . <X = 0> \\/ <X > 0>);
proc q = (X . <X < 2>);
"""


# ---------------------------------------------------------------- factorial


def test_factorial_replays(factorial_reports):
    (rep,) = factorial_reports
    assert rep.ok, rep.text()
    assert rep.verified_steps == 11
    assert len(rep.law_steps) == 11
    assert rep.expected_ok and rep.end_to_end
    for s in rep.steps:
        assert all(d.ok for _, d in s.obligations)


def test_factorial_result_shape(factorial_reports):
    final = factorial_reports[0].final
    assert pretty_print(final).startswith("re f . (U, V . ")


def test_factorial_machine_lines_are_stable(factorial_program):
    a = replay(scripts("factorial.wsd")[0], factorial_program).machine_lines()
    b = replay(scripts("factorial.wsd")[0], factorial_program).machine_lines()
    assert a == b
    assert a[-1] == "result OK"


# ------------------------------------------------------------------ n-queens


def test_nqueens_replays(nqueens_reports):
    assert len(nqueens_reports) == 3
    for rep in nqueens_reports:
        assert rep.ok, rep.text()
        assert rep.expected_ok and rep.end_to_end
    names = {n for n, _ in nqueens_reports[-1].program.procs}
    assert {"norowclash", "nodiagAcc"} <= names


def _brute_force_solutions(n):
    out = set()
    for qs in itertools.product(range(1, n + 1), repeat=n):
        if all(qs[i] != qs[j] and abs(qs[i] - qs[j]) != j - i for i in range(n) for j in range(i + 1, n)):
            out.add(qs)
    return out


def test_brute_force_oracle_values():
    assert len(list(itertools.product(range(1, 4), repeat=3))) == 27
    assert _brute_force_solutions(3) == set()
    assert _brute_force_solutions(1) == {(1,)}
    assert _brute_force_solutions(2) == set()


def test_nqacc_fixed_point_matches_brute_force(nqueens_reports):
    prog = load_program(nqueens_reports[-1].program)
    u = prog.universe
    for n in range(4):
        e = cexec(u, parse_command(f"nqacc({n}, [], S)"), prog.env)
        e = e.compact()
        assert set(e.vars) <= {"S"}
        table = np.broadcast_to(e.over(("S",)), (len(u.domain("S")),))
        assert not (table == Status.UNDEFINED).any()
        got = {tuple(as_pylist(s)) for s, st in zip(u.domain("S"), table) if st == Status.SUCCEED}
        assert got == {tuple(reversed(s)) for s in _brute_force_solutions(n)} | (
            {()} if n == 0 else set()), n


# ------------------------------------------------------------ pointwise


def test_pointwise_examples(factorial_program):
    u = build_universe(factorial_program.universe)
    a, b = parse_command("<V = fact(U)>"), parse_command("<V = 1>")
    assert pointwise_refines(u, a, b, parse_pred("U = 0"))
    assert not pointwise_refines(u, a, b, parse_pred("true"))
    binding, s1, s2 = pointwise_witness(u, a, b)
    assert s1 != s2


def test_pointwise_true_context_is_refines(u22):
    cmds = [c for c, _ in all_commands(u22, 2)][::37]
    for c1 in cmds:
        for c2 in cmds:
            e1, e2 = cexec(u22, c1), cexec(u22, c2)
            assert pointwise_refines(u22, c1, c2, parse_pred("true")) == refines(e1, e2)


# ------------------------------------------------------- failure modes


def _toy():
    return parse_program(TOY)


def test_weakenassumpt_needs_entailment():
    prog = parse_program(TOY.replace("proc q = (X . <X < 2>);", "proc q = (X . {X < 2}, <X = 0>);"))
    (good,) = parse_derivation("derivation q; step weakenassumpt at [0] with B := X < 3;")
    assert replay(good, prog).ok
    (bad,) = parse_derivation("derivation q; step weakenassumpt at [0] with B := X < 1;")
    with pytest.raises(ObligationFailed):
        replay(bad, prog)
    rep = replay(bad, prog, strict=False)
    assert not rep.ok and rep.steps[-1].status == "failed"


def test_close_without_open():
    st = DerivationState(_toy(), "p")
    with pytest.raises(HypothesisMismatch):
        close_recursion(st)


def test_cyclic_variant_rejected():
    st = DerivationState(_toy(), "p")
    with pytest.raises(NotWellFounded):
        open_recursion(st, "r", ("X",), (("Y",), parse_pred("~(Y = X)")))


def test_duplicate_proc_id():
    st = DerivationState(_toy(), "p")
    with pytest.raises(DuplicateProc):
        open_recursion(st, "q", ("X",), (("Y",), parse_pred("Y < X")))


def test_use_hypothesis_outside_scope():
    st = DerivationState(_toy(), "p")
    with pytest.raises(HypothesisMismatch):
        use_hypothesis(st, ())


def test_missing_variant_fails_obligation():
    (s,) = parse_derivation("derivation q; recursion r variant (Y) < (X) : Y < X; step use-hypothesis at [];")
    with pytest.raises(ObligationFailed):
        replay(s, _toy())


def test_unknown_target():
    with pytest.raises(StepFailed):
        DerivationState(_toy(), "nope")


def test_bad_focus_path_reports_step():
    (s,) = parse_derivation("derivation q; step pandtosand at [4, 4];")
    rep = replay(s, _toy(), strict=False)
    assert rep.error is not None and rep.error.index == 1


def test_close_recursion_semantic_check():
    prog = parse_program("values int 0..3; var X, Y in 0..3; proc c = (X . <X >= 0>);")
    st = DerivationState(prog, "c")
    open_recursion(st, "cc", ("X",), (("Y",), parse_pred("Y < X")))
    st.current = Param(("X",), parse_command("<X = 0> \\/ <X > 0>, (exists Y . <Y = X - 1>, cc(Y))"))
    close_recursion(st)
    assert pexec(st.universe, st.current) == pexec(st.universe, prog.proc_map["c"])


# ------------------------------------------------------------ soundness


def _hyp_env(u, program, hyps):
    env = dict(load_program(program, u).env)
    for ident, spec in hyps.items():
        env[ident] = pexec(u, spec, env)
    return env


@pytest.mark.parametrize("which", ["factorial", "nqueens"])
def test_every_step_is_a_refinement(which, factorial_reports, nqueens_reports, factorial_program,
                                    nqueens_program):
    reports = factorial_reports if which == "factorial" else nqueens_reports
    original = factorial_program if which == "factorial" else nqueens_program
    u = build_universe(original.universe, original.preds)
    hyps = {"f": original.proc_map["f"]} if which == "factorial" else {"nq": original.proc_map["nqacc"]}
    for rep in reports:
        env = _hyp_env(u, rep.program, hyps)
        for s in rep.law_steps:
            assert pointwise_witness(u, s.before, s.after, None, env) is None, (rep.target, s.index)
        assert pointwise_witness(u, rep.initial, rep.final, None, env) is None


def test_hypothesis_variant_instances_decrease(factorial_reports):
    (rep,) = factorial_reports
    (hyp_step,) = [s for s in rep.steps if s.law == "use-hypothesis"]
    ((ob, d),) = hyp_step.obligations
    assert d.ok
    assert "U1 < U" in str(ob)


def test_list_helpers_round_trip():
    for xs in ([], [1], [1, 2, 3]):
        assert as_pylist(from_pylist(xs)) == xs
    assert np.array_equal(np.array(as_pylist(from_pylist([3, 1]))), np.array([3, 1]))
