"""Replay of derivation scripts.

A script names a procedure of a program and lists steps.  The replayer keeps
the current version of that procedure, applies each step (a catalogue law, a
recursion-protocol step, or one of the built-in steps), discharges every
obligation by enumeration and then re-checks the whole step semantically.  A
step counts as verified only when the rewrite, its obligations and the
semantic re-check all agree.

Paths index into the body of the target when the target is a parametrised
command ``(V . c)``, and from the node itself when it is a recursion block.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousMatch, DuplicateProc, HypothesisMismatch, MatchFailure, NotWellFounded,
    ObligationFailed, SemanticCheckFailed, SideConditionFailure, StepFailed, WsrefineError,
)
from .execution import Status, first_disagreement, from_spec
from .laws.catalogue import lookup
from .laws.matching import Application, apply_law, context_at
from .laws.obligations import (
    Discharge, Entails, SemanticRefines, WellFounded, conj, discharge_detail,
)
from .semantics import PredicateRelation, cexec, pexec, program_env
from .syntax.ast import (
    Assert, Call, Compare, Exists, ForallP, FunApp, Param, POr, PAnd, ProgramAst, RecBlock, SAnd,
    Spec, TruePred, UserPred, VarRef, cons_term, int_term, nil_term,
)
from .syntax.pretty import pretty_print
from .syntax.transforms import (
    alpha_equal, build_right, flatten, free_vars, normalize, replace_at, subst, subterm,
)
from .universe import Universe, build_universe
from .values import value_str

# ------------------------------------------------------ pointwise refinement


def pointwise_witness(u: Universe, before, after, ctx=None, env=None):
    """A binding where ``before`` is defined, ``ctx`` holds and ``after`` differs.

    Returns ``(binding, status_before, status_after)`` or None.  Parametrised
    commands are compared table against table over their formals.
    """
    env = env or {}
    if isinstance(before, (Param, RecBlock)) or isinstance(after, (Param, RecBlock)):
        p1, p2 = pexec(u, before, env), pexec(u, after, env)
        a, b = p1.table, p2.table
        bad = (a != 0) & (a != b)
        if not bad.any():
            return None
        pos = tuple(int(i) for i in np.argwhere(bad)[0])
        binding = {f: u.values[int(u.domains[f][p])] for f, p in zip(p1.formals, pos)}
        return binding, Status(int(a[pos])), Status(int(b[pos]))
    ctx = ctx if ctx is not None else TruePred()
    g = None if isinstance(ctx, TruePred) else from_spec(u, ctx)
    return first_disagreement(cexec(u, before, env), cexec(u, after, env), g)


def pointwise_refines(u: Universe, c1, c2, ctx=None, env=None) -> bool:
    """``ctx ⊨ c1 ⊑̇ c2``: wherever ``ctx`` holds and ``c1`` is defined, ``c2`` agrees."""
    return pointwise_witness(u, c1, c2, ctx, env) is None


def _witness_text(hit) -> str:
    binding, s1, s2 = hit
    where = ", ".join(f"{k}={value_str(v)}" for k, v in binding.items())
    return f"at {{{where}}}: {s1} before, {s2} after"


# ------------------------------------------------------------- records


@dataclass
class Hypothesis:
    """Induction hypothesis of an open recursion introduction."""

    proc_id: str
    formals: tuple
    variant: PredicateRelation
    spec_pattern: Param

    def variant_instance(self, actuals: dict):
        """The variant predicate with the smaller tuple replaced by actual argument terms."""
        rel = self.variant
        mapping = {s: actuals[l] for s, l in zip(rel.smaller, rel.larger)}
        return subst(rel.pred, mapping)


@dataclass
class StepRecord:
    index: int
    law: str
    path: tuple
    status: str
    before: object
    after: object
    obligations: list = field(default_factory=list)  # of (obligation, Discharge)
    detail: str = ""
    note: str = ""
    protocol: bool = False

    def machine_line(self) -> str:
        return f"step_{self.index} {self.law} {self.status}"

    def text(self) -> str:
        where = f" at [{', '.join(map(str, self.path))}]" if self.path else ""
        lines = [f"{self.index:3d}. {self.law}{where}: {self.status}"
                 + (f" ({self.detail})" if self.detail else "")]
        for ob, d in self.obligations:
            mark = "ok" if d.ok else f"FAILED {d.detail}"
            lines.append(f"       obligation {ob}: {mark}")
        return "\n".join(lines)


@dataclass
class DerivationReport:
    target: str
    steps: list
    initial: object
    final: object
    program: ProgramAst
    expected: Optional[object] = None
    expected_ok: Optional[bool] = None
    end_to_end: Optional[bool] = None
    error: Optional[WsrefineError] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.expected_ok is not False and self.end_to_end is not False

    @property
    def law_steps(self) -> list:
        return [s for s in self.steps if not s.protocol]

    @property
    def verified_steps(self) -> int:
        return sum(1 for s in self.law_steps if s.status == "verified")

    def machine_lines(self) -> list:
        out = [s.machine_line() for s in self.steps]
        if self.expected is not None:
            out.append(f"expect {'match' if self.expected_ok else 'mismatch'}")
        out.append(f"result {'OK' if self.ok else 'FAIL'}")
        return out

    def text(self) -> str:
        lines = [f"derivation {self.target}"]
        lines += [s.text() for s in self.steps]
        if self.error is not None:
            lines.append(f"error: {self.error}")
        if self.expected is not None:
            lines.append("final program matches the expected result" if self.expected_ok
                         else "final program differs from the expected result")
        if self.end_to_end is not None:
            lines.append("end-to-end refinement holds" if self.end_to_end
                         else "end-to-end refinement FAILS")
        nproto = len(self.steps) - len(self.law_steps)
        lines.append(f"{self.verified_steps} verified steps ({nproto} protocol steps); "
                     f"{'OK' if self.ok else 'FAIL'}")
        lines.append(f"result: {pretty_print(self.final)}")
        return "\n".join(lines)

    def explain(self, i: int) -> str:
        for s in self.steps:
            if s.index == i:
                return (f"step {i}: {s.law}\n"
                        f"before:\n  {pretty_print(s.before)}\nafter:\n  {pretty_print(s.after)}")
        raise IndexError(f"no step {i}; the script has {len(self.steps)} steps")


# ------------------------------------------------------------- state


class DerivationState:
    """The program being refined, the focus, open hypotheses and the trace."""

    def __init__(self, program: ProgramAst, target: str, universe: Optional[Universe] = None):
        if target not in program.proc_map:
            raise StepFailed(0, f"derivation target {target} is not a procedure of the program")
        self.program = program
        self.target = target
        self.universe = universe or build_universe(program.universe, program.preds)
        self.original = program.proc_map[target]
        self.current = self.original
        self.focus_stack: list = []
        self.hypotheses: list = []
        self.trace: list = []
        self.base_env = program_env(self.universe, ProgramAst(
            program.universe, tuple((n, pc) for n, pc in program.procs if n != target),
            (), program.modes, program.preds))
        self._self_env = None

    # -- navigation --------------------------------------------------
    @property
    def root(self):
        return self.current.body if isinstance(self.current, Param) else self.current

    def with_root(self, node):
        if isinstance(self.current, Param):
            return Param(self.current.formals, node)
        return node

    @property
    def focus(self) -> tuple:
        return self.focus_stack[-1] if self.focus_stack else ()

    def absolute(self, path) -> tuple:
        full = self.focus + tuple(path)
        try:
            subterm(self.root, full)
        except (IndexError, TypeError):
            raise MatchFailure(f"path [{', '.join(map(str, full))}] does not exist") from None
        return full

    # -- environments --------------------------------------------------
    @property
    def env(self) -> dict:
        env = dict(self.base_env)
        for h in self.hypotheses:
            # the weakest procedure meeting the hypothesis is the hypothesis pattern itself
            env[h.proc_id] = pexec(self.universe, h.spec_pattern, self.base_env)
        if isinstance(self.current, RecBlock):
            if self._self_env is None or self._self_env[0] is not self.current:
                self._self_env = (self.current, pexec(self.universe, self.current, self.base_env))
            env[self.current.ident] = self._self_env[1]
        return env

    def context(self, path) -> list:
        return context_at(self.root, path)

    def add_proc(self, name: str, pc):
        if name in self.program.proc_map or name == self.target:
            raise DuplicateProc(f"procedure {name} already exists")
        self.program = self.program.with_proc(name, pc)
        self.base_env = dict(self.base_env)
        self.base_env[name] = pexec(self.universe, pc, self.base_env)

    # -- whole-step semantic check --------------------------------------
    def step_witness(self, before, after):
        """Re-check ``before ⊑ after`` from scratch, returning a witness on failure."""
        u = self.universe
        if isinstance(before, Param) and isinstance(after, Param) and before.formals == after.formals:
            return pointwise_witness(u, before.body, after.body, None, self.env)
        return pointwise_witness(u, before, after, None, self.base_env)


# ------------------------------------------------------ recursion protocol


def open_recursion(state: DerivationState, proc_id: str, formal: tuple, variant) -> DerivationState:
    """Start a recursion introduction over the current parametrised command.

    ``variant`` is either a ``PredicateRelation`` or a tuple ``(smaller, pred)``
    whose larger side is ``formal``.
    """
    if not isinstance(state.current, Param):
        raise HypothesisMismatch("recursion can only be introduced on a parametrised command (V . c)")
    if any(h.proc_id == proc_id for h in state.hypotheses) or (
            proc_id in state.program.proc_map and proc_id != state.target):
        raise DuplicateProc(f"{proc_id} is already in use")
    if not isinstance(variant, PredicateRelation):
        smaller, pred = variant
        variant = PredicateRelation(state.universe, tuple(smaller), tuple(formal), pred)
    stray = set(variant.larger) - set(state.current.formals)
    if stray:
        raise HypothesisMismatch(f"variant mentions {', '.join(sorted(stray))}, which are not formals")
    if not variant.wellfounded():
        raise NotWellFounded(f"{variant.name} has a descending cycle over the formal domain")
    state.hypotheses.append(Hypothesis(proc_id, state.current.formals, variant, state.current))
    return state


def close_recursion(state: DerivationState) -> DerivationState:
    """Wrap the refined body into a recursion block and check it against the original procedure."""
    if not state.hypotheses:
        raise HypothesisMismatch("close without an open recursion introduction")
    h = state.hypotheses.pop()
    block = RecBlock(h.proc_id, Param(h.formals, state.current.body))
    spec = pexec(state.universe, h.spec_pattern, state.base_env)
    got = pexec(state.universe, block, state.base_env)
    if not spec.refines(got):
        bad = (spec.table != 0) & (spec.table != got.table)
        pos = tuple(int(i) for i in np.argwhere(bad)[0])
        u = state.universe
        where = ", ".join(f"{f}={value_str(u.values[int(u.domains[f][p])])}" for f, p in zip(h.formals, pos))
        state.hypotheses.append(h)
        raise SemanticCheckFailed(f"original procedure does not refine the recursion block at {where}: "
                                  f"{Status(int(spec.table[pos]))} vs {Status(int(got.table[pos]))}")
    state.current = block
    state.focus_stack = []
    return state


def _term_match(p, n, formals: set, b: dict) -> bool:
    """Match ``p`` against ``n`` with the names in ``formals`` acting as term variables."""
    if isinstance(p, VarRef) and p.name in formals:
        if not isinstance(n, (VarRef, FunApp)):
            return False
        if p.name in b:
            return b[p.name] == n
        b[p.name] = n
        return True
    if type(p) is not type(n):
        return False
    if dataclasses.is_dataclass(p):
        return all(_term_match(getattr(p, f.name), getattr(n, f.name), formals, b)
                   for f in dataclasses.fields(p) if f.compare)
    if isinstance(p, tuple):
        return len(p) == len(n) and all(_term_match(x, y, formals, b) for x, y in zip(p, n))
    return p == n


def match_hypothesis(h: Hypothesis, items: list):
    """Find the hypothesis pattern at the start of a sequential chain.

    Returns ``(actuals, consumed)`` where ``consumed`` counts chain items
    covered, including a leading variant assumption when present.
    """
    pattern = flatten(normalize(h.spec_pattern.body), SAnd)
    formals = set(h.formals)
    for skip in (1, 0):
        if skip and not (items and isinstance(items[0], Assert)):
            continue
        window = items[skip:skip + len(pattern)]
        if len(window) < len(pattern):
            continue
        b: dict = {}
        if not all(_term_match(p, n, formals, b) for p, n in zip(pattern, window)):
            continue
        if set(b) != formals:
            missing = ", ".join(sorted(formals - set(b)))
            raise HypothesisMismatch(f"formals {missing} are not determined by the focused command")
        inst = subst(h.spec_pattern.body, b)
        if not alpha_equal(normalize(inst), normalize(build_right(window, SAnd))):
            continue
        if skip and not alpha_equal(normalize(items[0].pred), normalize(h.variant_instance(b))):
            continue
        return b, skip + len(pattern)
    raise HypothesisMismatch(
        f"focused command is not an instance of {pretty_print(h.spec_pattern)} "
        f"(optionally preceded by the variant assumption)")


def use_hypothesis(state: DerivationState, focus_path=()):
    """Replace an instance of the hypothesis pattern by a recursive call.

    Returns the state and the list of obligations raised (already discharged
    or failing, as pairs).
    """
    if not state.hypotheses:
        raise HypothesisMismatch("use-hypothesis outside an open recursion introduction")
    h = state.hypotheses[-1]
    path = state.absolute(focus_path)
    node = subterm(state.root, path)
    items = flatten(node, SAnd)
    actuals, used = match_hypothesis(h, items)
    call = Call(h.proc_id, tuple(actuals[f] for f in h.formals))
    new = build_right([call] + items[used:], SAnd)
    ctx = conj(state.context(path))
    ob = Entails(ctx, TruePred(), h.variant_instance(actuals))
    d = discharge_detail(ob, state.universe, state.env)
    return normalize(replace_at(state.root, path, new)), [(ob, d)]


# ------------------------------------------------- list-property builtins


def _replace_term(node, old, new):
    if node == old:
        return new
    if isinstance(node, tuple):
        return tuple(_replace_term(x, old, new) for x in node)
    if dataclasses.is_dataclass(node):
        changes = {f.name: _replace_term(getattr(node, f.name), old, new)
                   for f in dataclasses.fields(node) if f.compare}
        return dataclasses.replace(node, **changes)
    return node


def _vars_in_order(node, out: list) -> list:
    if isinstance(node, VarRef):
        if node.name not in out:
            out.append(node.name)
    elif isinstance(node, tuple):
        for x in node:
            _vars_in_order(x, out)
    elif dataclasses.is_dataclass(node):
        for f in dataclasses.fields(node):
            if f.compare:
                _vars_in_order(getattr(node, f.name), out)
    return out


def property_over_list(node, params: dict, indexed: bool):
    """Instantiate the list-property law at ``node``.

    Returns ``(call, proc_name, block)``: the call replacing ``node`` and the
    recursion block defining the new procedure.
    """
    shape = "<list(L)> /\\ <forall I in 1..len(L) . prop>"
    if not (isinstance(node, PAnd) and isinstance(node.left, Spec) and isinstance(node.right, Spec)):
        raise MatchFailure(f"expected a command of the form {shape}")
    lp, fp = node.left.pred, node.right.pred
    if not (isinstance(lp, UserPred) and lp.name == "list" and len(lp.args) == 1
            and isinstance(lp.args[0], VarRef)):
        raise MatchFailure(f"left operand must be <list(L)> for a variable L ({shape})")
    lst = lp.args[0]
    if not (isinstance(fp, ForallP) and fp.lo == int_term(1) and fp.hi == FunApp("len", (lst,))):
        raise MatchFailure(f"right operand must quantify over 1..len({lst.name}) ({shape})")
    i = fp.var
    if params.get("index", i) != i:
        raise MatchFailure(f"the quantifier binds {i}, not {params['index']}")
    if "proc" not in params:
        raise MatchFailure("supply the new procedure name with 'with proc := name'")
    proc = params["proc"]
    rec = params.get("rec", proc)
    head, tail, counter = params.get("head", "H"), params.get("tail", "T"), params.get("counter", "J")
    prop = _replace_term(fp.body, FunApp("nth", (lst, VarRef(i))), VarRef(head))
    if indexed:
        prop = subst(prop, {i: VarRef(counter)})
    elif i in free_vars(prop):
        raise MatchFailure(f"{i} occurs outside {lst.name}({i}); use propertyoverlistindexed")
    if lst.name in free_vars(prop):
        raise MatchFailure(f"the property mentions the list {lst.name} itself")
    fixed = {head, counter} if indexed else {head}
    others = [v for v in _vars_in_order(prop, []) if v in free_vars(prop) and v not in fixed]
    clash = {head, tail} | ({counter} if indexed else set())
    if clash & (set(others) | {lst.name}) or len(clash) < (3 if indexed else 2):
        raise MatchFailure(f"head/tail/counter names {sorted(clash)} clash with the property's variables")
    formals = tuple(others) + (lst.name,) + ((counter,) if indexed else ())
    rec_args = tuple(VarRef(v) for v in others) + (VarRef(tail),)
    if indexed:
        rec_args += (FunApp("+", (VarRef(counter), int_term(1))),)
    step = SAnd(Spec(Compare("=", lst, cons_term(VarRef(head), VarRef(tail)))),
                SAnd(Spec(prop), Call(rec, rec_args)))
    body = POr(Spec(Compare("=", lst, nil_term())), Exists(head, Exists(tail, step)))
    block = RecBlock(rec, Param(formals, body))
    call_args = tuple(VarRef(v) for v in others) + (lst,) + ((int_term(1),) if indexed else ())
    return Call(proc, call_args), proc, block


# ---------------------------------------------------------------- replay


def _discharge_all(state: DerivationState, index: int, obligations: list) -> list:
    out = []
    for ob in obligations:
        d = discharge_detail(ob, state.universe, state.env)
        out.append((ob, d))
        if not d.ok:
            raise ObligationFailed(index, f"{ob} ({d.detail})")
    return out


class _Replayer:
    def __init__(self, script, program: ProgramAst, universe: Optional[Universe]):
        self.script = script
        self.state = DerivationState(program, script.target, universe)

    def run(self, strict: bool) -> DerivationReport:
        st = self.state
        error = None
        for i, step in enumerate(self.script.steps, start=1):
            before = st.current
            try:
                rec = self._step(i, step)
            except StepFailed as exc:
                error = exc
            except WsrefineError as exc:
                error = StepFailed(i, str(exc))
            if error is not None:
                st.trace.append(StepRecord(i, step.law, step.focus_path, "failed", before, st.current,
                                           getattr(error, "_obs", []), error.reason, step.note,
                                           step.law in ("rec-intro", "close-rec", "focus", "unfocus")))
                break
            st.trace.append(rec)
        report = DerivationReport(st.target, st.trace, st.original, st.current, self._program(),
                                  self.script.expected_result, error=error)
        if error is None:
            if report.expected is not None:
                report.expected_ok = alpha_equal(normalize(report.expected), normalize(st.current))
            hit = st.step_witness(st.original, st.current)
            report.end_to_end = hit is None
        if strict and error is not None:
            raise error
        return report

    def _program(self) -> ProgramAst:
        st = self.state
        return st.program.with_proc(st.target, st.current)

    def _step(self, i: int, step) -> StepRecord:
        st = self.state
        law = step.law
        params = dict(step.params)
        before = st.current
        if law == "rec-intro":
            open_recursion(st, params["ident"], params["formals"], (params["smaller"], params["variant"]))
            ob = WellFounded(st.hypotheses[-1].variant)
            return StepRecord(i, law, (), "verified", before, st.current, [(ob, Discharge(True))],
                              f"hypothesis {params['ident']} registered", step.note, True)
        if law == "close-rec":
            spec = st.hypotheses[-1].spec_pattern if st.hypotheses else None
            close_recursion(st)
            ob = SemanticRefines(spec, st.current, TruePred())
            return StepRecord(i, law, (), "verified", before, st.current, [(ob, Discharge(True))],
                              "original procedure refined by the recursion block", step.note, True)
        if law == "focus":
            st.focus_stack.append(st.absolute(step.focus_path))
            return StepRecord(i, law, step.focus_path, "verified", before, before, protocol=True)
        if law == "unfocus":
            if not st.focus_stack:
                raise StepFailed(i, "unfocus without focus")
            st.focus_stack.pop()
            return StepRecord(i, law, (), "verified", before, before, protocol=True)
        if law == "use-hypothesis":
            new_root, obs = use_hypothesis(st, step.focus_path)
            for ob, d in obs:
                if not d.ok:
                    raise ObligationFailed(i, f"{ob} ({d.detail})")
            detail = ""
        elif law == "semantic-check":
            if "by" not in params:
                raise StepFailed(i, "semantic-check needs 'with by := command'")
            path = st.absolute(step.focus_path)
            node = subterm(st.root, path)
            ob = SemanticRefines(node, params["by"], conj(st.context(path)))
            obs = _discharge_all(st, i, [ob])
            new_root = normalize(replace_at(st.root, path, params["by"]))
            detail = ""
        elif law in ("propertyoverlist", "propertyoverlistindexed"):
            path = st.absolute(step.focus_path)
            node = subterm(st.root, path)
            call, proc, block = property_over_list(node, params, law.endswith("indexed"))
            st.add_proc(proc, block)
            ob = SemanticRefines(node, call, conj(st.context(path)))
            obs = _discharge_all(st, i, [ob])
            new_root = normalize(replace_at(st.root, path, call))
            detail = f"new procedure {proc} = {pretty_print(block)}"
        elif law == "recursionintro":
            raise StepFailed(i, "introduce recursion with the 'recursion ID variant ...' directive")
        else:
            app = self._apply(i, step, params)
            obs = _discharge_all(st, i, app.obligations)
            new_root = app.program
            detail = app.describe() + (f" x{app.count}" if app.count > 1 else "")
        after = st.with_root(new_root)
        hit = st.step_witness(before, after)
        if hit is not None:
            raise StepFailed(i, f"semantic re-check disagrees with the law engine {_witness_text(hit)}")
        st.current = after
        return StepRecord(i, law, step.focus_path, "verified", before, after, obs, detail, step.note)

    def _apply(self, i: int, step, params: dict) -> Application:
        st = self.state
        law = lookup(step.law)
        path = st.absolute(step.focus_path)
        try:
            return apply_law(law, st.root, path, params, [], step.direction, step.repeat)
        except (MatchFailure, SideConditionFailure, AmbiguousMatch) as exc:
            raise StepFailed(i, str(exc)) from None


def replay(script, program: ProgramAst, *, universe: Optional[Universe] = None,
           strict: bool = True) -> DerivationReport:
    """Replay ``script`` against ``program``.

    With ``strict`` the first failing step raises ``StepFailed`` (or its
    subclass ``ObligationFailed``); otherwise the failure is recorded in the
    returned report.
    """
    return _Replayer(script, program, universe).run(strict)


def replay_all(scripts, program: ProgramAst, *, strict: bool = True) -> list:
    """Replay several scripts in order, each one starting from the previous result."""
    reports = []
    universe = build_universe(program.universe, program.preds)
    for s in scripts:
        rep = replay(s, program, universe=universe, strict=strict)
        reports.append(rep)
        if not rep.ok:
            break
        program = rep.program
    return reports
