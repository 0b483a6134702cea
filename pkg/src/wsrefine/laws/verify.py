"""Meta-verifier: hunt for counterexamples to the catalogued laws.

Metavariables are instantiated from pools of generated commands and
predicates over a small uniform universe.  Pool members are kept as status
vectors over every binding, so a law pattern is evaluated for a whole batch
of instantiations at once with the same kernels that ``cexec`` uses.  Each
pool is deduplicated semantically: two generated terms with the same vector
and the same free variables are interchangeable for every law, so only the
smallest is kept.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .. import kernels as K
from ..syntax.ast import (
    And, Assert, Compare, Exists, ExistsP, FalsePred, Forall, ForallP, FunApp, Iff, Implies,
    MetaCmd, MetaPred, Not, Or, PAnd, POr, SAnd, Spec, TruePred, VarRef, int_term,
)
from ..syntax.pretty import pretty_print
from ..syntax.transforms import free_vars
from ..universe import small_universe
from .catalogue import CONTEXT_META, EQUIVALENT, Law, catalogue
from .matching import instantiate

__all__ = [
    "VerifyConfig", "Pools", "build_pools", "Counterexample", "LawResult", "VerifyReport",
    "verify_law", "check_law", "verify_all",
]


@dataclass(frozen=True)
class VerifyConfig:
    nvars: int = 3
    nvals: int = 2
    depth: int = 2
    seed: int = 0
    exhaustive_limit: int = 1_000_000
    samples: int = 100_000
    block: int = 512
    cross_check: int = 12

    def __post_init__(self):
        if self.nvars < 1 or self.nvals < 1 or self.depth < 1:
            raise ValueError("nvars, nvals and depth must be positive")
        if self.samples < 1 or self.exhaustive_limit < 1:
            raise ValueError("sample and enumeration budgets must be positive")


# ------------------------------------------------------------------ pools


def ast_size(n) -> int:
    if isinstance(n, (VarRef, TruePred, FalsePred, MetaCmd, MetaPred)):
        return 1
    if isinstance(n, FunApp):
        return 1 + sum(ast_size(a) for a in n.args)
    if isinstance(n, Compare):
        return 1 + ast_size(n.lhs) + ast_size(n.rhs)
    if isinstance(n, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
        return 1 + ast_size(n.left) + ast_size(n.right)
    if isinstance(n, (Not, Exists, Forall, ExistsP, ForallP)):
        return 1 + ast_size(n.body)
    if isinstance(n, (Spec, Assert)):
        return 1 + ast_size(n.pred)
    return 1


@dataclass
class Pool:
    kind: str
    asts: list
    vecs: np.ndarray  # (P, nbindings) int8
    masks: np.ndarray  # (P,) free-variable bit masks

    def __len__(self) -> int:
        return len(self.asts)


class _Builder:
    def __init__(self, universe, kind: str, evaluate):
        self.u = universe
        self.kind = kind
        self.evaluate = evaluate
        self.seen: dict = {}
        self.items: list = []

    def mask(self, node) -> int:
        names = self.u.var_names
        fv = free_vars(node)
        return sum(1 << i for i, n in enumerate(names) if n in fv)

    def add(self, node) -> bool:
        vec = self.evaluate(node)
        key = (vec.tobytes(), self.mask(node))
        if key in self.seen:
            return False
        self.seen[key] = len(self.items)
        self.items.append((node, vec, key[1]))
        return True

    def pool(self) -> Pool:
        order = sorted(range(len(self.items)), key=lambda i: (ast_size(self.items[i][0]), i))
        items = [self.items[i] for i in order]
        return Pool(self.kind, [x[0] for x in items],
                    np.array([x[1] for x in items], dtype=np.int8).reshape(len(items), -1),
                    np.array([x[2] for x in items], dtype=np.int64))


def atomic_preds(names, nvals: int) -> list:
    out = [TruePred(), FalsePred()]
    for v in names:
        for k in range(nvals):
            out.append(Compare("=", VarRef(v), int_term(k)))
    for v, w in itertools.permutations(names, 2):
        if v < w:
            out.append(Compare("=", VarRef(v), VarRef(w)))
        out.append(Compare("<", VarRef(v), VarRef(w)))
        # partial atoms: undefined where the arithmetic leaves the value set
        out.append(Compare("=", VarRef(v), FunApp("-", (VarRef(w), int_term(1)))))
        out.append(Compare("=", VarRef(v), FunApp("/", (int_term(1), VarRef(w)))))
    return out


@dataclass
class Pools:
    universe: object
    cmd: Pool
    pred: Pool
    atoms: list

    @property
    def nb(self) -> int:
        return self.cmd.vecs.shape[1]


@lru_cache(maxsize=8)
def build_pools(nvars: int, nvals: int, depth: int) -> Pools:
    """Pools of semantically distinct predicates and commands."""
    from ..semantics import cexec

    u = small_universe(nvars, nvals)
    names = u.var_names

    def pvec(p):
        return u.expand(u.pred_factor(p), names).reshape(-1).astype(np.int8)

    def cvec(c):
        return cexec(u, c).full().reshape(-1).astype(np.int8)

    atoms = []
    pb = _Builder(u, "pred", pvec)
    for a in atomic_preds(names, nvals):
        if pb.add(a):
            atoms.append(a)
    for a in atoms:
        pb.add(Not(a))
    for a, b in itertools.permutations(atoms, 2):
        for op in (And, Or, Implies, Iff):
            pb.add(op(a, b))
    for v in names:
        for a in atoms:
            if v in free_vars(a):
                pb.add(ExistsP(v, a))
                pb.add(ForallP(v, a))

    cb = _Builder(u, "cmd", cvec)
    level = []
    for a in atoms:
        for ctor in (Spec, Assert):
            if cb.add(ctor(a)):
                level.append(cb.items[-1][0])
    base = list(level)
    for _ in range(depth - 1):
        new = []
        for x in level:
            for y in base:
                for op in (POr, PAnd, SAnd):
                    for node in (op(x, y), op(y, x)):
                        if cb.add(node):
                            new.append(node)
            for v in names:
                if v in free_vars(x):
                    for q in (Exists, Forall):
                        if cb.add(q(v, x)):
                            new.append(cb.items[-1][0])
        level = new
    return Pools(u, cb.pool(), pb.pool(), atoms)


# ----------------------------------------------------------- batch engine


class _Engine:
    """Evaluates law patterns over batches of status vectors."""

    def __init__(self, nvars: int, nvals: int):
        self.ushape = (nvals,) * nvars
        self.nb = nvals ** nvars

    def quant(self, a, k: int, reducer):
        lead = a.shape[:-1]
        r = a.reshape(lead + self.ushape)
        ax = len(lead) + k
        red = np.expand_dims(reducer(np.ascontiguousarray(r), ax), ax)
        return np.ascontiguousarray(np.broadcast_to(red, lead + self.ushape)).reshape(lead + (self.nb,))

    def ev(self, n, env: dict, varmap: dict):
        if isinstance(n, (MetaCmd, MetaPred)):
            return env[n.name]
        if isinstance(n, TruePred):
            return np.full(self.nb, 2, dtype=np.int8)
        if isinstance(n, FalsePred):
            return np.full(self.nb, 1, dtype=np.int8)
        if isinstance(n, Spec):
            return self.ev(n.pred, env, varmap)
        if isinstance(n, Assert):
            return K.k_assert(self.ev(n.pred, env, varmap))
        if isinstance(n, (PAnd, And)):
            return K.k_and(self.ev(n.left, env, varmap), self.ev(n.right, env, varmap))
        if isinstance(n, (POr, Or)):
            return K.k_or(self.ev(n.left, env, varmap), self.ev(n.right, env, varmap))
        if isinstance(n, SAnd):
            return K.k_seq(self.ev(n.left, env, varmap), self.ev(n.right, env, varmap))
        if isinstance(n, Implies):
            return K.k_implies(self.ev(n.left, env, varmap), self.ev(n.right, env, varmap))
        if isinstance(n, Iff):
            return K.k_iff(self.ev(n.left, env, varmap), self.ev(n.right, env, varmap))
        if isinstance(n, Not):
            return K.k_not(self.ev(n.body, env, varmap))
        if isinstance(n, (Exists, ExistsP)):
            return self.quant(self.ev(n.body, env, varmap), varmap[n.var], K.k_reduce_exists)
        if isinstance(n, (Forall, ForallP)):
            return self.quant(self.ev(n.body, env, varmap), varmap[n.var], K.k_reduce_forall)
        raise TypeError(f"pattern node {type(n).__name__} is not supported by the verifier")


def _holds(kind: str, left, right, ctx) -> np.ndarray:
    """Per-instance truth of a premise or conclusion (reduces the binding axis)."""
    outside = ctx != 2
    if kind == "entails":
        ok = outside | (left != 2) | (right == 2)
    elif kind == "pequiv" or kind == "equivalent":
        ok = outside | (left == right)
    elif kind == "refines":
        ok = outside | (left == 0) | (left == right)
    else:  # pragma: no cover
        raise ValueError(kind)
    return np.all(ok, axis=-1)


# ----------------------------------------------------------------- results


@dataclass
class Counterexample:
    law: str
    assignment: dict  # meta -> pretty text
    binding: dict  # var -> value where the claim fails
    lhs_status: int
    rhs_status: int

    def __str__(self) -> str:
        meta = ", ".join(f"{k} := {v}" for k, v in self.assignment.items())
        where = ", ".join(f"{k}={v}" for k, v in self.binding.items())
        names = ("Undefined", "Fail", "Succeed")
        return (f"{self.law}: {meta} at {{{where}}}: lhs {names[self.lhs_status]}, "
                f"rhs {names[self.rhs_status]}")

    def to_json(self) -> str:
        return json.dumps({"assignment": self.assignment, "binding": self.binding,
                           "lhs": self.lhs_status, "rhs": self.rhs_status}, sort_keys=True,
                          separators=(",", ":"))


@dataclass
class LawResult:
    law: str
    status: str  # pass | fail | error
    instances: int = 0
    enumerated: int = 0
    mode: str = "exhaustive"
    counterexample: Optional[Counterexample] = None
    detail: str = ""
    seconds: float = 0.0

    def machine_line(self) -> str:
        cex = self.counterexample.to_json() if self.counterexample else "-"
        return f"{self.law} {self.status} {self.instances} {cex}"


@dataclass
class VerifyReport:
    config: VerifyConfig
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def failing(self) -> list:
        return [r for r in self.results if r.status != "pass"]

    def machine_lines(self) -> list:
        return [r.machine_line() for r in self.results]

    def table(self) -> str:
        w = max([len(r.law) for r in self.results] + [4])
        lines = [f"{'law':<{w}}  {'status':<6}  {'mode':<10}  {'instances':>10}  {'enumerated':>10}"]
        for r in self.results:
            lines.append(f"{r.law:<{w}}  {r.status:<6}  {r.mode:<10}  {r.instances:>10}  {r.enumerated:>10}")
            if r.counterexample is not None:
                lines.append(f"    counterexample: {r.counterexample}")
            elif r.detail and r.status != "pass":
                lines.append(f"    {r.detail}")
        passed = sum(r.status == "pass" for r in self.results)
        lines.append(f"{passed}/{len(self.results)} laws pass "
                     f"(|Var|={self.config.nvars}, |Val|={self.config.nvals}, depth {self.config.depth})")
        return "\n".join(lines)


# ------------------------------------------------------------- law checking


class _LawChecker:
    def __init__(self, law: Law, cfg: VerifyConfig, pools: Pools):
        self.law = law
        self.cfg = cfg
        self.pools = pools
        self.engine = _Engine(cfg.nvars, cfg.nvals)
        metas = law.metas()
        order = []
        if law.contextual:
            order.append((CONTEXT_META, "pred"))
        seen = {CONTEXT_META}
        # premise metavariables first, so chained premises condition one another
        for node in [x for p in law.premises for x in (p.ctx, p.left, p.right)] + [law.lhs, law.rhs]:
            if node is None:
                continue
            for name in _appearance(node):
                if name in seen:
                    continue
                seen.add(name)
                if name in metas["cmd"]:
                    order.append((name, "cmd"))
                elif name in metas["pred"]:
                    order.append((name, "pred"))
        self.order = order
        self.var_metas = list(metas["var"])
        self.kind = dict(order)
        # each premise is conditioned on the last metavariable it mentions
        self.cond: dict = {}
        for pr in law.premises:
            used = set()
            for x in (pr.left, pr.right, pr.ctx):
                if x is not None:
                    used |= set(_appearance(x))
            used &= set(self.kind)
            if law.contextual:
                used.add(CONTEXT_META)
            if not used:
                continue
            last = max(used, key=lambda m: [o[0] for o in order].index(m))
            self.cond.setdefault(last, []).append(pr)

    def pool(self, meta: str) -> Pool:
        return self.pools.cmd if self.kind[meta] == "cmd" else self.pools.pred

    # --- evaluation over batches -------------------------------------
    def _ctx(self, pr, env, varmap):
        ctx = env[CONTEXT_META] if self.law.contextual else np.full(self.engine.nb, 2, np.int8)
        if pr is not None and pr.ctx is not None:
            ctx = K.k_and(ctx, self.engine.ev(pr.ctx, env, varmap))
        return ctx

    def premise(self, pr, env, varmap):
        e = self.engine
        left = e.ev(pr.left, env, varmap)
        right = e.ev(pr.right, env, varmap)
        ctx = self._ctx(pr, env, varmap)
        ok = _holds(pr.kind, left, right, ctx)
        if pr.kind == "equivalent":
            ok = ok & _holds("equivalent", right, left, ctx)
        return ok

    def premises_ok(self, env, varmap, shape):
        ok = np.ones(shape, dtype=bool)
        for pr in self.law.premises:
            ok &= self.premise(pr, env, varmap)
        return ok

    def conclusion(self, env, varmap):
        e = self.engine
        lhs = e.ev(self.law.lhs, env, varmap)
        rhs = e.ev(self.law.rhs, env, varmap)
        ctx = self._ctx(None, env, varmap)
        kind = "equivalent" if self.law.relation == EQUIVALENT else "refines"
        return _holds(kind, lhs, rhs, ctx), lhs, rhs, ctx

    def env_for(self, idx: dict) -> dict:
        return {m: self.pool(m).vecs[i] for m, i in idx.items()}

    # --- enumeration -----------------------------------------------------
    def choices(self, varmap) -> dict:
        out = {}
        for m, _ in self.order:
            c = np.arange(len(self.pool(m)))
            for kind, var_meta, cmd_meta in self.law.side:
                if kind == "notfree" and cmd_meta == m:
                    bit = 1 << varmap[var_meta]
                    c = c[(self.pool(m).masks[c] & bit) == 0]
            out[m] = c
        return out

    def varmaps(self):
        for combo in itertools.product(range(self.cfg.nvars), repeat=len(self.var_metas)):
            yield dict(zip(self.var_metas, combo))

    def run(self) -> LawResult:
        start = time.perf_counter()
        varmaps = list(self.varmaps())
        chs = [self.choices(vm) for vm in varmaps]
        total = sum(math.prod(len(ch[m]) for m, _ in self.order) for ch in chs)
        res = LawResult(self.law.name, "pass")
        exhaustive = total <= self.cfg.exhaustive_limit
        res.mode = "exhaustive" if exhaustive else "sampled"
        rng = np.random.default_rng(self.cfg.seed)
        checked = []
        for vm, ch in zip(varmaps, chs):
            if exhaustive:
                found = self._exhaustive(vm, ch, res, checked)
            else:
                per = -(-self.cfg.samples // len(varmaps))
                found = self._sampled(vm, ch, res, checked, per, rng)
            if found is not None:
                res.status = "fail"
                res.counterexample = self._report(*self._shrink(found, vm, ch), vm)
                break
        if res.status == "pass":
            err = self._cross_check(checked, rng)
            if err:
                res.status = "error"
                res.detail = err
        res.seconds = time.perf_counter() - start
        return res

    def _judge(self, idx: dict, vm, res, checked, alive=None):
        env = self.env_for(idx)
        n = len(next(iter(idx.values()))) if idx else 1
        ok = self.premises_ok(env, vm, (n,))
        if alive is not None:
            ok &= alive
        concl, *_ = self.conclusion(env, vm)
        concl = np.broadcast_to(concl, (n,))
        res.enumerated += n
        res.instances += int(ok.sum())
        hits = np.nonzero(ok)[0]
        if hits.size and len(checked) < 64:
            pick = hits[:: max(1, hits.size // 4)][:4]
            checked.extend(({m: int(i[j]) for m, i in idx.items()}, vm) for j in pick)
        bad = np.nonzero(ok & ~concl)[0]
        if bad.size:
            j = bad[0]
            return {m: int(i[j]) for m, i in idx.items()}
        return None

    def _exhaustive(self, vm, ch, res, checked):
        names = [m for m, _ in self.order]
        sizes = [len(ch[m]) for m in names]
        total = math.prod(sizes)
        step = 65536
        for s in range(0, total, step):
            flat = np.arange(s, min(total, s + step))
            parts = np.unravel_index(flat, sizes)
            idx = {m: ch[m][p] for m, p in zip(names, parts)}
            found = self._judge(idx, vm, res, checked)
            if found is not None:
                return found
        return None

    def _sampled(self, vm, ch, res, checked, count, rng):
        b = self.cfg.block
        done = 0
        while done < count:
            n = min(b, count - done)
            idx, alive = self._draw(vm, ch, n, rng)
            found = self._judge(idx, vm, res, checked, alive)
            if found is not None:
                return found
            done += n
        return None

    def _draw(self, vm, ch, n, rng):
        idx: dict = {}
        alive = np.ones(n, dtype=bool)
        for m, _ in self.order:
            cands = ch[m]
            prems = self.cond.get(m)
            if not prems:
                idx[m] = cands[rng.integers(len(cands), size=n)]
                continue
            mask = np.ones((n, len(cands)), dtype=bool)
            env = {k: self.pool(k).vecs[v][:, None, :] for k, v in idx.items()}
            env[m] = self.pool(m).vecs[cands][None, :, :]
            for pr in prems:
                mask &= self.premise(pr, env, vm)
            keys = rng.random((n, len(cands)))
            keys[~mask] = -1.0
            j = keys.argmax(axis=1)
            alive &= mask[np.arange(n), j]
            idx[m] = cands[j]
        return idx, alive

    # --- counterexamples ---------------------------------------------------
    def _fails(self, idx: dict, vm) -> np.ndarray:
        env = self.env_for(idx)
        n = len(next(iter(idx.values())))
        ok = self.premises_ok(env, vm, (n,))
        concl, *_ = self.conclusion(env, vm)
        return ok & ~np.broadcast_to(concl, (n,))

    def _shrink(self, found: dict, vm, ch):
        cur = dict(found)
        changed = True
        while changed:
            changed = False
            for m, _ in self.order:
                smaller = ch[m][ch[m] < cur[m]]
                if smaller.size == 0:
                    continue
                idx = {k: (smaller if k == m else np.full(smaller.size, v)) for k, v in cur.items()}
                bad = np.nonzero(self._fails(idx, vm))[0]
                if bad.size:
                    cur[m] = int(smaller[bad[0]])
                    changed = True
        return (cur,)

    def _report(self, idx: dict, vm) -> Counterexample:
        u = self.pools.universe
        env = {m: self.pool(m).vecs[i] for m, i in idx.items()}
        _, lhs, rhs, ctx = self.conclusion(env, vm)
        if self.law.relation == EQUIVALENT:
            bad = (ctx == 2) & (lhs != rhs)
        else:
            bad = (ctx == 2) & (lhs != 0) & (lhs != rhs)
        k = int(np.nonzero(bad)[0][0])
        pos = np.unravel_index(k, self.engine.ushape)
        binding = {n: int(u.domains[n][p]) for n, p in zip(u.var_names, pos)}
        assignment = {m: pretty_print(self.pool(m).asts[i]) for m, i in idx.items()}
        for v, k2 in vm.items():
            assignment[v] = u.var_names[k2]
        return Counterexample(self.law.name, assignment, binding, int(lhs[k]), int(rhs[k]))

    # --- independent cross-check against cexec ----------------------------
    def _cross_check(self, checked, rng) -> str:
        from ..semantics import cexec

        if not checked or self.cfg.cross_check <= 0:
            return ""
        u = self.pools.universe
        picks = rng.permutation(len(checked))[: self.cfg.cross_check]
        for p in picks:
            idx, vm = checked[int(p)]
            binding = {m: self.pool(m).asts[i] for m, i in idx.items()}
            binding.update({v: u.var_names[k] for v, k in vm.items()})
            env = {m: self.pool(m).vecs[i] for m, i in idx.items()}
            for side in (self.law.lhs, self.law.rhs):
                ast = instantiate(side, binding)
                want = cexec(u, ast).full().reshape(-1)
                got = self.engine.ev(side, env, vm)
                if not np.array_equal(want, got):
                    return f"batch evaluation disagrees with cexec on {pretty_print(ast)}"
        return ""


def _appearance(node) -> list:
    out: list = []

    def walk(n):
        if n is None:
            return
        if isinstance(n, (MetaCmd, MetaPred)):
            if n.name not in out:
                out.append(n.name)
        elif isinstance(n, (And, Or, Implies, Iff, POr, PAnd, SAnd)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Not, Exists, Forall, ExistsP, ForallP)):
            walk(n.body)
        elif isinstance(n, (Spec, Assert)):
            walk(n.pred)

    walk(node)
    return out


def check_law(law: Law, cfg: Optional[VerifyConfig] = None, pools: Optional[Pools] = None) -> LawResult:
    cfg = cfg or VerifyConfig()
    if law.builtin:
        from .builtin_checks import check_builtin
        return check_builtin(law, cfg)
    pools = pools or build_pools(cfg.nvars, cfg.nvals, cfg.depth)
    return _LawChecker(law, cfg, pools).run()


def verify_law(law: Law, cfg: Optional[VerifyConfig] = None, pools: Optional[Pools] = None) -> Optional[Counterexample]:
    """None when no counterexample is found, else the shrunk counterexample."""
    res = check_law(law, cfg, pools)
    if res.status == "error":
        raise RuntimeError(res.detail)
    return res.counterexample


def verify_all(cfg: Optional[VerifyConfig] = None, laws=None, names=None) -> VerifyReport:
    cfg = cfg or VerifyConfig()
    laws = list(laws) if laws is not None else catalogue()
    if names:
        wanted = set(names)
        laws = [law for law in laws if law.name in wanted]
    pools = None
    if any(not law.builtin for law in laws):
        pools = build_pools(cfg.nvars, cfg.nvals, cfg.depth)
    report = VerifyReport(cfg)
    for law in laws:
        report.results.append(check_law(law, cfg, pools))
    return report
