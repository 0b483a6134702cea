"""Recursive-descent parser for ``.wsl`` programs, law patterns and ``.wsd`` scripts."""

from __future__ import annotations

from typing import Callable, Optional

from ..errors import ArityError, FreeVarError, ParseError, UnknownLaw
from ..library import BUILTIN_FUNCTORS, LIBRARY_PREDICATES, canonical_functor
from .ast import (
    And, Assert, BUILTIN_STEPS, COMPARE_OPS, Call, CapDecl, Command, Compare, DerivationScript,
    DerivationStep, DomainSpec, Exists, ExistsP, FalsePred, Forall, ForallP, FunApp, FunDecl,
    Iff, Implies, Member, MetaCmd, MetaPred, ModeDecl, Not, Or, PAnd, POr, Param, PredDef,
    ProgramAst, RecBlock, SAnd, Spec, TruePred, UniverseDecl, UserPred, ValuesAtoms,
    ValuesInt, ValuesLists, ValuesTerms, VarDecl, VarRef, abort, fail, list_term, nil_term, skip,
)
from .lexer import Token, tokenize

_CMP_TOKENS = {"=": "=", "\\=": "\\=", "!=": "\\=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
_KEYWORDS_CMD = {"exists", "forall", "skip", "fail", "abort", "re", "er"}


class Parser:
    def __init__(self, text: str, *, cmd_metas=(), pred_metas=()):
        self.toks: list[Token] = tokenize(text)
        self.pos = 0
        self.cmd_metas = set(cmd_metas)
        self.pred_metas = set(pred_metas)
        self.in_spec = 0

    # ------------------------------------------------------------ helpers
    def peek(self, k: int = 0) -> Token:
        i = min(self.pos + k, len(self.toks) - 1)
        return self.toks[i]

    def at(self, value: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("OP", "IDENT") and t.value == value

    def accept(self, value: str) -> Optional[Token]:
        if self.at(value):
            return self.next()
        return None

    def next(self) -> Token:
        t = self.toks[self.pos]
        if self.pos < len(self.toks) - 1:
            self.pos += 1
        return t

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"unexpected {self._describe(self.peek())}", (value,))
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.error(f"expected {what}, found {self._describe(t)}", (what,))
        return self.next()

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.value)

    def error(self, msg: str, expected=()):
        t = self.peek()
        raise ParseError(msg, t.line, t.col, tuple(expected))

    def loc(self) -> tuple:
        t = self.peek()
        return (t.line, t.col)

    def at_eof(self) -> bool:
        return self.peek().kind == "EOF"

    # ------------------------------------------------------------- terms
    def _term_start(self, k: int = 0) -> bool:
        t = self.peek(k)
        if t.kind == "IDENT":
            return t.value != "er"
        return t.kind in ("INT", "VAR") or (t.kind == "OP" and t.value in ("(", "[", "-"))

    def term(self):
        left = self._mul_term()
        while self.peek().kind == "OP" and self.peek().value in ("+", "-"):
            loc = self.loc()
            op = self.next().value
            right = self._mul_term()
            left = FunApp(op, (left, right), loc)
        return left

    def _mul_term(self):
        left = self._unary_term()
        while (self.peek().kind == "OP" and self.peek().value in ("*", "/")) or self.at("mod"):
            loc = self.loc()
            op = self.next().value
            right = self._unary_term()
            left = FunApp(op, (left, right), loc)
        return left

    def _unary_term(self):
        if self.peek().kind == "OP" and self.peek().value == "-":
            loc = self.loc()
            self.next()
            if self.peek().kind == "INT":
                return FunApp(str(-int(self.next().value)), (), loc)
            return FunApp("neg", (self._unary_term(),), loc)
        return self._primary_term()

    def _primary_term(self):
        t = self.peek()
        loc = (t.line, t.col)
        if t.kind == "INT":
            self.next()
            return FunApp(str(int(t.value)), (), loc)
        if t.kind == "VAR":
            self.next()
            return VarRef(t.value, loc)
        if t.kind == "IDENT":
            self.next()
            name = canonical_functor(t.value)
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.accept(","):
                        args.append(self.term())
                self.expect(")")
                return FunApp(name, tuple(args), loc)
            return FunApp(name, (), loc)
        if self.accept("["):
            items = []
            tail = None
            if not self.at("]"):
                items.append(self.term())
                while self.accept(","):
                    items.append(self.term())
                if self.accept("|"):
                    tail = self.term()
            self.expect("]")
            return list_term(items, tail) if (items or tail) else FunApp("nil", (), loc)
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        self.error(f"expected a term, found {self._describe(t)}", ("term",))

    # -------------------------------------------------------- predicates
    def pred(self):
        return self._iff()

    def _iff(self):
        left = self._implies()
        if self.accept("<=>"):
            return Iff(left, self._iff())
        return left

    def _implies(self):
        left = self._por()
        if self.accept("=>"):
            return Implies(left, self._implies())
        return left

    def _por(self):
        left = self._pand()
        if self.accept("\\/"):
            return Or(left, self._por())
        return left

    def _pand(self):
        left = self._pnot()
        if self.accept("/\\"):
            return And(left, self._pand())
        return left

    def _pnot(self):
        if self.accept("~"):
            return Not(self._pnot())
        if self.at("exists") or self.at("forall"):
            return self._pquant()
        return self._patom()

    def _var_list(self) -> list[str]:
        names = [self.expect_kind("VAR", "variable").value]
        while self.at(",") and self.peek(1).kind == "VAR":
            self.next()
            names.append(self.next().value)
        return names

    def _pquant(self):
        loc = self.loc()
        kind = self.next().value
        names = self._var_list()
        lo = hi = None
        if self.accept("in"):
            if len(names) != 1:
                self.error("a bounded quantifier binds exactly one variable")
            lo = self.term()
            self.expect("..")
            hi = self.term()
        self.expect(".")
        body = self.pred()
        cls = ExistsP if kind == "exists" else ForallP
        for name in reversed(names):
            body = cls(name, body, lo, hi, loc)
        return body

    def _at_compare(self) -> bool:
        t = self.peek()
        if t.kind != "OP" or t.value not in _CMP_TOKENS:
            return False
        if t.value == ">" and self.in_spec and not self._term_start(1):
            return False
        return True

    def _patom(self):
        t = self.peek()
        loc = (t.line, t.col)
        if t.kind == "IDENT" and t.value in ("true", "false") and not self.at("(", 1):
            self.next()
            return TruePred(loc) if t.value == "true" else FalsePred(loc)
        if t.kind == "OP" and t.value == "(":
            save = self.pos
            try:
                self.next()
                saved_spec, self.in_spec = self.in_spec, 0
                try:
                    inner = self.pred()
                finally:
                    self.in_spec = saved_spec
                self.expect(")")
                if not self._at_compare() and not self.at("in"):
                    return inner
            except ParseError:
                pass
            self.pos = save
        if t.kind == "VAR" and t.value in self.pred_metas:
            nxt = self.peek(1)
            if not ((nxt.kind == "OP" and nxt.value in _CMP_TOKENS and not (
                    nxt.value == ">" and self.in_spec and not self._term_start(2)))
                    or (nxt.kind == "IDENT" and nxt.value == "in")):
                self.next()
                return MetaPred(t.value, loc)
        lhs = self.term()
        if self._at_compare():
            op = _CMP_TOKENS[self.next().value]
            rhs = self.term()
            return Compare(op, lhs, rhs, loc)
        if self.accept("in"):
            if self.at("nat") and not self.at("(", 1):
                self.next()
                return UserPred("nat", (lhs,), loc)
            lo = self.term()
            self.expect("..")
            hi = self.term()
            return Member(lhs, lo, hi, loc)
        if isinstance(lhs, FunApp) and not lhs.functor.lstrip("-").isdigit():
            if LIBRARY_PREDICATES.get(lhs.functor) == len(lhs.args) or lhs.functor not in BUILTIN_FUNCTORS:
                return UserPred(lhs.functor, lhs.args, loc)
        self.error("expected a comparison after term", tuple(sorted(set(_CMP_TOKENS))) + ("in",))

    # ---------------------------------------------------------- commands
    def command(self):
        left = self._seq()
        if self.accept("\\/"):
            return POr(left, self.command(), getattr(left, "loc", None))
        return left

    def _seq(self):
        left = self._par()
        if self.accept(","):
            return SAnd(left, self._seq(), getattr(left, "loc", None))
        return left

    def _par(self):
        left = self._cunary()
        if self.accept("/\\"):
            return PAnd(left, self._par(), getattr(left, "loc", None))
        return left

    def _cunary(self):
        if self.at("exists") or self.at("forall"):
            loc = self.loc()
            kind = self.next().value
            names = self._var_list()
            self.expect(".")
            body = self.command()
            cls = Exists if kind == "exists" else Forall
            for name in reversed(names):
                body = cls(name, body, loc)
            return body
        return self._cprimary()

    def _cprimary(self):
        t = self.peek()
        loc = (t.line, t.col)
        if self.accept("<"):
            self.in_spec += 1
            try:
                p = self.pred()
            finally:
                self.in_spec -= 1
            self.expect(">")
            return Spec(p, loc)
        if self.accept("{"):
            saved, self.in_spec = self.in_spec, 0
            try:
                p = self.pred()
            finally:
                self.in_spec = saved
            self.expect("}")
            return Assert(p, loc)
        if t.kind == "IDENT":
            if t.value in ("skip", "fail", "abort"):
                self.next()
                node = {"skip": skip, "fail": fail, "abort": abort}[t.value]()
                return type(node)(node.pred, loc)
            if self.at("(", 1):
                self.next()
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.accept(","):
                        args.append(self.term())
                self.expect(")")
                return Call(t.value, tuple(args), loc)
            if t.value in self.cmd_metas:
                self.next()
                return MetaCmd(t.value, loc)
            self.error(f"unexpected identifier {t.value!r} in command position", ("(",))
        if self.accept("("):
            saved, self.in_spec = self.in_spec, 0
            try:
                c = self.command()
            finally:
                self.in_spec = saved
            self.expect(")")
            return c
        self.error(f"expected a command, found {self._describe(t)}",
                   ("<", "{", "(", "exists", "forall", "skip", "fail", "abort", "identifier"))

    def pcommand(self):
        loc = self.loc()
        if self.accept("re"):
            ident = self.expect_kind("IDENT", "procedure identifier").value
            self.expect(".")
            inner = self.pcommand()
            self.expect("er")
            return RecBlock(ident, inner, loc)
        self.expect("(")
        if self.accept("("):
            formals = self._var_list()
            self.expect(")")
            self.expect(".")
            body = self.command()
            self.expect(")")
            return Param(tuple(formals), body, loc)
        formals = self._var_list()
        if self.accept("."):
            body = self.command()
            self.expect(")")
            return Param(tuple(formals), body, loc)
        self.expect(")")
        self.expect(".")
        body = self.command()
        return Param(tuple(formals), body, loc)

    def any_command(self):
        """A command or a parametrised command (used for ``expect`` and params)."""
        if self.at("re"):
            return self.pcommand()
        if self.at("("):
            save = self.pos
            try:
                return self.pcommand()
            except ParseError:
                self.pos = save
        return self.command()

    # --------------------------------------------------------- universe
    def _sint(self) -> int:
        neg = bool(self.accept("-"))
        v = int(self.expect_kind("INT", "integer").value)
        return -v if neg else v

    def _ground_term(self):
        return self.term()

    def _domain(self) -> DomainSpec:
        if self.accept("{"):
            items = [self._ground_term()]
            while self.accept(","):
                items.append(self._ground_term())
            self.expect("}")
            return DomainSpec("set", tuple(items))
        if self.accept("lists"):
            if self.accept("maxlen"):
                return DomainSpec("lists", (int(self.expect_kind("INT", "integer").value),))
            return DomainSpec("lists")
        for kw in ("ints", "atoms", "all"):
            if self.accept(kw):
                return DomainSpec(kw)
        lo = self._sint()
        self.expect("..")
        hi = self._sint()
        return DomainSpec("range", (lo, hi))

    def universe_item(self):
        if self.accept("values"):
            if self.accept("int"):
                lo = self._sint()
                self.expect("..")
                hi = self._sint()
                item = ValuesInt(lo, hi)
            elif self.accept("lists"):
                self.expect("maxlen")
                k = int(self.expect_kind("INT", "integer").value)
                self.expect("over")
                lo = self._sint()
                self.expect("..")
                hi = self._sint()
                item = ValuesLists(k, lo, hi)
            elif self.accept("atoms"):
                names = [self.expect_kind("IDENT", "atom").value]
                while self.accept(","):
                    names.append(self.expect_kind("IDENT", "atom").value)
                item = ValuesAtoms(tuple(names))
            elif self.accept("terms"):
                self.expect("depth")
                depth = int(self.expect_kind("INT", "integer").value)
                self.expect("over")
                self.expect("{")
                functors = []
                rng = None
                while True:
                    if self.peek().kind == "IDENT":
                        name = self.next().value
                        self.expect("/")
                        functors.append((name, int(self.expect_kind("INT", "arity").value)))
                    else:
                        lo = self._sint()
                        self.expect("..")
                        rng = (lo, self._sint())
                    if not self.accept(","):
                        break
                self.expect("}")
                item = ValuesTerms(depth, tuple(functors), rng)
            else:
                self.error("unknown values declaration", ("int", "lists", "atoms", "terms"))
            self.expect(";")
            return item
        if self.accept("var"):
            names = self._var_list()
            dom = self._domain() if self.accept("in") else DomainSpec("all")
            self.expect(";")
            return VarDecl(tuple(names), dom)
        if self.accept("fun"):
            name = canonical_functor(self.expect_kind("IDENT", "functor").value)
            self.expect("/")
            arity = int(self.expect_kind("INT", "arity").value)
            if self.accept("builtin"):
                kind = self.next().value if self.peek().kind == "IDENT" else None
                self.expect(";")
                return FunDecl(name, arity, builtin=kind or "int")
            self.expect("{")
            rows = []
            while not self.accept("}"):
                self.expect("(")
                args = []
                if not self.at(")"):
                    args.append(self._ground_term())
                    while self.accept(","):
                        args.append(self._ground_term())
                self.expect(")")
                self.expect("->")
                res = self._ground_term()
                self.expect(";")
                rows.append((tuple(args), res))
            self.accept(";")
            return FunDecl(name, arity, None, tuple(rows))
        if self.accept("cap"):
            n = int(self.expect_kind("INT", "integer").value)
            self.expect(";")
            return CapDecl(n)
        self.error("expected a universe declaration", ("values", "var", "fun", "cap"))

    # ---------------------------------------------------------- program
    def program(self) -> ProgramAst:
        uitems: list = []
        procs: list = []
        goals: list = []
        modes: list = []
        preds: list = []
        while not self.at_eof():
            if self.accept("universe"):
                self.expect("{")
                while not self.accept("}"):
                    uitems.append(self.universe_item())
                continue
            if self.at("values") or self.at("var") or self.at("fun") or self.at("cap"):
                uitems.append(self.universe_item())
                continue
            if self.accept("proc"):
                name_tok = self.expect_kind("IDENT", "procedure name")
                self.expect("=")
                pc = self.pcommand()
                self.expect(";")
                procs.append((name_tok.value, pc, (name_tok.line, name_tok.col)))
                continue
            if self.accept("goal"):
                name = "main"
                if self.peek().kind in ("VAR", "IDENT") and self.at("=", 1):
                    name = self.next().value
                    self.next()
                goals.append((name, self.command()))
                self.expect(";")
                continue
            if self.accept("mode"):
                name = self.expect_kind("IDENT", "procedure name").value
                self.expect("(")
                ms = [self.expect_kind("IDENT", "mode").value]
                while self.accept(","):
                    ms.append(self.expect_kind("IDENT", "mode").value)
                self.expect(")")
                self.expect(";")
                for m in ms:
                    if m not in ("in", "out"):
                        raise ParseError(f"mode must be 'in' or 'out', got {m!r}")
                modes.append(ModeDecl(name, tuple(ms)))
                continue
            if self.accept("pred"):
                name = self.expect_kind("IDENT", "predicate name").value
                self.expect("(")
                params = self._var_list()
                self.expect(")")
                self.expect(":=")
                body = self.pred()
                self.expect(";")
                preds.append(PredDef(name, tuple(params), body))
                continue
            self.error(f"unexpected {self._describe(self.peek())} at top level",
                       ("universe", "values", "var", "fun", "proc", "goal", "mode", "pred"))
        seen = set()
        for name, _, loc in procs:
            if name in seen:
                raise ParseError(f"procedure {name} defined twice", *loc)
            seen.add(name)
        return ProgramAst(UniverseDecl(tuple(uitems)), tuple((n, pc) for n, pc, _ in procs),
                          tuple(goals), tuple(modes), tuple(preds))


# ---------------------------------------------------------------- resolution


class _Resolver:
    """Static checks after parsing: arities, declared variables, Param free
    variables, and alpha-renaming of binders that shadow an enclosing binder."""

    def __init__(self, program: ProgramAst):
        self.program = program
        self.functors: dict[str, int] = dict(BUILTIN_FUNCTORS)
        self.var_decls: dict[str, DomainSpec] = {}
        self.preds = dict(LIBRARY_PREDICATES)
        for pd in program.preds:
            self.preds[pd.name] = len(pd.params)
        for item in program.universe.items:
            if isinstance(item, ValuesAtoms):
                for a in item.names:
                    self.functors[a] = 0
            elif isinstance(item, ValuesTerms):
                for name, arity in item.functors:
                    self.functors.setdefault(name, arity)
            elif isinstance(item, FunDecl):
                self.functors[item.name] = item.arity
            elif isinstance(item, VarDecl):
                for n in item.names:
                    self.var_decls[n] = item.domain
        self.proc_arity = {n: len(_formals(pc)) for n, pc in program.procs}
        self.extra_decls: list[VarDecl] = []
        self.counter = 0

    def fresh(self, base: str) -> str:
        root = base.split("_")[0] if "_" in base else base
        while True:
            self.counter += 1
            cand = f"{root}_{self.counter}"
            if cand not in self.var_decls:
                self.var_decls[cand] = self.var_decls.get(base, DomainSpec("all"))
                self.extra_decls.append(VarDecl((cand,), self.var_decls[cand]))
                return cand

    def check_var(self, name: str, loc):
        if name not in self.var_decls:
            raise ParseError(f"variable {name} is not declared", *(loc or (0, 0)))

    def term(self, t):
        if isinstance(t, VarRef):
            self.check_var(t.name, t.loc)
            return
        name = t.functor
        if name.lstrip("-").isdigit():
            return
        if name not in self.functors:
            raise ParseError(f"unknown functor {name}", *(t.loc or (0, 0)))
        if self.functors[name] != len(t.args):
            raise ArityError(f"functor {name} expects {self.functors[name]} argument(s), got {len(t.args)}",
                             *(t.loc or (0, 0)))
        for a in t.args:
            self.term(a)

    def pred(self, p, scope: frozenset):
        if isinstance(p, Compare):
            self.term(p.lhs)
            self.term(p.rhs)
            return p
        if isinstance(p, Member):
            for t in (p.term, p.lo, p.hi):
                self.term(t)
            return p
        if isinstance(p, (And, Or, Implies, Iff)):
            return type(p)(self.pred(p.left, scope), self.pred(p.right, scope), p.loc)
        if isinstance(p, Not):
            return Not(self.pred(p.body, scope), p.loc)
        if isinstance(p, (ExistsP, ForallP)):
            self.check_var(p.var, p.loc)
            if p.lo is not None:
                self.term(p.lo)
                self.term(p.hi)
            if p.var in scope:
                from .transforms import rename_var
                new = self.fresh(p.var)
                p = type(p)(new, rename_var(p.body, p.var, new), p.lo, p.hi, p.loc)
            return type(p)(p.var, self.pred(p.body, scope | {p.var}), p.lo, p.hi, p.loc)
        if isinstance(p, UserPred):
            if p.name not in self.preds:
                raise ParseError(f"unknown predicate {p.name}", *(p.loc or (0, 0)))
            if self.preds[p.name] != len(p.args):
                raise ArityError(f"predicate {p.name} expects {self.preds[p.name]} argument(s)",
                                 *(p.loc or (0, 0)))
            for a in p.args:
                self.term(a)
            return p
        return p

    def command(self, c, scope: frozenset):
        if isinstance(c, (Spec, Assert)):
            return type(c)(self.pred(c.pred, scope), c.loc)
        if isinstance(c, (POr, PAnd, SAnd)):
            return type(c)(self.command(c.left, scope), self.command(c.right, scope), c.loc)
        if isinstance(c, (Exists, Forall)):
            self.check_var(c.var, c.loc)
            if c.var in scope:
                from .transforms import rename_var
                new = self.fresh(c.var)
                c = type(c)(new, rename_var(c.body, c.var, new), c.loc)
            return type(c)(c.var, self.command(c.body, scope | {c.var}), c.loc)
        if isinstance(c, Call):
            for a in c.args:
                self.term(a)
            if c.proc in self.proc_arity and self.proc_arity[c.proc] != len(c.args):
                raise ArityError(f"procedure {c.proc} expects {self.proc_arity[c.proc]} argument(s)",
                                 *(c.loc or (0, 0)))
            return c
        return c

    def pcommand(self, pc, rec_ids=()):
        from .transforms import free_vars
        if isinstance(pc, RecBlock):
            self.proc_arity.setdefault(pc.ident, len(_formals(pc)))
            return RecBlock(pc.ident, self.pcommand(pc.inner, rec_ids + (pc.ident,)), pc.loc)
        if len(set(pc.formals)) != len(pc.formals):
            raise ParseError("repeated formal parameter", *(pc.loc or (0, 0)))
        for f in pc.formals:
            self.check_var(f, pc.loc)
        body = self.command(pc.body, frozenset(pc.formals))
        stray = free_vars(body) - set(pc.formals)
        if stray:
            raise FreeVarError(stray, *(pc.loc or (0, 0)))
        return Param(pc.formals, body, pc.loc)

    def run(self) -> ProgramAst:
        procs = tuple((n, self.pcommand(pc)) for n, pc in self.program.procs)
        goals = tuple((n, self.command(g, frozenset())) for n, g in self.program.goals)
        for pd in self.program.preds:
            for v in pd.params:
                self.check_var(v, None)
            self.pred(pd.body, frozenset(pd.params))
        items = tuple(self.program.universe.items) + tuple(self.extra_decls)
        return ProgramAst(UniverseDecl(items), procs, goals, self.program.modes, self.program.preds)


def _formals(pc) -> tuple:
    while isinstance(pc, RecBlock):
        pc = pc.inner
    return pc.formals


# ---------------------------------------------------------------- public API


def parse_program(text: str) -> ProgramAst:
    raw = Parser(text).program()
    return _Resolver(raw).run()


def parse_command(text: str, *, cmd_metas=(), pred_metas=()):
    p = Parser(text, cmd_metas=cmd_metas, pred_metas=pred_metas)
    c = p.command()
    if not p.at_eof():
        p.error(f"unexpected {p._describe(p.peek())} after command")
    return c


def parse_pcommand(text: str):
    p = Parser(text)
    c = p.pcommand()
    if not p.at_eof():
        p.error(f"unexpected {p._describe(p.peek())} after parametrised command")
    return c


def parse_pred(text: str, *, pred_metas=()):
    p = Parser(text, pred_metas=pred_metas)
    out = p.pred()
    if not p.at_eof():
        p.error(f"unexpected {p._describe(p.peek())} after predicate")
    return out


def parse_term(text: str):
    p = Parser(text)
    out = p.term()
    if not p.at_eof():
        p.error(f"unexpected {p._describe(p.peek())} after term")
    return out


# -------------------------------------------------------- derivation scripts

ParamKinds = Callable[[str], Optional[dict]]


def _default_param_kinds(law: str) -> Optional[dict]:
    from ..laws.catalogue import param_kinds
    return param_kinds(law)


def _parse_value(p: Parser, kind: str):
    if kind == "pred":
        return p.pred()
    if kind == "cmd":
        return p._par() if not p.at("re") else p.pcommand()
    if kind == "term":
        return p.term()
    if kind == "var":
        return p.expect_kind("VAR", "variable").value
    if kind == "ident":
        return p.expect_kind("IDENT", "identifier").value
    raise ParseError(f"unsupported parameter kind {kind}")


def parse_derivation(text: str, param_kinds: ParamKinds | None = None) -> list[DerivationScript]:
    """Parse a ``.wsd`` file into one script per ``derivation`` block."""
    kinds_of = param_kinds or _default_param_kinds
    p = Parser(text)
    scripts: list[DerivationScript] = []
    while not p.at_eof():
        p.expect("derivation")
        target = p.expect_kind("IDENT", "procedure name").value
        p.expect(";")
        steps: list[DerivationStep] = []
        expected = None
        auto_close = False
        while not p.at_eof() and not p.at("derivation"):
            line = p.peek().line
            if p.accept("recursion"):
                ident = p.expect_kind("IDENT", "recursion identifier").value
                p.expect("variant")
                p.expect("(")
                smaller = p._var_list()
                p.expect(")")
                p.expect("<")
                p.expect("(")
                current = p._var_list()
                p.expect(")")
                p.expect(":")
                variant = p.pred()
                p.expect(";")
                steps.append(DerivationStep("rec-intro", (), (
                    ("ident", ident), ("smaller", tuple(smaller)), ("formals", tuple(current)),
                    ("variant", variant)), line=line))
                auto_close = True
                continue
            if p.accept("close"):
                p.expect(";")
                steps.append(DerivationStep("close-rec", (), (), line=line))
                auto_close = False
                continue
            if p.accept("focus"):
                path = _parse_path(p)
                p.expect(";")
                steps.append(DerivationStep("focus", path, (), line=line))
                continue
            if p.accept("unfocus"):
                p.expect(";")
                steps.append(DerivationStep("unfocus", (), (), line=line))
                continue
            if p.accept("expect"):
                expected = p.any_command()
                p.expect(";")
                continue
            p.expect("step")
            name_tok = p.expect_kind("IDENT", "law name")
            name = name_tok.value
            while p.at("-") and p.peek(1).kind == "IDENT":
                p.next()
                name += "-" + p.next().value
            if name in BUILTIN_STEPS:
                kinds = _BUILTIN_PARAMS.get(name, {})
            else:
                kinds = kinds_of(name)
                if kinds is None:
                    raise UnknownLaw(name)
            direction = None
            if p.at("forward") or p.at("reverse"):
                direction = p.next().value
            path: tuple = ()
            if p.accept("at"):
                path = _parse_path(p)
            params = []
            if p.accept("with"):
                while True:
                    pname_tok = p.next()
                    pname = pname_tok.value
                    if pname not in kinds:
                        raise ParseError(f"law {name} has no parameter {pname!r}", pname_tok.line, pname_tok.col,
                                         tuple(sorted(kinds)))
                    p.expect(":=")
                    params.append((pname, _parse_value(p, kinds[pname])))
                    if not p.accept(","):
                        break
            repeat = bool(p.accept("repeat"))
            note = ""
            if p.accept("note"):
                note = p.expect_kind("STRING", "string").value
            p.expect(";")
            steps.append(DerivationStep(name, path, tuple(params), direction, repeat, note, line))
        if auto_close:
            steps.append(DerivationStep("close-rec", (), (), line=p.peek().line))
        if not steps:
            raise ParseError(f"derivation {target} has no steps")
        scripts.append(DerivationScript(target, tuple(steps), expected))
    if not scripts:
        raise ParseError("empty derivation script")
    return scripts


_BUILTIN_PARAMS = {
    "use-hypothesis": {},
    "semantic-check": {"by": "cmd"},
}


def _parse_path(p: Parser) -> tuple:
    p.expect("[")
    out = []
    if not p.at("]"):
        out.append(int(p.expect_kind("INT", "child index").value))
        while p.accept(","):
            out.append(int(p.expect_kind("INT", "child index").value))
    p.expect("]")
    return tuple(out)
