"""Command-line front end: ``wsrefine <subcommand> ...``.

Exit codes: 0 success, 1 verification or derivation failure, 2 usage or
parse error, 3 executability rejection.  Machine output never contains
timings, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, TextIO

from .errors import ParseError, UnknownLaw, UnorderableDataflow, WsrefineError
from .syntax.ast import CapDecl, ProgramAst, UniverseDecl, ValuesInt

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REJECTED = 0, 1, 2, 3
SUBCOMMANDS = ("check", "eval", "refine", "verify-laws", "emit-prolog")


class _UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    fmt: str = "text"
    seed: int = 0
    goal: Optional[str] = None
    values: Optional[tuple] = None  # (lo, hi) replacing the declared integer values
    cap: Optional[int] = None
    nvars: int = 3
    nvals: int = 2
    depth: int = 2
    laws: list = field(default_factory=list)
    converse: bool = False
    samples: int = 100_000
    exhaustive_limit: int = 1_000_000
    explain: Optional[int] = None
    output: Optional[str] = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise _UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.fmt not in ("text", "machine"):
            raise _UsageError("--format must be text or machine")
        for name in ("nvars", "nvals", "depth", "samples", "exhaustive_limit"):
            if getattr(self, name) < 1:
                raise _UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.cap is not None and self.cap < 1:
            raise _UsageError("--cap must be positive")


# ------------------------------------------------------------------ parsing


def _range(text: str) -> tuple:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="wsrefine", description="Refinement checker for wide-spectrum logic programs.")
    sub = top.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, universe=True):
        p.add_argument("--format", dest="fmt", choices=("text", "machine"), default="text")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        if universe:
            p.add_argument("--values", type=_range, metavar="LO..HI",
                           help="replace the declared integer values")
            p.add_argument("--cap", type=int, help="override the binding-space cap")

    p = sub.add_parser("check", help="parse a program or derivation and check static invariants")
    p.add_argument("inputs", nargs="+")
    common(p)

    p = sub.add_parser("eval", help="dump the execution of a goal")
    p.add_argument("inputs", nargs=1)
    p.add_argument("--goal", help="goal name (default: first goal)")
    common(p)

    p = sub.add_parser("refine", help="replay a derivation script")
    p.add_argument("inputs", nargs=2, metavar="FILE", help="the program and then the derivation script")
    p.add_argument("--explain", type=int, metavar="I", help="print the programs before and after step I")
    common(p)

    p = sub.add_parser("verify-laws", help="search for counterexamples to the law catalogue")
    p.add_argument("--vars", dest="nvars", type=int, default=3)
    p.add_argument("--vals", dest="nvals", type=int, default=2)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--law", dest="laws", action="append", default=[], help="restrict to this law (repeatable)")
    p.add_argument("--converse", action="store_true",
                   help="check the reversed laws instead (mutation self-test)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--exhaustive-limit", type=int, default=1_000_000)
    common(p, universe=False)

    p = sub.add_parser("emit-prolog", help="translate an executable program to Prolog")
    p.add_argument("inputs", nargs="+", metavar="FILE", help="program, optionally followed by a derivation script")
    p.add_argument("-o", "--output")
    common(p)
    return top


def config_from_args(argv) -> CliConfig:
    ns = build_parser().parse_args(argv)
    known = {f.name for f in dataclasses.fields(CliConfig)}
    return CliConfig(**{k: v for k, v in vars(ns).items() if k in known})


# ------------------------------------------------------------------ helpers


def _resolve(path: str) -> Path:
    """The path itself, or a bundled example of the same name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("wsrefine") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise _UsageError(f"no such file: {path}")


def _read(path: str) -> tuple:
    p = _resolve(path)
    return p, p.read_text()


def _load_program(cfg: CliConfig, path: str) -> ProgramAst:
    from .syntax.parser import parse_program

    p, text = _read(path)
    try:
        prog = parse_program(text)
    except ParseError as exc:
        raise _UsageError(f"{p}:{exc}") from None
    return _override(cfg, prog)


def _override(cfg: CliConfig, prog: ProgramAst) -> ProgramAst:
    if cfg.values is None and cfg.cap is None:
        return prog
    items = list(prog.universe.items)
    if cfg.values is not None:
        items = [i for i in items if not isinstance(i, ValuesInt)] + [ValuesInt(*cfg.values)]
    if cfg.cap is not None:
        items = [i for i in items if not isinstance(i, CapDecl)] + [CapDecl(cfg.cap)]
    return dataclasses.replace(prog, universe=UniverseDecl(tuple(items)))


def _load_scripts(path: str):
    from .syntax.parser import parse_derivation

    p, text = _read(path)
    try:
        return parse_derivation(text)
    except ParseError as exc:
        raise _UsageError(f"{p}:{exc}") from None


# ---------------------------------------------------------------- commands


def _check(cfg: CliConfig, out: TextIO) -> int:
    from .semantics import load_program

    for path in cfg.inputs:
        if path.endswith(".wsd"):
            scripts = _load_scripts(path)
            steps = sum(len(s.steps) for s in scripts)
            print(f"{path}: ok ({len(scripts)} derivations, {steps} steps)", file=out)
            continue
        loaded = load_program(_load_program(cfg, path))
        u = loaded.universe
        nbnd = math.prod(u.shape(tuple(u.var_names)))
        print(f"{path}: ok ({len(loaded.ast.procs)} procedures, {len(loaded.ast.goals)} goals, "
              f"{len(u.var_names)} variables, |Val|={u.n}, |Bnd|={nbnd})", file=out)
    return EXIT_OK


def _eval(cfg: CliConfig, out: TextIO) -> int:
    from .semantics import FixResult, load_program
    from .syntax.transforms import calls_in

    loaded = load_program(_load_program(cfg, cfg.inputs[0]))
    if not loaded.ast.goals:
        raise _UsageError(f"{cfg.inputs[0]} declares no goal")
    try:
        goal = loaded.ast.goal_named(cfg.goal) if cfg.goal else loaded.ast.goal
    except KeyError:
        names = ", ".join(n for n, _ in loaded.ast.goals)
        raise _UsageError(f"unknown goal {cfg.goal!r} (declared: {names})") from None
    e = loaded.goal_exec(cfg.goal)
    for name in sorted(calls_in(goal)):
        pe = loaded.env.get(name)
        if isinstance(pe, FixResult):
            print(f"iterations {name} {pe.iterations}", file=out)
    out.write(e.dump())
    return EXIT_OK


def _refine(cfg: CliConfig, out: TextIO) -> int:
    from .derivation import replay_all

    prog = _load_program(cfg, cfg.inputs[0])
    scripts = _load_scripts(cfg.inputs[1])
    start = time.perf_counter()
    reports = replay_all(scripts, prog, strict=False)
    elapsed = time.perf_counter() - start
    ok = len(reports) == len(scripts) and all(r.ok for r in reports)
    if cfg.explain is not None:
        for rep in reports:
            try:
                print(rep.explain(cfg.explain), file=out)
                return EXIT_OK if ok else EXIT_FAIL
            except IndexError:
                continue
        raise _UsageError(f"no step {cfg.explain} in {cfg.inputs[1]}")
    if cfg.fmt == "machine":
        for rep in reports:
            print(f"derivation {rep.target}", file=out)
            for line in rep.machine_lines():
                print(line, file=out)
    else:
        print("\n\n".join(rep.text() for rep in reports), file=out)
        total = sum(r.verified_steps for r in reports)
        print(f"\n{total} verified steps in {len(reports)} derivation(s), {elapsed:.2f}s", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def _verify(cfg: CliConfig, out: TextIO) -> int:
    from .laws.catalogue import catalogue, lookup
    from .laws.verify import VerifyConfig, verify_all

    for name in cfg.laws:
        lookup(name)
    laws = catalogue()
    if cfg.laws:
        laws = [law for law in laws if law.name in set(cfg.laws)]
    if cfg.converse:
        laws = [law.converse() for law in laws if not law.builtin and not law.is_equivalence]
        if not laws:
            raise _UsageError("--converse needs at least one refinement (non-equivalence) law")
    vcfg = VerifyConfig(nvars=cfg.nvars, nvals=cfg.nvals, depth=cfg.depth, seed=cfg.seed,
                        samples=cfg.samples, exhaustive_limit=cfg.exhaustive_limit)
    report = verify_all(vcfg, laws=laws)
    if cfg.fmt == "machine":
        for line in report.machine_lines():
            print(line, file=out)
    else:
        print(report.table(), file=out)
    if cfg.converse:
        # the mutation self-test succeeds when every reversed law is refuted
        return EXIT_OK if all(r.status == "fail" for r in report.results) else EXIT_FAIL
    return EXIT_OK if report.ok else EXIT_FAIL


def _emit(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    from .derivation import replay_all
    from .emit import check_executable, emit_prolog, render

    if len(cfg.inputs) > 2:
        raise _UsageError("emit-prolog takes a program and at most one derivation script")
    prog = _load_program(cfg, cfg.inputs[0])
    if len(cfg.inputs) == 2:
        reports = replay_all(_load_scripts(cfg.inputs[1]), prog, strict=False)
        bad = [r for r in reports if not r.ok]
        if bad:
            print(bad[0].text(), file=err)
            return EXIT_FAIL
        prog = reports[-1].program
    rep = check_executable(prog)
    if not rep.executable:
        print(rep.text(), file=err)
        return EXIT_REJECTED
    try:
        text = render(emit_prolog(prog))
    except UnorderableDataflow as exc:
        print(f"error: {exc}", file=err)
        return EXIT_REJECTED
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def run(cfg: CliConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        if cfg.subcommand == "check":
            return _check(cfg, out)
        if cfg.subcommand == "eval":
            return _eval(cfg, out)
        if cfg.subcommand == "refine":
            return _refine(cfg, out)
        if cfg.subcommand == "verify-laws":
            return _verify(cfg, out)
        return _emit(cfg, out, err)
    except (ParseError, UnknownLaw, _UsageError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except WsrefineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FAIL


def main(argv=None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return run(cfg, out, err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
