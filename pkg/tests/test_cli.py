import io
import subprocess
import sys

from conftest import GOLDEN
from wsrefine.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_check_ok():
    code, out, _ = run("check", "factorial.wsl", "nqueens.wsl", "p123.wsl")
    assert code == 0
    assert out.count(": ok") == 3


def test_check_script():
    code, out, _ = run("check", "factorial.wsd")
    assert code == 0 and "factorial.wsd" in out


def test_parse_error_exit_two(tmp_path):
    bad = tmp_path / "bad.wsl"
    bad.write_text("values int 0..1;\nvar X in 0..1;\ngoal g = <X = >;\n")
    code, _, err = run("check", str(bad))
    assert code == 2
    assert f"{bad}:3:" in err


def test_missing_file_exit_two():
    code, _, err = run("check", "/nonexistent/file.wsl")
    assert code == 2 and err


def test_eval_p2_fails_at_zero():
    code, out, _ = run("eval", "p123.wsl", "--goal", "P2")
    assert code == 0
    lines = [line for line in out.splitlines() if "X=0," in line]
    assert lines and all(line.endswith("Fail") for line in lines)


def test_eval_p1_undefined_at_zero():
    _, out, _ = run("eval", "p123.wsl", "--goal", "P1")
    assert all(line.endswith("Undefined") for line in out.splitlines() if "X=0," in line)


def test_refine_factorial():
    code, out, _ = run("refine", "factorial.wsl", "factorial.wsd")
    assert code == 0
    assert "11 verified steps" in out


def test_refine_machine_output_is_deterministic():
    a = run("refine", "factorial.wsl", "factorial.wsd", "--format", "machine")
    b = run("refine", "factorial.wsl", "factorial.wsd", "--format", "machine")
    assert a == b
    lines = a[1].splitlines()
    assert lines[0] == "derivation f"
    assert lines[-1] == "result OK"
    assert all(line.startswith(("step_", "derivation", "expect", "result")) for line in lines)


def test_refine_explain():
    code, out, _ = run("refine", "factorial.wsl", "factorial.wsd", "--explain", "6")
    assert code == 0
    assert "liftpand" in out and "before:" in out and "after:" in out


def test_refine_failing_script(tmp_path):
    script = tmp_path / "bad.wsd"
    script.write_text("derivation f;\nstep pandtosand at [1];\n")
    code, out, _ = run("refine", "factorial.wsl", str(script))
    assert code == 1
    assert "FAIL" in out


def test_verify_laws_subset():
    code, out, _ = run("verify-laws", "--vars", "2", "--vals", "2", "--depth", "2",
                       "--law", "pandtosand", "--law", "pandcommute")
    assert code == 0
    assert "2/2 laws pass" in out


def test_verify_laws_machine_format():
    code, out, _ = run("verify-laws", "--vars", "2", "--vals", "2", "--depth", "1", "--law", "pandtosand",
                       "--format", "machine")
    assert code == 0
    assert out.splitlines() == [line for line in out.splitlines() if line.startswith("pandtosand pass ")]


def test_verify_laws_converse():
    code, out, _ = run("verify-laws", "--vars", "2", "--vals", "2", "--depth", "2", "--converse",
                       "--law", "pandtosand", "--law", "removeassumpt")
    assert code == 0
    assert "fail" in out


def test_verify_laws_unknown_law():
    code, _, err = run("verify-laws", "--law", "nosuchlaw")
    assert code == 2 and "nosuchlaw" in err


def test_verify_laws_failure_exit_one():
    code, out, _ = run("verify-laws", "--vars", "2", "--vals", "2", "--depth", "2", "--law", "useparallelspec")
    assert code == 1
    assert "counterexample" in out


def test_emit_rejected_exit_three():
    code, _, err = run("emit-prolog", "factorial.wsl")
    assert code == 3
    assert "assumption" in err


def test_emit_after_refinement(tmp_path):
    target = tmp_path / "out.pl"
    code, _, _ = run("emit-prolog", "factorial.wsl", "factorial.wsd", "-o", str(target))
    assert code == 0
    assert target.read_text() == (GOLDEN / "factorial.pl").read_text()


def test_usage_error_exit_two():
    code, _, err = run("eval")
    assert code == 2 and err


def test_help_exit_zero():
    code, out, _ = run("--help")
    assert code == 0


def test_subcommand_help():
    for sub in ("check", "eval", "refine", "verify-laws", "emit-prolog"):
        proc = subprocess.run([sys.executable, "-m", "wsrefine", sub, "--help"], capture_output=True,
                              text=True, timeout=120)
        assert proc.returncode == 0, (sub, proc.stderr)
        assert "usage:" in proc.stdout


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wsrefine", "check", "p123.wsl"], capture_output=True,
                          text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert "p123.wsl: ok" in proc.stdout


def test_values_override():
    code, out, _ = run("check", "p123.wsl", "--values=-1..3")
    assert code == 0 and "|Val|=5" in out


def test_values_override_must_cover_domains():
    code, _, err = run("check", "p123.wsl", "--values", "0..3")
    assert code == 1 and "-1" in err
