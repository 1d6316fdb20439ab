import csv
import subprocess
import sys

import pytest

from combilog.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tr_leafk_identity(capsys):
    assert run(capsys, "tr", "--algo", "leafk", r"\x. x") == (0, "I\n", "")


def test_tr_kiselyov_open_uses_canonical_order(capsys):
    code, out, _ = run(capsys, "tr", "--algo", "kiselyov", "y x")
    assert code == 0 and out.startswith("(2, ")


@pytest.mark.parametrize("algo", ["leafk", "subtermk", "bc", "kiselyov", "kiselyov-ref"])
def test_tr_verify(capsys, algo):
    code, _, err = run(capsys, "tr", "--algo", algo, "--verify", r"\f.\g.\x. f x (g x)")
    assert code == 0 and "verified" in err


def test_tr_modal_dialect(capsys):
    code, out, _ = run(capsys, "tr", "--algo", "kiselyov", "--dialect", "modal", r"box (\y. y)")
    assert code == 0 and out.startswith("(0, ")


def test_tr_classic_open_is_user_error(capsys):
    code, _, err = run(capsys, "tr", "--algo", "bc", "x")
    assert code == 1 and "closed" in err


def test_eval_staged_capture(capsys):
    code, out, _ = run(capsys, "eval", "--calculus", "staged", r"let a = box y in box (\x.\y. (unbox a) x)")
    assert (code, out) == (0, "box (\\x.\\y. y x)\n")


def test_eval_lambda_and_divergence(capsys):
    assert run(capsys, "eval", "--calculus", "lambda", r"(\x.\y. x) a b")[:2] == (0, "a\n")
    code, _, err = run(capsys, "eval", "--calculus", "lambda", "--fuel", "100", r"(\x. x x)(\x. x x)")
    assert code == 2 and "diverged" in err


def test_eval_modal_typecheck(capsys):
    code, out, err = run(capsys, "eval", "--calculus", "modal", "--typecheck", r"\x:[]A. letbox u = x in u")
    assert code == 0 and "[]A -> A" in err
    code, _, err = run(capsys, "eval", "--calculus", "modal", "--typecheck", r"\x:A. box x")
    assert code == 1


def test_eval_stuck(capsys):
    assert run(capsys, "eval", "--calculus", "staged", "f a")[0] == 1


def test_denote_all_orders(capsys):
    code, out, _ = run(capsys, "denote", "--all-orders", "x y z")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[0].split("\t")[:2] == ["[x,y,z]", "3"]


def test_denote_canonical(capsys):
    code, out, _ = run(capsys, "denote", "--canonical", "z")
    assert (code, out) == (0, "[z]\t1\tI\n")


def test_denote_cap(capsys):
    assert run(capsys, "denote", "--all-orders", "--cap", "2", "x y z")[0] == 1


def test_permute(capsys):
    code, out, err = run(capsys, "permute", "--from", "x,y,z", "--to", "z,y,x", "--verify", "x y z")
    assert code == 0 and out.startswith("(3, ") and "verified" in err
    assert run(capsys, "permute", "--from", "x,y", "--to", "z,y,x", "x y z")[0] == 1


def test_parse_errors_have_position(capsys):
    code, _, err = run(capsys, "parse", r"\x. (x")
    assert code == 1 and "position 6" in err and "^" in err
    assert run(capsys, "parse", "box x")[0] == 1
    assert run(capsys, "parse", "--dialect", "modal", "box x")[:2] == (0, "box x\n")
    assert run(capsys, "parse", "--db", r"\. 0 0")[:2] == (0, "\\.0 0\n")
    assert run(capsys, "parse", "--type", "[](A -> B)")[:2] == (0, "[](A -> B)\n")


def test_bad_arguments(capsys):
    assert run(capsys, "tr")[0] == 1
    assert run(capsys, "nosuch")[0] == 1


def test_bench(tmp_path, capsys):
    out, slopes = tmp_path / "g.csv", tmp_path / "s.csv"
    code, text, _ = run(capsys, "bench", "--family", "ApChain,NestProj", "--n-min", "2", "--n-max", "16",
                        "--algos", "bc,kiselyov", "--out", str(out), "--slopes-out", str(slopes))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["family", "n", "algorithm", "metric", "value"]
    assert {r[1] for r in rows[1:]} == {"2", "4", "8", "16"}
    assert "slope" in slopes.read_text()
    first = out.read_bytes()
    run(capsys, "bench", "--family", "ApChain,NestProj", "--n-min", "2", "--n-max", "16",
        "--algos", "bc,kiselyov", "--out", str(out))
    assert out.read_bytes() == first


def test_bench_bad_family(tmp_path, capsys):
    assert run(capsys, "bench", "--family", "Nope", "--n-max", "4", "--out", str(tmp_path / "x"))[0] == 1


def test_env_seed(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("COMBILOG_SEED", "7")
    a = tmp_path / "a.csv"
    run(capsys, "bench", "--family", "RandClosed", "--n-max", "8", "--algos", "bc", "--out", str(a))
    b = tmp_path / "b.csv"
    monkeypatch.delenv("COMBILOG_SEED")
    run(capsys, "bench", "--family", "RandClosed", "--n-max", "8", "--algos", "bc", "--seed", "7", "--out", str(b))
    assert a.read_text() == b.read_text()
    monkeypatch.setenv("COMBILOG_FUEL", "oops")
    assert run(capsys, "parse", "x")[0] == 1


def test_stdin_and_module_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "combilog", "tr", "--algo", "bc"],
        input=r"\x.\y. y x", capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip()
