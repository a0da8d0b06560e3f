import io
import json

import pytest

from twoway_parikh.cli import EXIT_ERROR, EXIT_FAILS, EXIT_HOLDS, main
from twoway_parikh.constructions import build_multiplication, build_sweep
from twoway_parikh.core import ACCEPTED, accepts_oracle
from twoway_parikh.decide import complement, equivalent, is_empty, membership
from twoway_parikh.presburger import parse_formula
from twoway_parikh.randomgen import corpus
from twoway_parikh.textformat import format_2pa, parse_2pa


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, A in (("sweep", build_sweep()), ("mult", build_multiplication()),
                    ("strong", build_sweep(parse_formula("x1 = x2 /\\ x1 >= 1")))):
        p = tmp_path / f"{name}.2pa"
        p.write_text(format_2pa(A))
        paths[name] = str(p)
    return paths


def test_empty_sweep(files):
    code, out = run("empty", files["sweep"], "--k", "3")
    assert code == EXIT_HOLDS
    # the empty word is the shortest witness
    assert out.splitlines() == ["VERDICT: nonempty", "WITNESS: ", "VALUE: (0,0)"]


def test_empty_json(files):
    code, out = run("empty", files["strong"], "--k", "3", "--json")
    rec = json.loads(out)
    assert code == EXIT_HOLDS
    assert rec["command"] == "empty" and rec["verdict"] == "nonempty"
    assert rec["witness"] in ("ab", "ba")
    assert rec["value"] == [1, 1]
    assert "total_s" in rec["timings"]


def test_member_multiplication(files):
    assert run("member", files["mult"], "aa#aaa#aaaaaa")[0] == EXIT_HOLDS
    code, out = run("member", files["mult"], "aa#aaa#aaaaa")
    assert code == EXIT_FAILS and "VERDICT: nonmember" in out


def test_equiv_reflexive(files):
    code, out = run("equiv", files["sweep"], files["sweep"])
    assert code == EXIT_HOLDS and "VERDICT: equivalent" in out


def test_include_both_directions(files):
    assert run("include", files["strong"], files["sweep"])[0] == EXIT_HOLDS
    assert run("include", files["sweep"], files["strong"])[0] == EXIT_FAILS


def test_nondeterministic_needs_k(files, capsys):
    code, _ = run("empty", files["mult"])
    assert code == EXIT_ERROR
    assert "--k" in capsys.readouterr().err


def test_parse_error_names_file_and_line(tmp_path, capsys):
    bad = tmp_path / "bad.2pa"
    bad.write_text("alphabet a\ndim 0\nstate s Q\n")
    assert run("validate", str(bad))[0] == EXIT_ERROR
    assert f"{bad}:3:" in capsys.readouterr().err


def test_missing_file_and_usage(capsys):
    assert run("validate", "/nonexistent/x.2pa")[0] == EXIT_ERROR
    assert run("frobnicate")[0] == EXIT_ERROR
    capsys.readouterr()


def test_oracle_check_agrees(files):
    code, out = run("empty", files["sweep"], "--k", "3", "--oracle-check", "4")
    assert code == EXIT_HOLDS and "ORACLE: agree" in out
    code, out = run("equiv", files["sweep"], files["sweep"], "--oracle-check", "4")
    assert "ORACLE: agree" in out


def test_gen_round_trips(tmp_path):
    for fam, arg in (("sweep", None), ("mult", None), ("mismatch", "2")):
        code, out = run("gen", fam, *([arg] if arg else []))
        assert code == EXIT_HOLDS
        parse_2pa(out)
    eq = tmp_path / "sq.eq"
    eq.write_text("x*x = 4\n")
    code, out = run("gen", "diophantine", str(eq))
    assert code == EXIT_HOLDS
    assert "lhs:(x*x)=4" in out
    parse_2pa(out)


def test_complement_output_is_loadable(files):
    code, out = run("complement", files["sweep"])
    C = parse_2pa(out)
    assert equivalent(C, complement(build_sweep()))


def test_formula_commands():
    code, out = run("qe", "exists x. forall y. x <= y")
    assert code == EXIT_HOLDS and "RESULT: false" in out
    assert run("sat", "exists x. x + x = 3")[0] == EXIT_FAILS
    code, out = run("sat", "x + x = 4")
    assert code == EXIT_HOLDS and "MODEL: x=2" in out


def test_sample_sorted(files):
    code, out = run("sample", files["sweep"], "--len", "2")
    assert out.splitlines() == ["COUNT: 3", "ε", "ab", "ba"]


def test_verdicts_equal_library(tmp_path):
    for i, P in enumerate(corpus(70, 12, k=3)):
        p = tmp_path / f"c{i}.2pa"
        p.write_text(format_2pa(P))
        code, _ = run("empty", str(p), "--k", "3", "--no-witness")
        assert (code == EXIT_FAILS) == is_empty(P, 3).empty
        for w in ("", "a", "ab"):
            if set(w) <= set(P.alphabet):
                code, _ = run("member", str(p), w)
                assert (code == EXIT_HOLDS) == membership(P, w) == (accepts_oracle(P, w) == ACCEPTED)


def test_parikh_with_bounded_image(files):
    code, out = run("parikh", files["sweep"], "--k", "3", "--semilinear", "2")
    assert code == EXIT_HOLDS
    assert "IMAGE: (0,0) (0,1) (0,2) (1,0) (1,1) (2,0)" in out
