import io
import subprocess
import sys

import pytest

from cmnf import cli
from cmnf.symbolic import identities
from cmnf.symbolic.identities import IdentityResult


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def germ(tmp_path, name, *params, order=None):
    args = ["examples", name, *params] + (["--order", str(order)] if order else [])
    code, text, _ = run(*args)
    assert code == 0
    p = tmp_path / f"{name}.srs"
    p.write_text(text)
    return str(p)


def test_examples_round_trip_through_classify(tmp_path):
    code, out, _ = run("classify", germ(tmp_path, "heisenberg"))
    assert (code, out.strip()) == (0, "UmbilicToOrder(12)")
    code, out, _ = run("classify", germ(tmp_path, "generic-su"))
    assert out.strip().endswith("Generic(5,2,0))")


def test_normalize_report(tmp_path):
    code, out, _ = run("normalize", germ(tmp_path, "std-nonumbilic"))
    assert code == 0
    assert "classification NonUmbilic" in out
    assert "V 4 2 0 48" in out
    assert "R=8  J=0  K=0  L=0" in out


def test_output_is_deterministic(tmp_path):
    f = germ(tmp_path, "std-nonumbilic-J", "1/10")
    assert run("normalize", f) == run("normalize", f)
    assert "J=1/10" in run("invariants", f)[1]


def test_float_mode(tmp_path):
    f = germ(tmp_path, "std-nonumbilic")
    code, out, _ = run("invariants", f, "--mode", "float", "--precision", "128")
    assert code == 0 and out.startswith("R=0.8")


def test_tube_examples_default_to_order_17():
    assert run("examples", "tube-t1")[1].startswith("order 17")
    assert run("examples", "tube-t1", "--order", "12")[1].startswith("order 12")
    assert run("examples", "proj-p1", "--mode", "float")[1].startswith("order 12")


def test_equiv_and_symmetries(tmp_path):
    h, s = germ(tmp_path, "heisenberg"), germ(tmp_path, "sphere")
    assert run("equiv", h, s)[1].startswith("Congruent")
    assert run("symmetries", h, "--order", "10")[1].startswith("dim 8")


def test_verify_small_order():
    code, out, _ = run("verify", "--max-order", "3")
    assert code == 0
    assert out.rstrip().endswith("0 failed")
    assert "FAIL" not in out


def test_verify_list_does_not_evaluate(monkeypatch):
    monkeypatch.setattr(identities, "check_identities", lambda *a, **k: pytest.fail("evaluated"))
    code, out, _ = run("verify", "--list", "--max-order", "9")
    assert code == 0
    assert len(out.splitlines()) == len(identities.identity_table(9))


def test_verify_failure_exits_1(monkeypatch):
    bad = [IdentityResult("x", "y", False, "1/1000")]
    monkeypatch.setattr(identities, "check_identities", lambda *a, **k: bad)
    code, out, _ = run("verify", "--max-order", "2")
    assert code == cli.EXIT_FAIL
    assert "FAIL" in out and "diff: 1/1000" in out


def test_parse_errors_exit_2(tmp_path):
    p = tmp_path / "bad.srs"
    p.write_text("order 4\ncoeff 1 1 0 x 0\n")
    assert run("classify", str(p))[0] == cli.EXIT_PARSE
    assert run("classify", str(tmp_path / "missing.srs"))[0] == cli.EXIT_PARSE
    assert run("examples", "no-such-surface")[0] == cli.EXIT_PARSE
    assert run("examples", "tube-t1", "4", "1", "2")[0] == cli.EXIT_PARSE
    assert run("frobnicate")[0] == cli.EXIT_PARSE
    assert run("verify", "--max-order", "40")[0] == cli.EXIT_PARSE


def test_not_real_exits_2(tmp_path):
    p = tmp_path / "cplx.srs"
    p.write_text("order 6\ncoeff 1 1 0 1 0\ncoeff 2 0 0 1 0\n")
    assert run("classify", str(p))[0] == cli.EXIT_PARSE


def test_degenerate_levi_exits_3(tmp_path):
    p = tmp_path / "flat.srs"
    p.write_text("order 8\ncoeff 2 2 0 1 0\n")
    code, _, err = run("classify", str(p))
    assert code == cli.EXIT_DEGENERATE and "Levi" in err


def test_short_truncation_exits_4(tmp_path):
    f = germ(tmp_path, "tube-t1", order=12)
    code, _, err = run("invariants", f, "--mode", "float")
    assert code == cli.EXIT_SOLVER and "InsufficientTruncation" in err


def test_wrong_branch_exits_4(tmp_path):
    assert run("invariants", germ(tmp_path, "circ44"))[0] == cli.EXIT_SOLVER


def test_order_flag_cannot_exceed_file(tmp_path):
    assert run("classify", germ(tmp_path, "heisenberg"), "--order", "20")[0] == cli.EXIT_PARSE


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cmnf", "examples", "heisenberg", "--order", "8"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines() == ["order 8", "coeff 1 1 0 1 0"]
