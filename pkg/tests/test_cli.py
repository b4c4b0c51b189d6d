from __future__ import annotations

import io
import subprocess
import sys

import pytest

from artinflat.cli import main
from artinflat.report import parse_reports

FLAT = """\
# flat morphism s -> x^2
field 2
ring A vars s : s^2
ring B vars x : x^4
map f A -> B : s -> x^2
module M over B : free 1
check theorem1 f M
"""


def run(tmp_path, text, *flags, name="inst.txt"):
    path = tmp_path / name
    path.write_text(text)
    out, err = io.StringIO(), io.StringIO()
    code = main(["run", str(path), *flags], out, err)
    return code, out.getvalue(), err.getvalue()


def test_theorem1_pass(tmp_path):
    code, out, _ = run(tmp_path, FLAT)
    assert code == 0
    (rep,) = parse_reports(out)
    assert rep.kind == "theorem1" and rep["verdict"] == "Pass"


def test_edim_violation_exits_one(tmp_path):
    text = FLAT.replace("ring B vars x : x^4", "ring B vars x,y : x^2, x*y, y^2").replace("s -> x^2", "s -> x").replace("free 1", "coker [[y]]")
    code, out, _ = run(tmp_path, text)
    assert code == 1
    assert parse_reports(out)[0]["verdict"] == "HypothesisNotMet(edim_le)"


@pytest.mark.parametrize(
    "text, needle",
    [
        ("field 2\nring B vars x : x^2 - 1\n", "NotLocal"),
        ("field 2\nring B vars x : 2x\n", "line 2, column 18: implicit multiplication"),
        ("field 2\nring B vars x : x^2\ncheck invariants C\n", "unknown ring 'C'"),
        ("field 2\nring B vars x : x^2\ncheck invariants B B\n", "takes 1 arguments"),
        ("field 2\nring B vars x : x^2\nring B vars y : y^2\n", "already declared"),
        ("ring B vars x : x^2\n", "declare 'field"),
        ("field 101\n", "exceeds cap 97"),
        ("field 2\nring A vars s : s^2\nring B vars x : x^4\nmap f A -> B : s -> x\n", "not multiplicative"),
        ("field 2\nring B vars x : x^2\nmodule M over B : coker [[x]\n", "unbalanced"),
        ("field 2\nbogus\n", "unknown statement"),
    ],
)
def test_input_errors_exit_two(tmp_path, text, needle):
    code, out, err = run(tmp_path, text)
    assert code == 2 and out == ""
    assert needle in err


def test_caps_override(tmp_path):
    assert run(tmp_path, "field 101\n", "--unsafe-raise-caps")[0] == 0


def test_all_subcommands_and_certificate_roundtrip(tmp_path):
    text = FLAT + """\
ring R vars x,y : x^2, y^2
module N over R : coker [[x]]
module K over R : actions [[[0,0],[1,0]], [[0,0],[0,0]]]
check invariants R
check ci R
check wiebe R
check flat N over R
check flat M over f
check wtf N
check wtf N --mode sampled --trials 30 --seed 4
check lemma-cert B [x^2] [x] [[x]] M [0,0,0,1] --out cert.txt
check verify-cert cert.txt
check desmit f --count 16
check wtf-equiv R --count 8
check sweep --kind monomial_ci --seed 7 --count 3
"""
    code, out, err = run(tmp_path, text)
    assert code == 0, err
    reps = {r.kind: r for r in parse_reports(out)}
    inv = reps["invariants"]
    assert (inv["edim"], inv["socle_dim"], inv["gorenstein"], inv["ci"], inv["mu"]) == ("2", "1", "true", "true", "2")
    assert reps["wiebe"]["det"] == "x*y"
    assert reps["wtf"]["witness.lambda"] in ("x", "x + x*y")
    assert reps["lemma_cert"]["status"] == "certified"
    assert reps["verify_cert"]["valid"] == "true"
    assert reps["sweep"]["theorem_violation"] == "0"
    # standalone verifier agrees
    out2 = io.StringIO()
    assert main(["verify-cert", str(tmp_path / "cert.txt")], out2, io.StringIO()) == 0
    assert parse_reports(out2.getvalue())[0]["valid"] == "true"
    # a tampered certificate is rejected
    cert = (tmp_path / "cert.txt").read_text().splitlines()
    cert = [("b.1: 0 0 0 1" if line.startswith("b.1:") else line) for line in cert]
    (tmp_path / "bad.txt").write_text("\n".join(cert) + "\n")
    assert main(["verify-cert", str(tmp_path / "bad.txt")], io.StringIO(), io.StringIO()) == 1


def test_failed_lemma_precondition_exits_one(tmp_path):
    text = FLAT + "check lemma-cert B [x^2] [x] [[x]] M [1,0,0,0]\n"
    code, out, _ = run(tmp_path, text)
    assert code == 1 and parse_reports(out)[-1]["status"] == "PreconditionFailed"


def test_outputs_are_byte_identical(tmp_path):
    text = FLAT + "check sweep --kind binomial --seed 2 --count 4\n"
    a = run(tmp_path, text)[1]
    b = run(tmp_path, text)[1]
    assert a == b and "elapsed" not in a
    assert "elapsed_seconds" in run(tmp_path, text, "--timing")[1]
    s1, s2 = io.StringIO(), io.StringIO()
    main(["sweep", "--kind", "monomial_ci", "--seed", "7", "--count", "10"], s1)
    main(["sweep", "--kind", "monomial_ci", "--seed", "7", "--count", "10"], s2)
    assert s1.getvalue() == s2.getvalue()


def test_module_entrypoint(tmp_path):
    (tmp_path / "f.txt").write_text(FLAT)
    res = subprocess.run([sys.executable, "-m", "artinflat", "run", str(tmp_path / "f.txt")], capture_output=True, text=True)
    assert res.returncode == 0 and "verdict = Pass" in res.stdout
