import subprocess
import sys


from cyclo.cli import EXIT_OK, EXIT_STRUCTURAL, EXIT_UNSOUND, EXIT_USAGE, main
from cyclo.sexpr import read_all

from .conftest import EXAMPLES

NR = str(EXAMPLES / "nr.proof")
STUTTER = str(EXAMPLES / "stutter.proof")
FIG4 = str(EXAMPLES / "fig4.proof")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_sound(capsys, monkeypatch):
    monkeypatch.delenv("CYCLO_COLOR", raising=False)
    code, out, _ = run(capsys, "check", NR)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "SOUND (2 constraints, 2 discharged)"


def test_check_unsound_with_report(capsys, tmp_path):
    rep = tmp_path / "out.sexp"
    code, out, _ = run(capsys, "check", STUTTER, "--report", str(rep))
    assert code == EXIT_UNSOUND
    assert "strict-decrease" in out
    (tree,) = read_all(rep.read_text())
    assert str(tree[0]) == "report"


def test_quiet_and_jobs(capsys):
    code, out, _ = run(capsys, "--quiet", "check", "--jobs", "2", FIG4)
    assert code == EXIT_UNSOUND
    assert out == "UNSOUND (3 constraints, 2 discharged)\n"


def test_color(capsys, monkeypatch):
    monkeypatch.setenv("CYCLO_COLOR", "1")
    _, out, _ = run(capsys, "check", NR)
    assert out.startswith("\x1b[32mSOUND")
    monkeypatch.setenv("CYCLO_COLOR", "0")
    _, out, _ = run(capsys, "check", NR)
    assert out.startswith("SOUND")


def test_graph_dot(capsys):
    code, out, _ = run(capsys, "graph", "--dot", NR)
    assert code == EXIT_OK
    # the two buds of the file plus the one added by normalisation
    assert out.count("style=dashed") == 3


def test_graph_summary(capsys):
    _, out, _ = run(capsys, "graph", NR)
    assert "SCC {1, 3, 5, 6, 7, 8}" in out and "SCC {10, 12, 13, 14}" in out


def test_parse_and_normalize_round_trip(capsys, tmp_path):
    dest = tmp_path / "norm.proof"
    code, _, err = run(capsys, "normalize", NR, "-o", str(dest))
    assert code == EXIT_OK and "op2 on 10" in err
    code, out, _ = run(capsys, "parse", str(dest))
    assert code == EXIT_OK and out == dest.read_text()
    code, _, err = run(capsys, "normalize", str(dest))
    assert err == ""


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", NR)
    assert code == EXIT_OK and out == "16 nodes, 0 errors\n"


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", FIG4)
    assert code == EXIT_OK
    assert "constraints: 3 distinct, 4 over all n-cycles" in out
    assert "n-cycle criterion: UNSOUND" in out


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--depth", "16", "--universe", "5", NR)
    assert code == EXIT_OK
    assert out == "1: N(x), N(y) ⊢ R(x, y): 36 true, 0 false, 0 unknown\n"


def test_structural_errors(capsys, tmp_path):
    bad = tmp_path / "bad.proof"
    bad.write_text("(signature (fun 0 0)")
    code, _, err = run(capsys, "check", str(bad))
    assert code == EXIT_STRUCTURAL and err.startswith("parse:")
    code, _, err = run(capsys, "check", str(tmp_path / "missing.proof"))
    assert code == EXIT_STRUCTURAL


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate", NR)[0] == EXIT_USAGE
    assert run(capsys, "check")[0] == EXIT_USAGE
    assert run(capsys, "check", "--jobs", "0", NR)[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE


def test_output_is_deterministic(capsys):
    first = run(capsys, "check", NR)[1]
    assert all(run(capsys, "check", NR)[1] == first for _ in range(3))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cyclo", "--quiet", "check", NR],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "SOUND (2 constraints, 2 discharged)\n"
