import pytest

from cyclo.proof_format import ProofFormatError, parse, serialize
from cyclo.sexpr import SList, SexprError, Sym, dumps, read_all
from cyclo.terms import App, Var

from .conftest import EXAMPLES, example

NAMES = ("nr", "stutter", "fig4")


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    doc = example(name)
    text = serialize(doc)
    again = parse(text)
    assert again == doc
    assert serialize(again) == text


def test_nullary_functions_are_constants(nr):
    root = nr.proofs["2"].sequent
    (r,) = root.succedents
    assert r.args == (App("0"), Var("y"))


def test_tags_and_trees(nr):
    assert [t.root for t in nr.proofs.trees] == ["1"]
    assert nr.proofs["10"].tag == "*"
    assert nr.proofs["14"].companion == "10"


def test_sexpr_positions_and_quoting():
    (lst,) = read_all('(a "b c" ; note\n  d)')
    assert isinstance(lst, SList)
    assert [str(x) for x in lst] == ["a", "b c", "d"]
    assert lst[2].line == 2 and lst[2].col == 3
    assert dumps(Sym("b c", quoted=True)) == '"b c"'
    with pytest.raises(SexprError) as exc:
        read_all("(a (b)")
    assert exc.value.line == 1


@pytest.mark.parametrize("text, fragment", [
    ("(signature (fun 0 0) (ind N 1)) (frob)", "unknown top-level"),
    ("(signature (fun 0 0) (ind N 1)) (axiom a () () (N 0 0))", "1:49: N expects 1"),
    ("(signature (fun 0 0) (ind N 1)) (axiom a () () (N 0)) "
     "(tree t 1 (bud 1 (seq ((N x)) ()) (companion 9)))", "9"),
    ("(signature (fun 0 0) (fun s 1) (ind N 1)) (precedence (< 0 s) (< s 0))", "cycl"),
])
def test_structural_errors(text, fragment):
    with pytest.raises(ProofFormatError) as exc:
        parse(text)
    assert fragment in str(exc.value)


def test_examples_are_packaged():
    names = sorted(p.name for p in EXAMPLES.iterdir() if p.name.endswith(".proof"))
    assert names == ["fig4.proof", "nr.proof", "stutter.proof"]
