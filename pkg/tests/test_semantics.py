import pytest

from cyclo.semantics import (
    Truth, approximant, eval_formula, eval_ground_sequent, ground_instances, numeral,
    term_universe,
)
from cyclo.terms import App, Atom, Eq, Exists, Forall, Not, Sequent, Var


def N(t):
    return Atom("N", (t,), True)


def R(a, b):
    return Atom("R", (a, b), True)


@pytest.fixture
def phi(nr):
    return nr.defs


@pytest.fixture
def small():
    return frozenset(numeral(i) for i in range(3))


def test_universe_is_closed_under_subterms(phi):
    u = term_universe(phi.signature, 3)
    assert u == {numeral(i) for i in range(4)}


def test_stage_zero_is_empty(phi, small):
    assert approximant(phi, 0, small).extension == {}


def test_numbers_enter_one_stage_at_a_time(phi, small):
    a3 = approximant(phi, 3, small)
    assert all(a3.holds(N(t)) for t in small)
    a2 = approximant(phi, 2, small)
    assert not a2.holds(N(numeral(2)))


def test_base_axiom_fires_at_stage_one(phi, small):
    a1 = approximant(phi, 1, small)
    assert all(a1.holds(R(numeral(0), t)) for t in small)
    assert all(approximant(phi, 4, small).holds(R(numeral(0), t)) for t in small)


def test_monotone_in_stage_and_universe(phi, small):
    big = term_universe(phi.signature, 4)
    for k in range(6):
        assert approximant(phi, k, small) <= approximant(phi, k + 1, small)
        assert approximant(phi, k, small) <= approximant(phi, k, big)


def test_sequent_examples(phi):
    u = term_universe(phi.signature, 4)
    one = numeral(1)
    s = Sequent((N(one), N(one)), (R(one, one),))
    # R(s0, s0) needs R(ss0, 0), R(s0, 0) and R(0, 0)
    assert eval_ground_sequent(phi, s, 6, u) is Truth.TRUE
    assert eval_ground_sequent(phi, s, 3, u) is Truth.UNKNOWN
    assert eval_ground_sequent(phi, Sequent((N(numeral(0)),), ()), 3, u) is Truth.FALSE
    assert eval_ground_sequent(phi, Sequent((N(numeral(0)),), (N(numeral(0)),)), 0, u) is Truth.UNKNOWN
    assert eval_ground_sequent(phi, Sequent((N(numeral(0)),), (N(numeral(0)),)), 1, u) is Truth.TRUE
    with pytest.raises(ValueError):
        eval_ground_sequent(phi, Sequent((N(Var("x")),), ()), 1, u)


def test_connectives_and_quantifiers(phi, small):
    a = approximant(phi, 5, small)
    zero = numeral(0)
    assert eval_formula(phi, Eq(zero, zero), a, small) is Truth.TRUE
    assert eval_formula(phi, Not(N(zero)), a, small) is Truth.FALSE
    assert eval_formula(phi, Exists(("x",), N(Var("x"))), a, small) is Truth.TRUE
    # a finite universe can refute a universal claim but never confirm it
    assert eval_formula(phi, Forall(("x",), N(Var("x"))), a, small) is Truth.UNKNOWN
    assert eval_formula(phi, Forall(("x",), Eq(Var("x"), zero)), a, small) is Truth.FALSE


def test_ordinary_extensions_are_read_from_the_file():
    from cyclo.proof_format import parse
    doc = parse("""
    (signature (fun 0 0) (fun s 1) (ind E 1) (ord Z 1))
    (axiom e0 ((Z x)) () (E x))
    (ord-ext Z (atoms (Z 0)))
    """)
    u = term_universe(doc.defs.signature, 2)
    a = approximant(doc.defs, 1, u)
    assert a.extension == {"E": frozenset({(App("0"),)})}


def test_ground_instances(nr):
    root = nr.proofs["1"].sequent
    u = frozenset(numeral(i) for i in range(2))
    insts = list(ground_instances(root, u))
    assert len(insts) == 4
    assert all(not inst.antecedents[0].args[0] == Var("x") for _, inst in insts)


def test_running_example_on_small_numbers(phi):
    u = term_universe(phi.signature, 10)
    a = approximant(phi, 16, u)
    for i in range(6):
        for j in range(6):
            s = Sequent((N(numeral(i)), N(numeral(j))), (R(numeral(i), numeral(j)),))
            assert eval_ground_sequent(phi, s, 16, u, a) is Truth.TRUE
