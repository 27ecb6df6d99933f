from hypothesis import given, settings

from cyclo.terms import (
    App, Atom, Eq, Forall, Sequent, Substitution, Var, apply_subst, compose, free_vars,
    fresh_name, match, match_sequent, multiset_minus, term_depth,
)

from .strategies import substitutions, terms

x, y, z = Var("x"), Var("y"), Var("z")
zero = App("0")


def s(t):
    return App("s", (t,))


def test_apply_is_simultaneous():
    sub = Substitution({"x": y, "y": x})
    assert apply_subst(App("f", (x, y)), sub) == App("f", (y, x))


def test_compose_order():
    # apply the left substitution first
    th = compose(Substitution({"x": s(y)}), Substitution({"y": zero}))
    assert apply_subst(x, th) == s(zero)
    assert apply_subst(y, th) == zero


def test_identity_entries_are_invisible_to_equality():
    assert Substitution.identity(["x", "y"]) == Substitution()
    assert not Substitution.identity(["x"])
    assert Substitution({"x": x, "y": zero}).proper() == {"y": zero}


@settings(max_examples=1000, deadline=None)
@given(terms(), substitutions(), substitutions(), substitutions())
def test_compose_associative_and_sound(t, a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert apply_subst(t, compose(a, b)) == apply_subst(apply_subst(t, a), b)


@settings(max_examples=500, deadline=None)
@given(terms(), substitutions())
def test_match_finds_instances(t, sub):
    inst = apply_subst(t, sub)
    found = match(t, inst)
    assert found is not None
    assert apply_subst(t, found) == inst


@settings(max_examples=500, deadline=None)
@given(terms(), terms())
def test_match_is_sound(p, t):
    found = match(p, t)
    if found is not None:
        assert apply_subst(p, found) == t


def test_match_respects_binding_and_pattern_vars():
    assert match(App("f", (x, x)), App("f", (zero, s(zero)))) is None
    assert match(x, zero, {"x": s(zero)}) is None
    assert match(App("f", (x, y)), App("f", (zero, y)), pattern_vars={"x"}) == {"x": zero}
    assert match(App("f", (x, y)), App("f", (zero, zero)), pattern_vars={"x"}) is None


def test_sequents_are_multisets():
    a, b = Atom("N", (x,), True), Atom("N", (y,), True)
    assert Sequent((a, b), ()) == Sequent((b, a), ())
    assert Sequent((a, a), ()) != Sequent((a,), ())
    assert Sequent((a, Eq(x, y)), ()).iaas() == [a]


def test_match_sequent_is_exact_on_multisets():
    t = Var("t")
    pat = Sequent((Atom("N", (t,), True), Atom("N", (y,), True)),
                  (Atom("R", (t, zero), True),))
    subj = Sequent((Atom("N", (y,), True), Atom("N", (x,), True)),
                   (Atom("R", (x, zero), True),))
    hits = list(match_sequent(pat, subj, pattern_vars={"t"}))
    assert [h[0] for h in hits] == [{"t": x}]
    assert hits[0][1] == (1, 0)
    extra = Sequent(subj.antecedents + (Atom("N", (z,), True),), subj.succedents)
    assert not list(match_sequent(pat, extra, pattern_vars={"t"}))


def test_binders_avoid_capture():
    f = Forall(("y",), Atom("P", (x, y)))
    g = apply_subst(f, Substitution({"x": y}))
    assert free_vars(g) == {"y"}
    assert g.vars != ("y",)


def test_helpers():
    assert fresh_name("x", {"x", "x'"}) == "x''"
    assert term_depth(s(s(zero))) == 2
    assert multiset_minus((1, 1, 2), (1,)) == (1, 2)
    assert multiset_minus((1,), (2,)) is None
