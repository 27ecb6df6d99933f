from hypothesis import strategies as st

from cyclo.terms import App, Substitution, Var

VARS = ("x", "y", "z")


def terms(max_leaves=8, ground=False):
    leaves = st.just(App("0")) if ground else st.one_of(
        st.just(App("0")), st.sampled_from(VARS).map(Var))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(lambda t: App("s", (t,))),
            st.tuples(sub, sub).map(lambda p: App("f", p)),
            st.tuples(sub, sub).map(lambda p: App("g", p)),
        ),
        max_leaves=max_leaves,
    )


def substitutions(ground=False):
    return st.dictionaries(st.sampled_from(VARS), terms(4, ground), max_size=3).map(Substitution)
