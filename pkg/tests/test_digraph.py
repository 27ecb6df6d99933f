import random

import networkx as nx
import pytest

from cyclo.digraph import (
    BACKLINK, DigraphError, all_rb_paths, build_digraph, cumulative_list, cumulative_subst,
    rb_paths, strongly_connected_components, to_dot,
)
from cyclo.normalizer import normalize
from cyclo.proof_format import parse
from cyclo.terms import App, Substitution, Var

x, y, x1, x2, y1 = Var("x"), Var("y"), Var("x'"), Var("x''"), Var("y'")


def s(t):
    return App("s", (t,))


SPLIT = """
(signature (fun 0 0) (fun s 1) (ind N 1) (ind R 2))
(axiom n0 () () (N 0))
(axiom n1 () ((N x)) (N (s x)))
(axiom r0 () () (R 0 y))
(axiom r1 () ((R x 0)) (R (s x) 0))
(tree pi 10
  (node 10 (seq ((N x')) ((R x' 0)))
    (rule Case (N x') (branches (n0 11) (n1 12))) (children 11 12))
  (node 11 (seq ((= x' 0)) ((R x' 0))) (rule Gen (= x' 0)) (children 11.1))
  (node 11.1 (seq () ((R 0 0))) (rule Unfold r0 (R 0 0)) (children))
  (node 12 (seq ((= x' (s x'')) (N x'')) ((R x' 0))) (rule Gen (= x' (s x''))) (children 12.1))
  (node 12.1 (seq ((N x'')) ((R (s x'') 0))) (rule Unfold r1 (R (s x'') 0)) (children 13))
  (node 13 (seq ((N x'')) ((R x'' 0))) (rule Subst ((x' x''))) (children 14))
  (bud 14 (seq ((N x')) ((R x' 0))) (companion 10)))
"""


@pytest.fixture
def g(nr):
    return build_digraph(nr.defs, normalize(nr.proofs))


def test_requires_normal_form(nr):
    with pytest.raises(DigraphError):
        build_digraph(nr.defs, nr.proofs)


def test_sccs_of_running_example(g):
    assert [c for c in g.non_singleton_sccs()] == [
        ("1", "3", "5", "6", "7", "8"), ("10", "12", "13", "14")]
    assert sorted(len(c) for c in g.non_singleton_sccs()) == [4, 6]


def test_annotations(g):
    f = g.forward
    assert f[("1", "3")].annotation == {"x": s(x1)}
    assert f[("3", "5")].annotation == {"y": s(y1)}
    assert f[("10", "12")].annotation == {"x'": s(x2)}
    assert f[("13", "14")].annotation is None and f[("7", "8")].annotation is None
    assert f[("5", "6")].annotation.is_identity()
    assert set(f[("5", "6")].annotation) == {"x'", "y'"}
    assert [(a.source, a.target) for a in g.backlinks()] == [
        ("8", "1"), ("10.2", "10"), ("14", "10")]


def test_rb_paths_and_cumulative_substitutions(g):
    paths = all_rb_paths(g)
    assert [p.nodes for p in paths] == [
        ("1", "3", "5", "6", "7", "8"), ("10", "12", "13", "14")]
    assert paths[0].theta == {"x": s(x1), "y": s(y1)}
    assert paths[1].theta == {"x'": s(x2)}
    assert [p.ih_node for p in paths] == ["7", "13"]
    # the identity part spans every variable met before the bud
    assert {"x", "y", "x'", "y'"} <= set(paths[0].theta)
    assert cumulative_subst(g, ("10", "12", "13", "14")) == paths[1].theta
    assert rb_paths(g, g.scc_of["10"]) == [paths[1]]


def test_cumulative_lists_revalidate(g):
    for p in all_rb_paths(g):
        cl = cumulative_list(g, p.nodes)
        assert cl.ok, [v for st in cl.steps for v in st.violations]
    pi = cumulative_list(g, ("10", "12", "13", "14"))
    assert pi.wk_replacements == ["10"]
    assert str(pi.sequents[0]) == "N(s(x'')) ⊢ R(s(x''), 0)"


def test_gen_becomes_wk_on_instances():
    doc = parse(SPLIT)
    g = build_digraph(doc.defs, doc.proofs)
    [p] = all_rb_paths(g)
    assert p.nodes == ("10", "12", "12.1", "13", "14")
    assert p.theta == {"x'": s(x2)}
    cl = cumulative_list(g, p.nodes)
    assert cl.ok
    assert cl.wk_replacements == ["12"]
    assert [st.rule for st in cl.steps] == ["Case", "Wk", "Unfold", "Subst"]


def test_dot_export(g):
    dot = to_dot(g)
    assert dot.startswith("digraph proof {")
    assert dot.count("style=dashed") == len(g.backlinks()) == 3
    assert '"1" -> "3" [label="{x ↦ s(x\')}"];' in dot
    assert '"7" -> "8";' in dot
    assert '"5" -> "6" [label="id"];' in dot
    assert '"1" [label="1: N(x), N(y) ⊢ R(x, y)"];' in dot


@pytest.mark.parametrize("seed", range(100))
def test_tarjan_agrees_with_networkx(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 15)
    nodes = [str(i) for i in range(n)]
    succ = {v: [w for w in nodes if rng.random() < 0.15] for v in nodes}
    ours = {frozenset(c) for c in strongly_connected_components(nodes, succ)}
    ref = nx.DiGraph()
    ref.add_nodes_from(nodes)
    ref.add_edges_from((v, w) for v in nodes for w in succ[v])
    assert ours == {frozenset(c) for c in nx.strongly_connected_components(ref)}


def test_tarjan_is_iterative():
    n = 5000
    nodes = [str(i) for i in range(n)]
    succ = {str(i): [str((i + 1) % n)] for i in range(n)}
    [comp] = strongly_connected_components(nodes, succ)
    assert len(comp) == n


def test_backlink_kind(g):
    assert all(a.kind == BACKLINK and a.annotation is None for a in g.backlinks())
    assert Substitution() == Substitution.identity(["x"])
