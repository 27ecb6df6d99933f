import itertools

import networkx as nx
import pytest

from cyclo.checker import CheckContext, check_soundness, prepare
from cyclo.digraph import build_digraph
from cyclo.ncycles import (
    check_prior_criterion, complete_digraph_cycle_count, complete_treeset, enumerate_ncycles,
    redundancy_report, simple_cycles, skeleton,
)
from cyclo.normalizer import check_normal_form
from cyclo.proof_format import parse

from .gen import parse_random_normal

# simple cycles of length ≥ 2 in the complete digraph on n vertices, from
# Σ_{k=2}^{n} n!/((n-k)!·k)
EXPECTED = {2: 1, 3: 5, 4: 20, 5: 84, 6: 409}


def _graph(doc):
    return prepare(doc)[2]


def brute_force_cycles(n: int) -> int:
    # distinct cyclic sequences of k ≥ 2 distinct vertices, up to rotation
    seen = set()
    for k in range(2, n + 1):
        for perm in itertools.permutations(range(n), k):
            i = perm.index(min(perm))
            seen.add(perm[i:] + perm[:i])
    return len(seen)


@pytest.mark.parametrize("n", sorted(EXPECTED))
def test_cycle_count_formula(n):
    assert complete_digraph_cycle_count(n) == EXPECTED[n]
    assert brute_force_cycles(n) == EXPECTED[n]
    ref = nx.complete_graph(n, create_using=nx.DiGraph)
    assert sum(1 for c in nx.simple_cycles(ref) if len(c) >= 2) == EXPECTED[n]


def test_count_rejects_tiny_graphs():
    with pytest.raises(ValueError):
        complete_digraph_cycle_count(1)


def test_simple_cycles_in_multigraphs():
    edges = [("a", "b", "e1"), ("b", "a", "e2"), ("b", "a", "e3"), ("a", "a", "e4")]
    assert sorted(simple_cycles(["a", "b"], edges)) == [("e1", "e2"), ("e1", "e3"), ("e4",)]


def test_running_example_cycles(nr):
    g = _graph(nr)
    assert [c.buds for c in enumerate_ncycles(g)] == [("8",), ("14",)]
    assert redundancy_report(g) == (2, 2)
    prior = check_prior_criterion(CheckContext.of(nr), g)
    assert prior.sound and prior.instances == 2


def test_fig4_duplicates_the_shared_constraint(fig4):
    g = _graph(fig4)
    assert [c.buds for c in enumerate_ncycles(g)] == [("1.2", "2.3.1"), ("1.2", "2.4.1")]
    assert redundancy_report(g) == (3, 4)
    prior = check_prior_criterion(CheckContext.of(fig4), g)
    assert not prior.sound
    failing = prior.failing()
    assert [c.bud for c in failing] == ["1.2", "1.2"]
    assert failing[0].result == failing[1].result
    assert not check_soundness(fig4).sound


def test_acyclic_tree_set_has_no_cycles():
    doc = parse("""
    (signature (fun 0 0) (ind N 1))
    (axiom n0 () () (N 0))
    (tree t 1 (node 1 (seq ((N 0)) ((N 0))) (rule Ax) (children)))
    """)
    g = _graph(doc)
    assert enumerate_ncycles(g) == [] and redundancy_report(g) == (0, 0)
    assert check_prior_criterion(CheckContext.of(doc), g).sound


@pytest.mark.parametrize("n", sorted(EXPECTED))
def test_enumerate_on_complete_tree_sets(n):
    ts = complete_treeset(n)
    assert check_normal_form(ts) == []
    g = build_digraph(None, ts)
    roots, edges = skeleton(g)
    assert len(roots) == n and len(edges) == n * (n - 1)
    assert len(enumerate_ncycles(g)) == EXPECTED[n]


@pytest.mark.parametrize("seed", range(40))
def test_agreement_on_random_tree_sets(seed):
    doc, _, _ = parse_random_normal(seed)
    rep = check_soundness(doc)
    prior = check_prior_criterion(CheckContext.of(doc), rep.digraph)
    assert prior.sound == rep.sound
    distinct, total = redundancy_report(rep.digraph)
    assert distinct <= total
    assert distinct == len(rep.constraints)
