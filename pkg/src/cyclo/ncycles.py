"""Constraints per n-cycle, the older way of issuing them.

An n-cycle chains n root-to-bud paths, each bud's companion being the root
of the next path, with no root repeated. On a normalised tree-set every
companion is a root, so n-cycles are simple cycles of the multigraph whose
vertices are roots and whose edges are buds.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from .checker import CheckContext, Constraint, ih_discharged
from .digraph import Digraph, RbPath, cumulative_subst
from .rules import Generic, Subst
from .terms import Atom, Sequent, Substitution
from .treeset import ProofNode, ProofTreeSet, Tree, id_key, sorted_ids


@dataclass(frozen=True)
class NCycle:
    paths: tuple[RbPath, ...]

    @property
    def buds(self) -> tuple[str, ...]:
        return tuple(p.bud for p in self.paths)

    def __len__(self):
        return len(self.paths)


def skeleton(g: Digraph) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Roots and ``(root, companion root, bud)`` edges."""
    ts = g.proofs
    roots = sorted_ids(ts.roots)
    edges = []
    for b in ts.buds():
        edges.append((ts.tree_of[b.id], ts.tree_of[b.companion], b.id))
    return roots, edges


def simple_cycles(vertices: list[str], edges: list[tuple[str, str, str]]) -> list[tuple[str, ...]]:
    """Every simple cycle of a multigraph, as a tuple of edge labels.

    Each cycle is reported once, starting at its smallest vertex; parallel
    edges give distinct cycles.
    """
    rank = {v: k for k, v in enumerate(vertices)}
    out_edges: dict[str, list[tuple[str, str]]] = {v: [] for v in vertices}
    for src, dst, label in edges:
        out_edges[src].append((dst, label))
    for v in out_edges:
        out_edges[v].sort(key=lambda e: (rank[e[0]], id_key(e[1])))
    cycles: list[tuple[str, ...]] = []
    for start in vertices:
        lo = rank[start]
        stack = [(start, iter(out_edges[start]))]
        on_path = {start}
        labels: list[str] = []
        while stack:
            v, it = stack[-1]
            step = next(it, None)
            if step is None:
                stack.pop()
                on_path.discard(v)
                if labels:
                    labels.pop()
                continue
            w, label = step
            if w == start:
                cycles.append((*labels, label))
            elif rank[w] > lo and w not in on_path:
                on_path.add(w)
                labels.append(label)
                stack.append((w, iter(out_edges[w])))
    return cycles


def enumerate_ncycles(g: Digraph) -> list[NCycle]:
    ts = g.proofs
    roots, edges = skeleton(g)
    out = []
    for buds in simple_cycles(roots, edges):
        paths = []
        for b in buds:
            nodes = tuple(ts.root_path(b))
            paths.append(RbPath(nodes, cumulative_subst(g, nodes), g.scc_of[b]))
        out.append(NCycle(tuple(paths)))
    return out


@dataclass(frozen=True)
class PriorReport:
    sound: bool
    cycles: tuple[tuple[NCycle, tuple[Constraint, ...]], ...]

    @property
    def instances(self) -> int:
        return sum(len(cs) for _, cs in self.cycles)

    def failing(self) -> list[Constraint]:
        return [c for _, cs in self.cycles for c in cs if not c.discharged]


def check_prior_criterion(ctx: CheckContext, g: Digraph) -> PriorReport:
    """Every n-cycle must discharge the IH of each of its paths.

    Constraints are recomputed per cycle, so a path shared by several
    cycles is checked once for each of them.
    """
    cycles = []
    for cyc in enumerate_ncycles(g):
        cycles.append((cyc, tuple(ih_discharged(ctx, g, p) for p in cyc.paths)))
    sound = all(c.discharged for _, cs in cycles for c in cs)
    return PriorReport(sound, tuple(cycles))


def redundancy_report(g: Digraph) -> tuple[int, int]:
    """(distinct rb-path constraints, constraint instances over all n-cycles)."""
    cycles = enumerate_ncycles(g)
    distinct = {b for c in cycles for b in c.buds}
    return len(distinct), sum(len(c) for c in cycles)


def complete_digraph_cycle_count(n: int) -> int:
    """Simple cycles of length ≥ 2 in the complete digraph on ``n`` nodes."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return sum(comb(n, k) * factorial(k - 1) for k in range(2, n + 1))


def complete_treeset(n: int) -> ProofTreeSet:
    """A normal tree-set whose root skeleton is the complete digraph on ``n``
    roots: root ``j`` has one Subst premise per other root, closed by a bud."""
    roots = [f"{j}" for j in range(1, n + 1)]
    seq = {r: Sequent((), (Atom(f"S{r}"),)) for r in roots}
    nodes: dict[str, ProofNode] = {}
    trees = []
    for r in roots:
        kids = []
        for other in roots:
            if other == r:
                continue
            step, bud = f"{r}.{other}", f"{r}.{other}.1"
            nodes[step] = ProofNode(step, seq[other], Subst(Substitution()), (bud,))
            nodes[bud] = ProofNode(bud, seq[other], companion=other)
            kids.append(step)
        nodes[r] = ProofNode(r, seq[r], Generic("split", True), tuple(kids))
        trees.append(Tree(r, r))
    return ProofTreeSet(tuple(trees), nodes)
