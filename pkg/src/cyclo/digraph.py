"""The annotated digraph of a normalised tree-set.

Forward arrows go from a conclusion to each premise, back-links from a
bud to its companion. Forward arrows out of a Gen step carry ``{x ↦ u}``;
out of a Case step whose branch generalises, the branch's generalisation
on top of the identity; out of Subst steps none; everything else the
identity on the free variables of the source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .normalizer import check_normal_form
from .rules import (
    Case, Cut, Gen, InductiveDefSet, StepError, Subst, Unfold, Violation, Wk, case_branch,
    validate_step,
)
from .terms import Sequent, Substitution, Var, apply_subst, compose, free_vars
from .treeset import ProofTreeSet, id_key, sorted_ids

FORWARD = "forward"
BACKLINK = "backlink"


class DigraphError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    source: str
    target: str
    kind: str
    annotation: Substitution | None = None


def _identity(seq: Sequent) -> Substitution:
    return Substitution.identity(sorted(free_vars(seq)))


def arrow_annotation(phi: InductiveDefSet, ts: ProofTreeSet, source: str, target: str
                     ) -> Substitution | None:
    n = ts[source]
    if isinstance(n.rule, Subst):
        return None
    if isinstance(n.rule, Gen):
        return Substitution({n.rule.var: n.rule.term})
    ident = _identity(n.sequent)
    if isinstance(n.rule, Case):
        branch = n.rule.branch_for(target)
        if branch.gen:
            info = case_branch(phi, n.sequent, n.rule.principal, branch, ts[target].sequent)
            return compose(ident, info.generalisation)
    return ident


@dataclass(frozen=True, eq=False)
class Digraph:
    phi: InductiveDefSet
    proofs: ProofTreeSet
    arrows: tuple[Arrow, ...]

    @cached_property
    def successors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {nid: [] for nid in self.proofs.nodes}
        for a in self.arrows:
            out[a.source].append(a.target)
        return out

    @cached_property
    def forward(self) -> dict[tuple[str, str], Arrow]:
        return {(a.source, a.target): a for a in self.arrows if a.kind == FORWARD}

    @property
    def nodes(self) -> list[str]:
        return sorted_ids(self.proofs.nodes)

    @cached_property
    def sccs(self) -> list[tuple[str, ...]]:
        return strongly_connected_components(self.nodes, self.successors)

    @cached_property
    def scc_of(self) -> dict[str, int]:
        return {n: i for i, comp in enumerate(self.sccs) for n in comp}

    def non_singleton_sccs(self) -> list[tuple[str, ...]]:
        out = []
        for comp in self.sccs:
            if len(comp) > 1 or comp[0] in self.successors[comp[0]]:
                out.append(comp)
        return out

    def backlinks(self) -> list[Arrow]:
        return [a for a in self.arrows if a.kind == BACKLINK]


def build_digraph(phi: InductiveDefSet, ts: ProofTreeSet, require_normal: bool = True) -> Digraph:
    if require_normal:
        bad = check_normal_form(ts)
        if bad:
            raise DigraphError("tree-set is not normalised: " + "; ".join(map(str, bad)))
    arrows = []
    for nid in sorted_ids(ts.nodes):
        n = ts[nid]
        if n.is_bud:
            arrows.append(Arrow(nid, n.companion, BACKLINK))
            continue
        for c in n.children:
            arrows.append(Arrow(nid, c, FORWARD, arrow_annotation(phi, ts, nid, c)))
    return Digraph(phi, ts, tuple(arrows))


def strongly_connected_components(nodes: list[str], succ: dict[str, list[str]]
                                  ) -> list[tuple[str, ...]]:
    """Tarjan's algorithm, iterative. Components are returned sorted by their
    smallest node id, each component sorted internally."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[tuple[str, ...]] = []
    counter = 0
    for start in nodes:
        if start in index:
            continue
        work = [(start, iter(succ.get(start, ())))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted_ids(comp)))
    comps.sort(key=lambda c: id_key(c[0]))
    return comps


# --------------------------------------------------------------------------
# rb-paths and cumulative substitutions


@dataclass(frozen=True)
class RbPath:
    nodes: tuple[str, ...]
    theta: Substitution
    scc: int

    @property
    def root(self) -> str:
        return self.nodes[0]

    @property
    def bud(self) -> str:
        return self.nodes[-1]

    @property
    def ih_node(self) -> str:
        return self.nodes[-2]


def rb_paths(g: Digraph, scc: tuple[str, ...] | int) -> list[RbPath]:
    """Root-to-bud paths whose root and bud both lie in ``scc``."""
    if isinstance(scc, int):
        idx = scc
    else:
        idx = g.scc_of[scc[0]]
    members = set(g.sccs[idx])
    ts = g.proofs
    out = []
    for b in ts.buds():
        if b.id not in members or ts.tree_of[b.id] not in members:
            continue
        path = tuple(ts.root_path(b.id))
        if len(path) < 2:
            continue
        out.append(RbPath(path, cumulative_subst(g, path), idx))
    return out


def all_rb_paths(g: Digraph) -> list[RbPath]:
    out = []
    for comp in g.non_singleton_sccs():
        out.extend(rb_paths(g, comp))
    out.sort(key=lambda p: id_key(p.bud))
    return out


def cumulative_subst(g: Digraph, path) -> Substitution:
    """``σ_id σ_1 ⋯ σ_{n-1}`` for a path ``[N1, …, Nn, B]``.

    The identity part ranges over the free variables of ``N1 … Nn``.
    """
    nodes = list(path)
    if len(nodes) < 2:
        raise DigraphError("an rb-path has at least a root and a bud")
    upto = nodes[:-1]
    ident_vars: set[str] = set()
    for nid in upto:
        ident_vars |= free_vars(g.proofs[nid].sequent)
    theta = Substitution.identity(sorted(ident_vars))
    for a, b in zip(upto, upto[1:]):
        arrow = g.forward.get((a, b))
        if arrow is None:
            raise DigraphError(f"no forward arrow {a} → {b}")
        if arrow.annotation is None:
            raise DigraphError(f"arrow {a} → {b} carries no substitution")
        theta = compose(theta, arrow.annotation)
    return theta


# --------------------------------------------------------------------------
# cumulative lists


@dataclass(frozen=True)
class StepCheck:
    node: str
    rule: str
    conclusion: Sequent
    premise: Sequent
    replaced_by_wk: bool
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not [v for v in self.violations if not v.warning]


@dataclass(frozen=True)
class CumulativeList:
    sequents: tuple[Sequent, ...]
    steps: tuple[StepCheck, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    @property
    def wk_replacements(self) -> list[str]:
        return [s.node for s in self.steps if s.replaced_by_wk]


def cumulative_list(g: Digraph, path) -> CumulativeList:
    """Instantiate each node of the path by the cumulative substitution of
    its suffix and check that the step from it still applies."""
    nodes = list(path)
    upto = nodes[:-1]
    ts = g.proofs
    n = len(upto)
    thetas = [cumulative_subst(g, nodes[i:]) for i in range(n - 1)] + [Substitution()]
    seqs = [apply_subst(ts[nid].sequent, th) for nid, th in zip(upto, thetas)]
    seqs.append(ts[nodes[-1]].sequent)
    steps = []
    for i in range(n - 1):
        nid = upto[i]
        node = ts[nid]
        concl, prem = seqs[i], seqs[i + 1]
        steps.append(_recheck(g.phi, ts, node, nodes[i + 1], concl, prem, thetas[i]))
    h = ts[upto[-1]]
    viol = tuple(validate_step(g.phi, h.sequent, h.rule, [ts[nodes[-1]].sequent], node=h.id))
    steps.append(StepCheck(h.id, h.rule.tag, h.sequent, ts[nodes[-1]].sequent, False, viol))
    return CumulativeList(tuple(seqs), tuple(steps))


def _recheck(phi, ts, node, child, concl, prem, theta) -> StepCheck:
    rule = node.rule
    nid = node.id
    if isinstance(rule, Gen):
        principal = apply_subst(rule.principal, theta)
        if principal.lhs == principal.rhs:
            viol = validate_step(phi, concl, Wk((principal,)), [prem], node=nid, instance=True)
            return StepCheck(nid, "Wk", concl, prem, True, tuple(viol))
        if isinstance(principal.lhs, Var):
            inst = Gen(principal.lhs.name, principal.rhs)
            viol = validate_step(phi, concl, inst, [prem], node=nid, instance=True)
        else:
            viol = [Violation(nid, "Gen", f"instance {principal} has no variable to generalise")]
        return StepCheck(nid, "Gen", concl, prem, False, tuple(viol))
    if isinstance(rule, Case):
        branch = rule.branch_for(child)
        principal = apply_subst(rule.principal, theta)
        try:
            info = case_branch(phi, concl, principal, branch, prem, instance=True)
        except StepError as exc:
            return StepCheck(nid, "Case", concl, prem, False, (Violation(nid, "Case", str(exc)),))
        return StepCheck(nid, "Case", concl, prem, bool(info.weakened))
    premises = []
    for c in node.children:
        premises.append(prem if c == child else apply_subst(ts[c].sequent, theta))
    if isinstance(rule, Wk):
        rule = Wk(tuple(apply_subst(f, theta) for f in rule.formulas))
    else:
        rule = _instantiate_rule(rule, theta)
    viol = validate_step(phi, concl, rule, premises, node=nid, instance=True)
    return StepCheck(nid, rule.tag, concl, prem, False, tuple(viol))


def _instantiate_rule(rule, theta):
    if isinstance(rule, Cut):
        return Cut(apply_subst(rule.formula, theta))
    if isinstance(rule, Unfold):
        return Unfold(rule.axiom, apply_subst(rule.principal, theta))
    return rule


# --------------------------------------------------------------------------
# DOT export


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g: Digraph) -> str:
    ts = g.proofs
    lines = ["digraph proof {", "  node [shape=box];"]
    for nid in g.nodes:
        label = f"{nid}: {ts[nid].sequent}"
        lines.append(f'  "{nid}" [label="{_dot_escape(label)}"];')
    for a in g.arrows:
        if a.kind == BACKLINK:
            lines.append(f'  "{a.source}" -> "{a.target}" [style=dashed];')
        elif a.annotation is None:
            lines.append(f'  "{a.source}" -> "{a.target}";')
        else:
            label = _dot_escape(_subst_label(a.annotation))
            lines.append(f'  "{a.source}" -> "{a.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _subst_label(s: Substitution) -> str:
    proper = s.proper()
    if not proper:
        return "id"
    return str(Substitution(proper))
