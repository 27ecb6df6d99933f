"""Normalisation of pre-proof tree-sets.

Three rewrites are applied until none fits:

* ``op1`` detaches the non-bud premise of a Subst step into its own tree and
  leaves a bud pointing at it;
* ``op2`` detaches a non-root companion, leaving ``Subst({})`` over a new bud;
* ``op3`` pads a bud whose parent is not a Subst step with ``Subst({})``.

Detached subtrees keep their node ids; nodes created in the original
position get ids derived from the original (``10`` gives ``10.1``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .rules import InductiveDefSet, Subst
from .terms import Substitution
from .treeset import ProofNode, ProofTreeSet, Tree, sorted_ids, validate_treeset


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class Operation:
    op: str
    node: str
    created: tuple[str, ...]

    def __str__(self):
        return f"{self.op} on {self.node}: created {', '.join(self.created)}"


EMPTY = Subst(Substitution())


def _tree_name(ts: ProofTreeSet, root: str) -> str:
    taken = {t.name for t in ts.trees}
    name = root
    k = 1
    while name in taken:
        name = f"{root}#{k}"
        k += 1
    return name


def _replace_child(nodes: dict, parent_id: str, old: str, new: str):
    p = nodes[parent_id]
    nodes[parent_id] = replace(p, children=tuple(new if c == old else c for c in p.children),
                               rule=_rename_branch(p.rule, old, new))


def _rename_branch(rule, old, new):
    branches = getattr(rule, "branches", None)
    if branches is None:
        return rule
    return replace(rule, branches=tuple(replace(b, child=new) if b.child == old else b
                                        for b in branches))


# --------------------------------------------------------------------------
# the three operations


def op1_targets(ts: ProofTreeSet) -> list[str]:
    out = []
    for n in ts:
        if isinstance(n.rule, Subst):
            out.extend(c for c in n.children if not ts[c].is_bud)
    return sorted_ids(out)


def op1_detach_subst_premise(ts: ProofTreeSet, node_id: str) -> tuple[ProofTreeSet, Operation]:
    parent = ts.parents.get(node_id)
    if parent is None or not isinstance(ts[parent].rule, Subst) or ts[node_id].is_bud:
        raise NormalizationError(f"op1 does not apply to node {node_id}")
    nodes = dict(ts.nodes)
    bud = ts.fresh_id(node_id)
    nodes[bud] = ProofNode(bud, ts[node_id].sequent, companion=node_id)
    _replace_child(nodes, parent, node_id, bud)
    trees = (*ts.trees, Tree(_tree_name(ts, node_id), node_id))
    return ts.with_nodes(nodes, trees), Operation("op1", node_id, (bud,))


def op2_targets(ts: ProofTreeSet) -> list[str]:
    roots = set(ts.roots)
    return sorted_ids(c for c in ts.companions() if c not in roots)


def op2_detach_companion(ts: ProofTreeSet, node_id: str) -> tuple[ProofTreeSet, Operation]:
    if node_id in ts.roots or node_id not in ts.companions():
        raise NormalizationError(f"op2 does not apply to node {node_id}")
    parent = ts.parents[node_id]
    nodes = dict(ts.nodes)
    seq = ts[node_id].sequent
    step = ts.fresh_id(node_id)
    bud = ts.fresh_id(node_id, {step})
    nodes[step] = ProofNode(step, seq, EMPTY, (bud,))
    nodes[bud] = ProofNode(bud, seq, companion=node_id)
    _replace_child(nodes, parent, node_id, step)
    trees = (*ts.trees, Tree(_tree_name(ts, node_id), node_id))
    return ts.with_nodes(nodes, trees), Operation("op2", node_id, (step, bud))


def op3_targets(ts: ProofTreeSet) -> list[str]:
    out = []
    for b in ts.buds():
        parent = ts.parents.get(b.id)
        if parent is None or not isinstance(ts[parent].rule, Subst):
            out.append(b.id)
    return out


def op3_pad_bud(ts: ProofTreeSet, bud_id: str) -> tuple[ProofTreeSet, Operation]:
    if bud_id not in op3_targets(ts):
        raise NormalizationError(f"op3 does not apply to node {bud_id}")
    old = ts[bud_id]
    nodes = dict(ts.nodes)
    new_bud = ts.fresh_id(bud_id)
    nodes[new_bud] = ProofNode(new_bud, old.sequent, companion=old.companion)
    nodes[bud_id] = ProofNode(bud_id, old.sequent, EMPTY, (new_bud,), tag=old.tag)
    return ts.with_nodes(nodes), Operation("op3", bud_id, (new_bud,))


def pending_measure(ts: ProofTreeSet) -> int:
    """Number of places an operation can still apply; each operation lowers it."""
    return len(op1_targets(ts)) + len(op2_targets(ts)) + len(op3_targets(ts))


# --------------------------------------------------------------------------
# driver


@dataclass(frozen=True)
class Normalized:
    proofs: ProofTreeSet
    log: tuple[Operation, ...]


def normalize_logged(ts: ProofTreeSet, phi: InductiveDefSet | None = None) -> Normalized:
    """Apply op2, op1 and op3 (in that order of preference) to a fixpoint.

    When ``phi`` is given the input is validated first.
    """
    if phi is not None:
        errors = [v for v in validate_treeset(phi, ts) if not v.warning]
        if errors:
            raise NormalizationError("; ".join(map(str, errors)))
    ts.check_references()
    log: list[Operation] = []
    bound = 3 * len(ts)
    while True:
        for targets, op in ((op2_targets, op2_detach_companion),
                            (op1_targets, op1_detach_subst_premise),
                            (op3_targets, op3_pad_bud)):
            found = targets(ts)
            if found:
                ts, entry = op(ts, found[0])
                log.append(entry)
                break
        else:
            return Normalized(ts, tuple(log))
        if len(log) > bound:
            raise NormalizationError(f"more than {bound} operations; giving up")


def normalize(ts: ProofTreeSet, phi: InductiveDefSet | None = None) -> ProofTreeSet:
    return normalize_logged(ts, phi).proofs


@dataclass(frozen=True)
class NormalFormViolation:
    clause: str
    node: str
    path: tuple[str, ...] = ()

    def __str__(self):
        where = f" on path {' → '.join(self.path)}" if self.path else ""
        return f"node {self.node}: {self.clause}{where}"


def check_normal_form(ts: ProofTreeSet) -> list[NormalFormViolation]:
    """Empty when ``ts`` is normal: every bud sits under a Subst step, every
    Subst premise is a bud and every companion is a root."""
    out = []
    for c in op2_targets(ts):
        out.append(NormalFormViolation("companion is not a root", c, tuple(ts.root_path(c))))
    for b in ts.buds():
        path = tuple(ts.root_path(b.id))
        parent = ts.parents.get(b.id)
        if parent is None or not isinstance(ts[parent].rule, Subst):
            out.append(NormalFormViolation("bud is not the premise of a Subst step", b.id, path))
        others = [n for n in path[:-1] if n in ts.parents and isinstance(ts[ts.parents[n]].rule, Subst)]
        for n in others:
            out.append(NormalFormViolation("rb-path has a second Subst premise", n, path))
    for n in op1_targets(ts):
        out.append(NormalFormViolation("Subst premise is not a bud", n, tuple(ts.root_path(n))))
    seen = set()
    uniq = []
    for v in out:
        key = (v.clause, v.node)
        if key not in seen:
            seen.add(key)
            uniq.append(v)
    return uniq
