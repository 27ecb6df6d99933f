"""Pre-proof tree-sets, measure and precedence declarations."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator

from .rules import Case, InductiveDefSet, RuleApp, Violation, validate_step
from .terms import Sequent


def id_key(node_id: str) -> tuple:
    """Sort key for node ids such as ``12`` and ``12.1``."""
    parts = []
    for p in node_id.split("."):
        parts.append((0, int(p), "") if p.isdigit() else (1, 0, p))
    return tuple(parts)


def sorted_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=id_key)


class ReferenceIntegrityError(ValueError):
    """Broken node references or bud/companion mismatches."""


@dataclass(frozen=True)
class ProofNode:
    id: str
    sequent: Sequent
    rule: RuleApp | None = None
    children: tuple[str, ...] = ()
    companion: str | None = None
    tag: str | None = None

    @property
    def is_bud(self) -> bool:
        return self.companion is not None

    @property
    def is_terminal(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Tree:
    name: str
    root: str


@dataclass(frozen=True, eq=False)
class ProofTreeSet:
    trees: tuple[Tree, ...]
    nodes: dict[str, ProofNode]

    def __eq__(self, other):
        if not isinstance(other, ProofTreeSet):
            return NotImplemented
        return self.trees == other.trees and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.trees)

    def __getitem__(self, node_id: str) -> ProofNode:
        return self.nodes[node_id]

    def __iter__(self) -> Iterator[ProofNode]:
        return iter(self.nodes.values())

    def __len__(self):
        return len(self.nodes)

    @cached_property
    def parents(self) -> dict[str, str]:
        out = {}
        for n in self.nodes.values():
            for c in n.children:
                out[c] = n.id
        return out

    @cached_property
    def tree_of(self) -> dict[str, str]:
        """Node id → root id of the tree containing it."""
        out = {}
        for t in self.trees:
            stack = [t.root]
            while stack:
                nid = stack.pop()
                out[nid] = t.root
                stack.extend(self.nodes[nid].children)
        return out

    @property
    def roots(self) -> list[str]:
        return [t.root for t in self.trees]

    def buds(self) -> list[ProofNode]:
        return [self.nodes[i] for i in sorted_ids(self.nodes) if self.nodes[i].is_bud]

    def companions(self) -> dict[str, list[str]]:
        """Companion id → bud ids pointing at it."""
        out: dict[str, list[str]] = {}
        for b in self.buds():
            out.setdefault(b.companion, []).append(b.id)
        return out

    def premises(self, node_id: str) -> list[Sequent]:
        return [self.nodes[c].sequent for c in self.nodes[node_id].children]

    def root_path(self, node_id: str) -> list[str]:
        path = [node_id]
        while path[-1] in self.parents:
            path.append(self.parents[path[-1]])
        return path[::-1]

    def fresh_id(self, base: str, taken: set[str] | None = None) -> str:
        taken = set(self.nodes) | (taken or set())
        k = 1
        while f"{base}.{k}" in taken:
            k += 1
        return f"{base}.{k}"

    def check_references(self) -> None:
        if len({t.root for t in self.trees}) != len(self.trees):
            raise ReferenceIntegrityError("two trees share a root")
        seen_child: set[str] = set()
        for n in self.nodes.values():
            if n.is_bud and n.children:
                raise ReferenceIntegrityError(f"bud {n.id} has children")
            if not n.is_bud and n.rule is None:
                raise ReferenceIntegrityError(f"node {n.id} has neither a rule nor a companion")
            for c in n.children:
                if c not in self.nodes:
                    raise ReferenceIntegrityError(f"node {n.id}: unknown child {c}")
                if c in seen_child:
                    raise ReferenceIntegrityError(f"node {c} has two parents")
                seen_child.add(c)
            if n.is_bud:
                comp = self.nodes.get(n.companion)
                if comp is None:
                    raise ReferenceIntegrityError(f"bud {n.id}: unknown companion {n.companion}")
                if comp.is_bud:
                    raise ReferenceIntegrityError(f"bud {n.id}: companion {n.companion} is itself a bud")
                if comp.sequent != n.sequent:
                    raise ReferenceIntegrityError(
                        f"bud {n.id} and companion {comp.id} are labelled differently")
        for t in self.trees:
            if t.root not in self.nodes:
                raise ReferenceIntegrityError(f"tree {t.name}: unknown root {t.root}")
            if t.root in seen_child:
                raise ReferenceIntegrityError(f"tree {t.name}: root {t.root} has a parent")
        placed = self.tree_of
        stray = set(self.nodes) - set(placed)
        if stray:
            raise ReferenceIntegrityError(f"nodes outside every tree: {', '.join(sorted_ids(stray))}")

    def with_nodes(self, nodes: dict[str, ProofNode], trees=None) -> "ProofTreeSet":
        return ProofTreeSet(tuple(trees if trees is not None else self.trees), nodes)


def validate_treeset(phi: InductiveDefSet, ts: ProofTreeSet) -> list[Violation]:
    """Every rule application in the tree-set, checked schema by schema."""
    out: list[Violation] = []
    for nid in sorted_ids(ts.nodes):
        n = ts.nodes[nid]
        if n.is_bud:
            continue
        if isinstance(n.rule, Case):
            listed = [b.child for b in n.rule.branches]
            if sorted(listed) != sorted(n.children):
                out.append(Violation(nid, "Case", "branch children differ from node children"))
                continue
            premises = [ts.nodes[c].sequent for c in listed]
        else:
            premises = ts.premises(nid)
        out.extend(validate_step(phi, n.sequent, n.rule, premises, node=nid))
    return out


# --------------------------------------------------------------------------
# measure and precedence declarations


@dataclass(frozen=True)
class MeasureRule:
    pattern: Sequent
    indices: tuple[int, ...]

    def __post_init__(self):
        n = len(self.pattern.iaas())
        for k in self.indices:
            if not 0 <= k < n:
                raise ValueError(f"measure index {k} out of range for {self.pattern} "
                                 f"({n} inductive antecedent atoms)")


@dataclass(frozen=True)
class MeasureSpec:
    rules: tuple[MeasureRule, ...] = ()


class PrecedenceError(ValueError):
    pass


@dataclass(frozen=True)
class PrecedenceSpec:
    """A strict partial order over symbols, declared as ``<`` chains."""

    chains: tuple[tuple[str, ...], ...] = ()
    status: dict[str, str] = field(default_factory=dict)

    @cached_property
    def greater(self) -> dict[str, frozenset[str]]:
        """symbol → symbols strictly below it (transitively closed)."""
        below: dict[str, set[str]] = {}
        for chain in self.chains:
            for lo, hi in zip(chain, chain[1:]):
                below.setdefault(hi, set()).add(lo)
                below.setdefault(lo, set())
        changed = True
        while changed:
            changed = False
            for los in below.values():
                extra = set()
                for lo in los:
                    extra |= below.get(lo, set())
                if not extra <= los:
                    los |= extra
                    changed = True
        for sym, los in below.items():
            if sym in los:
                raise PrecedenceError(f"precedence is cyclic through {sym}")
        return {k: frozenset(v) for k, v in below.items()}

    def gt(self, f: str, g: str) -> bool:
        return g in self.greater.get(f, frozenset())

    def status_of(self, sym: str) -> str:
        return self.status.get(sym, "mul")


@dataclass(frozen=True, eq=False)
class ProofDocument:
    """Everything a ``.proof`` file declares."""

    defs: InductiveDefSet
    proofs: ProofTreeSet
    measures: MeasureSpec = MeasureSpec()
    precedence: PrecedenceSpec = PrecedenceSpec()

    def __eq__(self, other):
        if not isinstance(other, ProofDocument):
            return NotImplemented
        return (self.defs == other.defs and self.proofs == other.proofs
                and self.measures == other.measures
                and self.precedence.chains == other.precedence.chains
                and self.precedence.status == other.precedence.status)

    __hash__ = None

    def with_proofs(self, proofs: ProofTreeSet) -> "ProofDocument":
        return replace(self, proofs=proofs)

