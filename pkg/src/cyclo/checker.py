"""Traces, ordering-derivability and the soundness verdict.

A constraint is issued for every rb-path of every non-singleton SCC: the
sequent of its IH-node must be derivable, in the ordering sense, from the
root sequent instantiated by the path's cumulative substitution.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .digraph import Digraph, DigraphError, RbPath, all_rb_paths, build_digraph
from .normalizer import NormalizationError, Operation, check_normal_form, normalize_logged
from .ordering import OrderingContext
from .proof_format import formula_sx, subst_sx
from .rules import Case, Gen, Generic, InductiveDefSet, RuleApp, StepError, Subst, case_branch
from .terms import Atom, Sequent, Substitution, apply_subst, match_sequent
from .treeset import (
    MeasureSpec, ProofDocument, ProofTreeSet, ReferenceIntegrityError, id_key, validate_treeset,
)


class TraceError(ValueError):
    """A step along the path does not say how traces continue."""


class StageError(ValueError):
    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"{stage}: {message}")


# --------------------------------------------------------------------------
# trace graphs


Vertex = tuple[int, int]  # (position in path, IAA occurrence index)

SAME = "same"          # b ≡ a
FORWARD = "forward"    # b ≡ a[s]
BACKWARD = "backward"  # b[s] ≡ a
PROGRESS = "progress"  # b is a case descendant of the principal a


@dataclass(frozen=True)
class TraceEdge:
    target: Vertex
    relation: str
    subst: Substitution = Substitution()

    @property
    def progress(self) -> bool:
        return self.relation == PROGRESS


@dataclass(frozen=True, eq=False)
class TraceGraph:
    path: tuple[str, ...]
    sequents: tuple[Sequent, ...]
    # rule applied at each position; None for a bud (its step is the back-link)
    rules: tuple[RuleApp | None, ...]
    edges: dict[Vertex, tuple[TraceEdge, ...]]

    def iaas(self, pos: int) -> list[Atom]:
        return self.sequents[pos].iaas()

    def atom(self, v: Vertex) -> Atom:
        return self.iaas(v[0])[v[1]]

    def out(self, v: Vertex) -> tuple[TraceEdge, ...]:
        return self.edges.get(v, ())


def _related(relation: str, s: Substitution, a: Atom, b: Atom) -> bool:
    if relation == SAME:
        return a == b
    if relation == FORWARD:
        return b == apply_subst(a, s)
    return apply_subst(b, s) == a


def _step_edges(phi: InductiveDefSet, ts: ProofTreeSet, src: str, dst: str):
    """Yield ``(i, j, relation, subst)`` for one step of a path."""
    n = ts[src]
    a_list = n.sequent.iaas()
    b_list = ts[dst].sequent.iaas()
    relation, sub = SAME, Substitution()
    if n.is_bud:
        if n.companion != dst:
            raise TraceError(f"{src} → {dst} is neither an arrow nor a back-link")
    else:
        if dst not in n.children:
            raise TraceError(f"{dst} is not a premise of {src}")
        rule = n.rule
        if isinstance(rule, Subst):
            relation, sub = BACKWARD, rule.sigma
        elif isinstance(rule, Gen):
            relation, sub = FORWARD, Substitution({rule.var: rule.term})
        elif isinstance(rule, Case):
            yield from _case_edges(phi, ts, n, dst, a_list, b_list)
            return
        elif isinstance(rule, Generic) and not rule.trace_preserving:
            raise TraceError(f"node {src}: rule {rule.name} does not preserve traces")
    for i, a in enumerate(a_list):
        for j, b in enumerate(b_list):
            if _related(relation, sub, a, b):
                yield i, j, relation, sub


def _case_edges(phi, ts, n, dst, a_list, b_list):
    rule = n.rule
    branch = rule.branch_for(dst)
    try:
        info = case_branch(phi, n.sequent, rule.principal, branch, ts[dst].sequent)
    except StepError as exc:
        raise TraceError(f"node {n.id}: {exc}") from None
    principal_at = a_list.index(rule.principal)
    gen = info.generalisation
    for i, a in enumerate(a_list):
        for j, b in enumerate(b_list):
            if i == principal_at:
                if b in info.descendants:
                    yield i, j, PROGRESS, Substitution()
            elif b == apply_subst(a, gen):
                yield i, j, FORWARD, gen


def trace_graph(phi: InductiveDefSet, ts: ProofTreeSet, path) -> TraceGraph:
    path = tuple(path)
    edges: dict[Vertex, list[TraceEdge]] = {}
    for pos, (src, dst) in enumerate(zip(path, path[1:])):
        for i, j, relation, sub in _step_edges(phi, ts, src, dst):
            edges.setdefault((pos, i), []).append(TraceEdge((pos + 1, j), relation, sub))
    return TraceGraph(path, tuple(ts[nid].sequent for nid in path),
                      tuple(ts[nid].rule for nid in path),
                      {k: tuple(v) for k, v in edges.items()})


@dataclass(frozen=True)
class Derivation:
    """Whether one occurrence derives from another, with a witness."""

    reachable: bool
    min_progress: int | None = None
    reachable_targets: int = 0
    witness: tuple[Vertex, ...] = ()


def derives_from(tg: TraceGraph, source: Vertex, target: Vertex,
                 among: set[int] | None = None) -> Derivation:
    """Reachability from ``source`` to ``target`` along trace edges.

    ``reachable_targets`` counts the occurrences at the target's position
    reachable from ``source``, restricted to ``among`` when given. The
    witness is a trace with the fewest progress points.
    """
    i, j = source[0], target[0]
    if i >= j:
        return Derivation(False)
    best: dict[Vertex, tuple[int, Vertex | None]] = {source: (0, None)}
    layer = {source: (0, None)}
    for _ in range(i, j):
        nxt: dict[Vertex, tuple[int, Vertex | None]] = {}
        for v in sorted(layer):
            cost = best[v][0]
            for e in tg.out(v):
                c = cost + e.progress
                if e.target not in nxt or c < nxt[e.target][0]:
                    nxt[e.target] = (c, v)
        best.update(nxt)
        layer = nxt
    at_end = [v for v in layer if among is None or v[1] in among]
    if target not in layer:
        return Derivation(False, reachable_targets=len(at_end))
    path = [target]
    while best[path[-1]][1] is not None:
        path.append(best[path[-1]][1])
    return Derivation(True, best[target][0], len(at_end), tuple(reversed(path)))


def trace_atoms(tg: TraceGraph, witness) -> tuple[Atom, ...]:
    return tuple(tg.atom(v) for v in witness)


def changes_only_at_progress(tg: TraceGraph, witness) -> bool:
    """Consecutive atoms of a trace differ, beyond the step's own
    substitution, only at progress points of Case steps."""
    for a, b in zip(witness, witness[1:]):
        edge = next(e for e in tg.out(a) if e.target == b)
        if edge.progress:
            if not isinstance(tg.rules[a[0]], Case):
                return False
        elif not _related(edge.relation, edge.subst, tg.atom(a), tg.atom(b)):
            return False
    return True


# --------------------------------------------------------------------------
# measures


def measure_occurrences(ms: MeasureSpec, s: Sequent) -> tuple[int, ...]:
    """IAA occurrence indices chosen by the first matching measure rule,
    or all of them."""
    positions = s.iaa_positions()
    for rule in ms.rules:
        pat_positions = rule.pattern.iaa_positions()
        for _, left, _ in match_sequent(rule.pattern, s):
            return tuple(positions.index(left[pat_positions[k]]) for k in rule.indices)
    return tuple(range(len(positions)))


def measure_of(ms: MeasureSpec, s: Sequent) -> list[Atom]:
    iaas = s.iaas()
    return [iaas[k] for k in measure_occurrences(ms, s)]


# --------------------------------------------------------------------------
# ordering-derivability


STRICT = "strict-decrease"
UNIQUE = "cancellation-uniqueness"
DOMINATED = "residual-dominated"


@dataclass(frozen=True)
class Pair:
    """A measured atom of the source side matched with one of the target side."""

    source: int
    target: int
    larger: Atom
    smaller: Atom
    trace: tuple[Atom, ...] = ()
    progress: int | None = None


@dataclass(frozen=True)
class DerivabilityResult:
    ok: bool
    measure_from: tuple[Atom, ...]
    measure_to: tuple[Atom, ...]
    cancelled: tuple[Pair, ...] = ()
    dominated: tuple[Pair, ...] = ()
    clause: str | None = None
    detail: str = ""

    @property
    def residual_from(self) -> tuple[Atom, ...]:
        return _residual(self.measure_from, [p.larger for p in self.cancelled])

    @property
    def residual_to(self) -> tuple[Atom, ...]:
        return _residual(self.measure_to, [p.smaller for p in self.cancelled])


def _residual(ms, gone):
    rest = Counter(ms) - Counter(gone)
    out = []
    for a in ms:
        if rest[a]:
            out.append(a)
            rest[a] -= 1
    return tuple(out)


@dataclass(frozen=True)
class CheckContext:
    phi: InductiveDefSet
    measures: MeasureSpec = MeasureSpec()
    ordering: OrderingContext = field(default_factory=OrderingContext)

    @classmethod
    def of(cls, doc: ProofDocument) -> "CheckContext":
        return cls(doc.defs, doc.measures, OrderingContext(doc.precedence))


def _matching(edges: dict[int, list[int]]) -> dict[int, int]:
    """Maximum bipartite matching (left → right) by augmenting paths."""
    match_right: dict[int, int] = {}

    def augment(u, seen):
        for v in edges[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in sorted(edges):
        augment(u, set())
    return {u: v for v, u in match_right.items()}


def _unique(d: Derivation) -> bool:
    return d.reachable and d.reachable_targets == 1


def pi_derivable(ctx: CheckContext, tg: TraceGraph, i: int, theta: Substitution,
                 j: int, delta: Substitution) -> DerivabilityResult:
    """Is ``S(path[j])[delta]`` ordering-derivable from ``S(path[i])[theta]``?

    Measures are selected on the node sequents and then instantiated, and
    derivability is read on the uninstantiated occurrences.
    """
    occ_from = measure_occurrences(ctx.measures, tg.sequents[i])
    occ_to = measure_occurrences(ctx.measures, tg.sequents[j])
    a_from = [apply_subst(tg.iaas(i)[k], theta) for k in occ_from]
    a_to = [apply_subst(tg.iaas(j)[k], delta) for k in occ_to]
    among = set(occ_to)
    derivs = {(k, l): derives_from(tg, (i, k), (j, l), among) for k in occ_from for l in occ_to}

    def d(p, q) -> Derivation:
        return derivs[(occ_from[p], occ_to[q])]

    # pairwise deletion of common atoms; among the possible pairings prefer
    # one whose pairs satisfy the uniqueness clause
    cancelled: list[tuple[int, int]] = []
    for atom in dict.fromkeys(a_from):
        fs = [p for p, a in enumerate(a_from) if a == atom]
        qs = [q for q, a in enumerate(a_to) if a == atom]
        c = min(len(fs), len(qs))
        if not c:
            continue
        m = _matching({p: [q for q in qs if _unique(d(p, q))] for p in fs})
        chosen = sorted(m.items())[:c]
        left = [p for p in fs if p not in {p for p, _ in chosen}]
        right = [q for q in qs if q not in {q for _, q in chosen}]
        chosen += list(zip(left, right))[: c - len(chosen)]
        cancelled.extend(sorted(chosen))

    def pair(p, q) -> Pair:
        w = d(p, q)
        return Pair(occ_from[p], occ_to[q], a_from[p], a_to[q],
                    trace_atoms(tg, w.witness), w.min_progress)

    base = dict(measure_from=tuple(a_from), measure_to=tuple(a_to),
                cancelled=tuple(pair(p, q) for p, q in cancelled))
    res_from = [p for p in range(len(a_from)) if p not in {p for p, _ in cancelled}]
    res_to = [q for q in range(len(a_to)) if q not in {q for _, q in cancelled}]

    if not res_from:
        return DerivabilityResult(False, **base, clause=STRICT,
                                  detail="every measured atom cancels, so nothing decreases")
    for p, q in cancelled:
        if not _unique(d(p, q)):
            return DerivabilityResult(
                False, **base, clause=UNIQUE,
                detail=f"{a_to[q]} is not the only measured atom deriving from {a_from[p]}")
    dominated = []
    for q in res_to:
        found = next((p for p in res_from
                      if d(p, q).reachable and ctx.ordering.rpo_greater(a_from[p], a_to[q])),
                     None)
        if found is None:
            return DerivabilityResult(
                False, **base, clause=DOMINATED,
                detail=f"{a_to[q]} derives from no larger measured atom")
        dominated.append(pair(found, q))
    if not ctx.ordering.multiset_less(a_to, a_from):
        raise AssertionError("derivability witness without a strict multiset decrease")
    return DerivabilityResult(True, **base, dominated=tuple(dominated))


# --------------------------------------------------------------------------
# constraints and the verdict


@dataclass(frozen=True)
class Constraint:
    bud: str
    path: tuple[str, ...]
    theta: Substitution
    result: DerivabilityResult

    @property
    def root(self) -> str:
        return self.path[0]

    @property
    def ih_node(self) -> str:
        return self.path[-2]

    @property
    def discharged(self) -> bool:
        return self.result.ok


def ih_discharged(ctx: CheckContext, g: Digraph, rb: RbPath) -> Constraint:
    """Check the IH of one rb-path; traces stop at the IH-node."""
    ts = g.proofs
    h, b = ts[rb.ih_node], ts[rb.bud]
    if not isinstance(h.rule, Subst) or apply_subst(b.sequent, h.rule.sigma) != h.sequent:
        raise DigraphError(f"IH-node {h.id} is not a Subst step over bud {b.id}")
    tg = trace_graph(ctx.phi, ts, rb.nodes[:-1])
    res = pi_derivable(ctx, tg, 0, rb.theta, len(rb.nodes) - 2, Substitution())
    return Constraint(rb.bud, rb.nodes, rb.theta, res)


@dataclass(frozen=True)
class SoundnessReport:
    sound: bool
    constraints: tuple[Constraint, ...]
    proofs: ProofTreeSet
    digraph: Digraph
    normalization: tuple[Operation, ...] = ()

    @property
    def verdict(self) -> str:
        return "SOUND" if self.sound else "UNSOUND"

    @property
    def discharged(self) -> int:
        return sum(c.discharged for c in self.constraints)

    def summary(self) -> str:
        return f"{self.verdict} ({len(self.constraints)} constraints, {self.discharged} discharged)"

    def failures(self) -> list[Constraint]:
        return [c for c in self.constraints if not c.discharged]


def prepare(doc: ProofDocument) -> tuple[ProofTreeSet, tuple[Operation, ...], Digraph]:
    """Validation, normalisation and digraph construction, with stage names
    attached to any error."""
    ts = doc.proofs
    try:
        ts.check_references()
    except ReferenceIntegrityError as exc:
        raise StageError("validate", str(exc)) from None
    errors = [v for v in validate_treeset(doc.defs, ts) if not v.warning]
    if errors:
        raise StageError("validate", "; ".join(map(str, errors)))
    try:
        norm = normalize_logged(ts)
    except NormalizationError as exc:
        raise StageError("normalize", str(exc)) from None
    bad = check_normal_form(norm.proofs)
    if bad:
        raise StageError("normalize", "; ".join(map(str, bad)))
    try:
        g = build_digraph(doc.defs, norm.proofs)
    except (DigraphError, StepError) as exc:
        raise StageError("digraph", str(exc)) from None
    return norm.proofs, norm.log, g


def check_soundness(doc: ProofDocument, jobs: int = 1) -> SoundnessReport:
    ts, log, g = prepare(doc)
    ctx = CheckContext.of(doc)
    paths = all_rb_paths(g)

    def run(rb):
        return ih_discharged(ctx, g, rb)

    try:
        if jobs > 1 and len(paths) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                constraints = list(pool.map(run, paths))
        else:
            constraints = [run(rb) for rb in paths]
    except (TraceError, DigraphError) as exc:
        raise StageError("check", str(exc)) from None
    constraints.sort(key=lambda c: id_key(c.bud))
    in_cycles = {n for comp in g.non_singleton_sccs() for n in comp}
    expected = sum(1 for b in ts.buds() if b.id in in_cycles)
    if len(constraints) != expected:
        raise AssertionError(f"{len(constraints)} constraints for {expected} buds in cycles")
    sound = all(c.discharged for c in constraints)
    return SoundnessReport(sound, tuple(constraints), ts, g, log)


# --------------------------------------------------------------------------
# reports


def _ms(atoms) -> str:
    return "{" + ", ".join(map(str, atoms)) + "}"


def format_constraint(c: Constraint) -> list[str]:
    r = c.result
    status = "discharged" if r.ok else f"FAILED ({r.clause}: {r.detail})"
    lines = [f"bud {c.bud}: S({c.ih_node}) from S({c.root}){_proper(c.theta)} "
             f"along {' → '.join(c.path)}: {status}",
             f"  A = {_ms(r.measure_from)}   A_IH = {_ms(r.measure_to)}"]
    for p in r.cancelled:
        lines.append(f"  cancelled {p.smaller} against {p.larger}")
    for p in r.dominated:
        lines.append(f"  {p.smaller} < {p.larger} via trace [{', '.join(map(str, p.trace))}]")
    return lines


def _proper(s: Substitution) -> str:
    return str(Substitution(s.proper()))


def format_report(rep: SoundnessReport) -> str:
    lines = [rep.summary()]
    for op in rep.normalization:
        lines.append(f"normalize: {op}")
    sccs = [c for c in rep.digraph.non_singleton_sccs()]
    lines.append("non-singleton SCCs: " + ("; ".join("{" + ", ".join(c) + "}" for c in sccs)
                                           if sccs else "none"))
    for c in rep.constraints:
        lines.extend(format_constraint(c))
    if rep.sound:
        for root in rep.proofs.roots:
            lines.append(f"true: {root}: {rep.proofs[root].sequent}")
    return "\n".join(lines) + "\n"


def report_sexpr(rep: SoundnessReport) -> list:
    out = ["report", ["verdict", rep.verdict], ["constraints", str(len(rep.constraints))],
           ["discharged", str(rep.discharged)]]
    for c in rep.constraints:
        r = c.result
        entry = ["constraint", ["bud", c.bud], ["path", *c.path], ["ih", c.ih_node],
                 ["theta", subst_sx(Substitution(c.theta.proper()))],
                 ["measure-root", [formula_sx(a) for a in r.measure_from]],
                 ["measure-ih", [formula_sx(a) for a in r.measure_to]],
                 ["status", "discharged" if r.ok else "failed"]]
        if not r.ok:
            entry.append(["clause", r.clause])
        for p in r.cancelled:
            entry.append(["cancelled", formula_sx(p.larger), formula_sx(p.smaller)])
        for p in r.dominated:
            entry.append(["pair", formula_sx(p.larger), formula_sx(p.smaller),
                          ["trace", *[formula_sx(a) for a in p.trace]]])
        out.append(entry)
    return out
