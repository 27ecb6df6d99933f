"""Inductive definition sets, rule applications and step validation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Union

from .terms import (
    Atom, Eq, Exists, Forall, Formula, INDUCTIVE, ORDINARY, Sequent, Signature,
    Substitution, Var, apply_subst, compose, free_vars, fresh_name, is_submultiset,
    match, match_sequent, multiset_minus, occurs, variables_in_order,
)


class DefinitionError(ValueError):
    pass


@dataclass(frozen=True)
class Axiom:
    """``Q_1(ū_1) ∧ … ∧ P_1(t̄_1) ∧ … ⇒ P(t̄)``."""

    name: str
    ordinary_atoms: tuple[Atom, ...]
    inductive_atoms: tuple[Atom, ...]
    head: Atom

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in (self.head, *self.ordinary_atoms, *self.inductive_atoms):
            for v in variables_in_order(a):
                seen.setdefault(v)
        return list(seen)


@dataclass(frozen=True)
class InductiveDefSet:
    signature: Signature
    axioms: tuple[Axiom, ...] = ()
    # ground extensions of ordinary predicates, used only by the semantics oracle
    ordinary_extensions: dict[str, frozenset[tuple]] = field(default_factory=dict)

    def __post_init__(self):
        names = [a.name for a in self.axioms]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise DefinitionError(f"duplicate axiom name(s): {', '.join(sorted(dup))}")
        for ax in self.axioms:
            head = self.signature.symbols.get(ax.head.pred)
            if head is None or head.kind != INDUCTIVE:
                raise DefinitionError(f"axiom {ax.name}: head {ax.head.pred} is not inductive")
            for a in ax.inductive_atoms:
                if not self.signature.is_inductive(a.pred):
                    raise DefinitionError(f"axiom {ax.name}: {a.pred} is not inductive")
            for a in ax.ordinary_atoms:
                sym = self.signature.symbols.get(a.pred)
                if sym is None or sym.kind != ORDINARY:
                    raise DefinitionError(f"axiom {ax.name}: {a.pred} is not ordinary")

    def axiom(self, name: str) -> Axiom:
        for ax in self.axioms:
            if ax.name == name:
                return ax
        raise DefinitionError(f"unknown axiom {name!r}")

    def defining(self, pred: str) -> list[Axiom]:
        return [ax for ax in self.axioms if ax.head.pred == pred]


# --------------------------------------------------------------------------
# rule applications


@dataclass(frozen=True)
class Subst:
    sigma: Substitution

    tag = "Subst"


@dataclass(frozen=True)
class Gen:
    var: str
    term: object  # Term

    tag = "Gen"

    @property
    def principal(self) -> Eq:
        return Eq(Var(self.var), self.term)


@dataclass(frozen=True)
class Branch:
    axiom: str
    child: str
    # the branch's equations are eliminated by Gen within the same step
    gen: bool = False


@dataclass(frozen=True)
class Case:
    principal: Atom
    branches: tuple[Branch, ...]

    tag = "Case"

    def branch_for(self, child: str) -> Branch:
        for b in self.branches:
            if b.child == child:
                return b
        raise KeyError(child)


@dataclass(frozen=True)
class Unfold:
    axiom: str
    principal: Atom

    tag = "Unfold"


@dataclass(frozen=True)
class Wk:
    formulas: tuple[Formula, ...]

    tag = "Wk"


@dataclass(frozen=True)
class Cut:
    formula: Formula

    tag = "Cut"


@dataclass(frozen=True)
class Ax:
    tag = "Ax"


@dataclass(frozen=True)
class AllR:
    vars: tuple[str, ...]

    tag = "AllR"


@dataclass(frozen=True)
class ExL:
    vars: tuple[str, ...]

    tag = "ExL"


@dataclass(frozen=True)
class Generic:
    name: str
    trace_preserving: bool

    tag = "Generic"


RuleApp = Union[Subst, Gen, Case, Unfold, Wk, Cut, Ax, AllR, ExL, Generic]


@dataclass(frozen=True)
class Violation:
    node: str | None
    rule: str
    clause: str
    warning: bool = False

    def __str__(self):
        where = f"node {self.node}" if self.node is not None else "step"
        kind = "warning" if self.warning else "violation"
        return f"{where}: {self.rule} {kind}: {self.clause}"


# --------------------------------------------------------------------------
# case distinctions and unfolding


@dataclass(frozen=True)
class CaseDistinction:
    axiom: str
    equations: tuple[Eq, ...]
    ordinary_atoms: tuple[Atom, ...]
    descendants: tuple[Atom, ...]
    renaming: Substitution


def _rename_axiom(ax: Axiom, avoid: Iterable[str]) -> Substitution:
    taken = set(avoid)
    ren = {}
    for v in ax.variables():
        nv = fresh_name(v, taken)
        taken.add(nv)
        ren[v] = Var(nv)
    return Substitution(ren)


def case_distinctions(phi: InductiveDefSet, principal: Atom, avoid: Iterable[str]
                      ) -> list[CaseDistinction]:
    """One case per axiom defining the principal's predicate.

    Axiom variables are renamed apart from ``avoid``.
    """
    if not phi.signature.is_inductive(principal.pred):
        raise DefinitionError(f"{principal.pred} is not an inductive predicate")
    axioms = phi.defining(principal.pred)
    if not axioms:
        raise DefinitionError(f"no axiom defines {principal.pred}")
    avoid = set(avoid)
    out = []
    for ax in axioms:
        ren = _rename_axiom(ax, avoid)
        head = apply_subst(ax.head, ren)
        eqs = tuple(Eq(l, r) for l, r in zip(principal.args, head.args))
        out.append(CaseDistinction(
            ax.name, eqs,
            tuple(apply_subst(a, ren) for a in ax.ordinary_atoms),
            tuple(apply_subst(a, ren) for a in ax.inductive_atoms),
            ren))
    return out


class NoMatch(DefinitionError):
    pass


def unfold_premises(phi: InductiveDefSet, axiom_name: str, gamma: tuple, principal: Atom,
                    delta: tuple) -> list[Sequent]:
    """Premises of unfolding ``principal`` (in the succedent) with an axiom.

    Body variables that do not occur in the head are kept as they are.
    """
    ax = phi.axiom(axiom_name)
    sigma = match(ax.head, principal, pattern_vars=frozenset(ax.variables()))
    if sigma is None:
        raise NoMatch(f"{principal} is not an instance of the head of {axiom_name}")
    return [Sequent(tuple(gamma), (apply_subst(a, sigma), *delta))
            for a in (*ax.ordinary_atoms, *ax.inductive_atoms)]


# --------------------------------------------------------------------------
# validation


def _placeholder(v: str) -> str:
    return "?" + v


@dataclass(frozen=True)
class BranchInfo:
    """How one Case premise was obtained from its conclusion."""

    axiom: str
    # placeholder ↦ actual term for each (renamed) axiom variable that survived
    renaming: Substitution
    descendants: tuple[Atom, ...]
    # what Gen did to the conclusion's own variables, when the branch generalises
    generalisation: Substitution
    # equations whose instances became trivial and were dropped as by Wk
    weakened: tuple[Eq, ...] = ()


class StepError(Exception):
    pass


def _generalise(eqs: tuple[Eq, ...], placeholders: frozenset[str]) -> Substitution:
    acc = Substitution()
    for eq in eqs:
        l, r = apply_subst(eq.lhs, acc), apply_subst(eq.rhs, acc)
        if l == r:
            continue
        if isinstance(l, Var) and not occurs(l.name, r):
            acc = compose(acc, Substitution({l.name: r}))
        elif isinstance(r, Var) and r.name in placeholders and not occurs(r.name, l):
            acc = compose(acc, Substitution({r.name: l}))
        else:
            raise StepError(f"equation {l} = {r} cannot be generalised away")
    return acc


def case_branch(phi: InductiveDefSet, conclusion: Sequent, principal: Atom, branch: Branch,
                premise: Sequent, instance: bool = False) -> BranchInfo:
    """Check one Case premise and recover its renaming and case descendants.

    With ``instance`` set, the step is a substitution instance of a checked
    step: fresh variables may stand for arbitrary terms, and equations that
    became trivial under the instance are dropped as by Wk.
    """
    rest = multiset_minus(conclusion.antecedents, (principal,))
    if rest is None:
        raise StepError(f"principal {principal} is not an antecedent")
    ax = phi.axiom(branch.axiom)
    if ax.head.pred != principal.pred:
        raise StepError(f"axiom {ax.name} does not define {principal.pred}")
    ren = Substitution({v: Var(_placeholder(v)) for v in ax.variables()})
    holes = frozenset(_placeholder(v) for v in ax.variables())
    head = apply_subst(ax.head, ren)
    eqs = tuple(Eq(l, r) for l, r in zip(principal.args, head.args))
    ords = tuple(apply_subst(a, ren) for a in ax.ordinary_atoms)
    descs = tuple(apply_subst(a, ren) for a in ax.inductive_atoms)

    if instance:
        return _instance_branch(ax.name, rest, conclusion, eqs, ords, descs, holes, premise)

    gen = Substitution()
    body = (*rest, *ords, *descs) if branch.gen else (*rest, *eqs, *ords, *descs)
    expected = Sequent(body, conclusion.succedents)
    if branch.gen:
        gen = _generalise(eqs, holes)
        expected = apply_subst(expected, gen)
    fv = free_vars(conclusion)
    for rho, _, _ in match_sequent(expected, premise, pattern_vars=holes):
        images = [rho[h] for h in rho]
        if not all(isinstance(t, Var) for t in images):
            continue
        names = [t.name for t in images]
        if len(set(names)) != len(names) or set(names) & fv:
            continue
        actual_gen = Substitution({k: apply_subst(v, rho) for k, v in gen.items()
                                   if k not in holes})
        return BranchInfo(ax.name, rho,
                          tuple(apply_subst(apply_subst(d, gen), rho) for d in descs),
                          actual_gen)
    raise StepError(f"premise {premise} is not the {'generalised ' if branch.gen else ''}"
                    f"case distinction for axiom {ax.name}")


def _instance_branch(axname, rest, conclusion, eqs, ords, descs, holes, premise):
    # try with all equations kept first, then with every equation weakened away
    for keep_eqs in (True, False):
        body = (*rest, *eqs, *ords, *descs) if keep_eqs else (*rest, *ords, *descs)
        expected = Sequent(body, conclusion.succedents)
        for rho, _, _ in match_sequent(expected, premise, pattern_vars=holes):
            if keep_eqs:
                return BranchInfo(axname, rho, tuple(apply_subst(d, rho) for d in descs),
                                  Substitution())
            b = dict(rho)
            ok = True
            for eq in eqs:
                ext = match(eq.rhs, eq.lhs, b, pattern_vars=holes)
                if ext is None:
                    ok = False
                    break
                b = dict(ext)
            if ok:
                rho2 = Substitution(b)
                return BranchInfo(axname, rho2, tuple(apply_subst(d, rho2) for d in descs),
                                  Substitution(), weakened=tuple(apply_subst(e, rho2) for e in eqs))
    raise StepError(f"premise {premise} is not an instance of the case distinction for {axname}")


def _v(node, rule, clause, warning=False):
    return Violation(node, rule, clause, warning)


def validate_step(phi: InductiveDefSet, conclusion: Sequent, app: RuleApp,
                  premises: list[Sequent], node: str | None = None,
                  instance: bool = False) -> list[Violation]:
    """Schema conformance of one rule application.

    Returns the violations found (empty when the step is fine). Warnings
    are included with ``warning=True``.
    """
    tag = app.tag
    try:
        return _validate(phi, conclusion, app, premises, node, instance)
    except (StepError, DefinitionError) as exc:
        return [_v(node, tag, str(exc))]


def _arity(node, tag, premises, n):
    if len(premises) != n:
        return [_v(node, tag, f"expected {n} premise(s), got {len(premises)}")]
    return []


def _validate(phi, conclusion, app, premises, node, instance):
    tag = app.tag
    if isinstance(app, Subst):
        bad = _arity(node, tag, premises, 1)
        if bad:
            return bad
        if apply_subst(premises[0], app.sigma) != conclusion:
            return [_v(node, tag, f"premise{app.sigma} is not the conclusion")]
        return []

    if isinstance(app, Gen):
        bad = _arity(node, tag, premises, 1)
        if bad:
            return bad
        principal = app.principal
        rest = multiset_minus(conclusion.antecedents, (principal,))
        if rest is None:
            return [_v(node, tag, f"principal {principal} is not an antecedent")]
        if instance and principal.lhs == principal.rhs:
            # an instantiated Gen whose principal became u = u acts as Wk
            return _validate(phi, conclusion, Wk((principal,)), premises, node, instance)
        if occurs(app.var, app.term):
            return [_v(node, tag, f"{app.var} occurs in {app.term}")]
        expected = apply_subst(Sequent(rest, conclusion.succedents),
                               Substitution({app.var: app.term}))
        if expected != premises[0]:
            return [_v(node, tag, f"premise is not the conclusion generalised by {principal}")]
        return []

    if isinstance(app, Case):
        if app.principal not in conclusion.antecedents:
            return [_v(node, tag, f"principal {app.principal} is not an antecedent")]
        if not phi.signature.is_inductive(app.principal.pred):
            return [_v(node, tag, f"{app.principal.pred} is not inductive")]
        defining = {ax.name for ax in phi.defining(app.principal.pred)}
        named = [b.axiom for b in app.branches]
        if sorted(named) != sorted(defining) or len(set(named)) != len(named):
            return [_v(node, tag, f"branches {sorted(named)} do not cover axioms {sorted(defining)}")]
        bad = _arity(node, tag, premises, len(app.branches))
        if bad:
            return bad
        out = []
        for b, prem in zip(app.branches, premises):
            try:
                case_branch(phi, conclusion, app.principal, b, prem, instance)
            except StepError as exc:
                out.append(_v(node, tag, str(exc)))
        return out

    if isinstance(app, Unfold):
        delta = multiset_minus(conclusion.succedents, (app.principal,))
        if delta is None:
            return [_v(node, tag, f"principal {app.principal} is not a succedent")]
        ax = phi.axiom(app.axiom)
        sigma = match(ax.head, app.principal, pattern_vars=frozenset(ax.variables()))
        if sigma is None:
            return [_v(node, tag, f"{app.principal} does not instantiate the head of {ax.name}")]
        body = (*ax.ordinary_atoms, *ax.inductive_atoms)
        if len(premises) != len(body):
            return _arity(node, tag, premises, len(body))
        extra = frozenset(ax.variables()) - set(sigma)
        expected = [Sequent(conclusion.antecedents, (apply_subst(a, sigma), *delta)) for a in body]
        if not _premises_match(expected, premises, extra):
            return [_v(node, tag, f"premises differ from the unfolding by {ax.name}")]
        return []

    if isinstance(app, Wk):
        bad = _arity(node, tag, premises, 1)
        if bad:
            return bad
        p = premises[0]
        da = multiset_minus(conclusion.antecedents, p.antecedents)
        ds = multiset_minus(conclusion.succedents, p.succedents)
        if da is None or ds is None:
            return [_v(node, tag, "premise is not a sub-sequent of the conclusion")]
        if multiset_minus(da + ds, app.formulas) != ():
            return [_v(node, tag, "dropped formulas differ from the declared ones")]
        return []

    if isinstance(app, Cut):
        bad = _arity(node, tag, premises, 2)
        if bad:
            return bad
        f = app.formula
        for left, right in (premises, premises[::-1]):
            ls = multiset_minus(left.succedents, (f,))
            ra = multiset_minus(right.antecedents, (f,))
            if ls is None or ra is None:
                continue
            if (is_submultiset(left.antecedents, conclusion.antecedents)
                    and is_submultiset(ls, conclusion.succedents)
                    and is_submultiset(ra, conclusion.antecedents)
                    and is_submultiset(right.succedents, conclusion.succedents)):
                return []
        return [_v(node, tag, f"premises are not a cut on {f}")]

    if isinstance(app, Ax):
        bad = _arity(node, tag, premises, 0)
        if bad:
            return bad
        if not set(conclusion.antecedents) & set(conclusion.succedents):
            return [_v(node, tag, "no formula is both an antecedent and a succedent")]
        return []

    if isinstance(app, (AllR, ExL)):
        bad = _arity(node, tag, premises, 1)
        if bad:
            return bad
        return _quantifier(conclusion, app, premises[0], node, instance)

    if isinstance(app, Generic):
        return []

    raise TypeError(f"unknown rule application {app!r}")


def _premises_match(expected: list[Sequent], actual: list[Sequent], extra) -> bool:
    for perm in itertools.permutations(range(len(actual))):
        binding: dict = {}
        ok = True
        for e, j in zip(expected, perm):
            found = None
            for rho, _, _ in match_sequent(e, actual[j], binding, pattern_vars=extra):
                found = rho
                break
            if found is None:
                ok = False
                break
            binding = dict(found)
        if ok:
            return True
    return False


def _quantifier(conclusion, app, premise, node, instance):
    left = isinstance(app, ExL)
    kind = Exists if left else Forall
    side = conclusion.antecedents if left else conclusion.succedents
    fv = free_vars(conclusion)
    if not instance:
        if len(set(app.vars)) != len(app.vars) or set(app.vars) & fv:
            return [_v(node, app.tag, f"variables {list(app.vars)} are not fresh")]
    for f in dict.fromkeys(side):
        if not isinstance(f, kind) or len(f.vars) != len(app.vars):
            continue
        opened = apply_subst(f.body, Substitution({b: Var(v) for b, v in zip(f.vars, app.vars)}))
        rest = multiset_minus(side, (f,))
        if left:
            expected = Sequent((*rest, opened), conclusion.succedents)
        else:
            expected = Sequent(conclusion.antecedents, (*rest, opened))
        if expected == premise:
            return []
        if instance:
            # fresh variables of an instantiated step may have been instantiated
            holes = frozenset(app.vars)
            if next(match_sequent(expected, premise, pattern_vars=holes), None):
                return []
    return [_v(node, app.tag, "premise does not open a quantifier of the conclusion")]
