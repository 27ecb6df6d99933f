"""Bounded evaluation in the standard model.

Inductive predicates are approximated from below: stage ``k`` holds the
atoms derivable by at most ``k`` rounds of axiom applications over a finite
universe of ground terms. Evaluation is three-valued, answering ``UNKNOWN``
whenever a later stage or a larger universe could change the answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .rules import InductiveDefSet
from .terms import (
    And, App, Atom, Eq, Exists, Forall, Imp, Not, Or, Sequent, Signature, Substitution,
    apply_subst, free_vars, term_depth,
)


class Truth(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


T, F, U = Truth.TRUE, Truth.FALSE, Truth.UNKNOWN


def term_universe(sig: Signature, depth: int) -> frozenset:
    """All ground terms of depth at most ``depth`` (closed under subterms)."""
    funs = sig.functions()
    level = {App(f.name) for f in funs if f.arity == 0}
    terms = set(level)
    for _ in range(depth):
        new = set()
        for f in funs:
            if f.arity == 0:
                continue
            for args in itertools.product(sorted(terms, key=str), repeat=f.arity):
                t = App(f.name, args)
                if t not in terms:
                    new.add(t)
        if not new:
            break
        terms |= new
    return frozenset(terms)


@dataclass(frozen=True)
class Approximant:
    stage: int
    # predicate name → set of argument tuples
    extension: dict[str, frozenset[tuple]]

    def holds(self, atom: Atom) -> bool:
        return atom.args in self.extension.get(atom.pred, frozenset())

    def __le__(self, other: "Approximant") -> bool:
        return all(v <= other.extension.get(k, frozenset()) for k, v in self.extension.items())


def approximant(phi: InductiveDefSet, k: int, universe) -> Approximant:
    """``k`` simultaneous rounds of the one-step operator, starting empty."""
    universe = frozenset(universe)
    ordered = sorted(universe, key=lambda t: (term_depth(t), str(t)))
    ext: dict[str, set] = {}
    for _ in range(k):
        new = {p: set(v) for p, v in ext.items()}
        for ax in phi.axioms:
            names = ax.variables()
            for values in itertools.product(ordered, repeat=len(names)):
                s = Substitution(dict(zip(names, values)))
                head = apply_subst(ax.head, s)
                if not all(a in universe for a in head.args):
                    continue
                ok = all(apply_subst(q, s).args in phi.ordinary_extensions.get(q.pred, ())
                         for q in ax.ordinary_atoms)
                ok = ok and all(apply_subst(p, s).args in ext.get(p.pred, ())
                                for p in ax.inductive_atoms)
                if ok:
                    new.setdefault(head.pred, set()).add(head.args)
        ext = new
    return Approximant(k, {p: frozenset(v) for p, v in ext.items()})


def _not(v: Truth) -> Truth:
    return {T: F, F: T, U: U}[v]


def _and(a: Truth, b: Truth) -> Truth:
    if F in (a, b):
        return F
    if U in (a, b):
        return U
    return T


def _or(a: Truth, b: Truth) -> Truth:
    return _not(_and(_not(a), _not(b)))


def eval_formula(phi: InductiveDefSet, f, approx: Approximant, universe) -> Truth:
    if isinstance(f, Eq):
        return T if f.lhs == f.rhs else F
    if isinstance(f, Atom):
        if f.inductive:
            return T if approx.holds(f) else U
        return T if f.args in phi.ordinary_extensions.get(f.pred, ()) else F
    if isinstance(f, Not):
        return _not(eval_formula(phi, f.body, approx, universe))
    if isinstance(f, And):
        return _and(eval_formula(phi, f.left, approx, universe),
                    eval_formula(phi, f.right, approx, universe))
    if isinstance(f, Or):
        return _or(eval_formula(phi, f.left, approx, universe),
                   eval_formula(phi, f.right, approx, universe))
    if isinstance(f, Imp):
        return _or(_not(eval_formula(phi, f.left, approx, universe)),
                   eval_formula(phi, f.right, approx, universe))
    if isinstance(f, (Forall, Exists)):
        each = []
        for values in itertools.product(sorted(universe, key=str), repeat=len(f.vars)):
            inst = apply_subst(f.body, Substitution(dict(zip(f.vars, values))))
            each.append(eval_formula(phi, inst, approx, universe))
        # the universe is only a finite part of the domain
        if isinstance(f, Forall):
            return F if F in each else U
        return T if T in each else U
    raise TypeError(f"cannot evaluate {f!r}")


def eval_ground_sequent(phi: InductiveDefSet, s: Sequent, k: int, universe,
                        approx: Approximant | None = None) -> Truth:
    """``Γ ⊢ Δ`` holds when some antecedent fails or some succedent holds."""
    if free_vars(s):
        raise ValueError(f"sequent {s} is not ground")
    if approx is None:
        approx = approximant(phi, k, universe)
    left = [eval_formula(phi, g, approx, universe) for g in s.antecedents]
    right = [eval_formula(phi, d, approx, universe) for d in s.succedents]
    if F in left or T in right:
        return T
    if all(v is T for v in left) and all(v is F for v in right):
        return F
    return U


def numeral(n: int, zero: str = "0", succ: str = "s") -> App:
    t = App(zero)
    for _ in range(n):
        t = App(succ, (t,))
    return t


def ground_instances(s: Sequent, universe):
    """Every instance of ``s`` whose free variables range over ``universe``."""
    names = sorted(free_vars(s))
    ordered = sorted(universe, key=lambda t: (term_depth(t), str(t)))
    for values in itertools.product(ordered, repeat=len(names)):
        sub = Substitution(dict(zip(names, values)))
        yield sub, apply_subst(s, sub)


__all__ = [
    "Approximant", "Truth", "approximant", "eval_formula", "eval_ground_sequent",
    "ground_instances", "numeral", "term_universe",]
