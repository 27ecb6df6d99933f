"""First-order terms, formulas, sequents and substitutions.

Everything here is immutable. Variables are plain names; function and
predicate symbols are referred to by name and their kinds live in a
:class:`Signature`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class SignatureError(ValueError):
    pass


FUNCTION = "function"
ORDINARY = "ordinary-predicate"
INDUCTIVE = "inductive-predicate"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise SignatureError(f"negative arity for {self.name}")
        if self.kind not in (FUNCTION, ORDINARY, INDUCTIVE):
            raise SignatureError(f"unknown symbol kind {self.kind!r}")


@dataclass(frozen=True)
class Signature:
    symbols: Mapping[str, Symbol] = field(default_factory=dict)

    @classmethod
    def of(cls, symbols: Iterable[Symbol]) -> "Signature":
        table: dict[str, Symbol] = {}
        for sym in symbols:
            if sym.name in table and table[sym.name] != sym:
                raise SignatureError(f"symbol {sym.name} declared twice")
            table[sym.name] = sym
        return cls(table)

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def __getitem__(self, name: str) -> Symbol:
        return self.symbols[name]

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols.values())

    def functions(self) -> list[Symbol]:
        return [s for s in self if s.kind == FUNCTION]

    def is_inductive(self, name: str) -> bool:
        sym = self.symbols.get(name)
        return sym is not None and sym.kind == INDUCTIVE


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...] = ()

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def occurs(name: str, t: Term) -> bool:
    return any(v == name for v in term_vars(t))


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()
    inductive: bool = False

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({', '.join(map(str, self.args))})"

    def as_term(self) -> App:
        return App(self.pred, self.args)


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self):
        return f"¬{_paren(self.body)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_paren(self.left)} ∧ {_paren(self.right)}"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_paren(self.left)} ∨ {_paren(self.right)}"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_paren(self.left)} ⇒ {_paren(self.right)}"


@dataclass(frozen=True)
class Forall:
    vars: tuple[str, ...]
    body: "Formula"

    def __str__(self):
        return f"∀{','.join(self.vars)}. {self.body}"


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"

    def __str__(self):
        return f"∃{','.join(self.vars)}. {self.body}"


Formula = Union[Atom, Eq, Not, And, Or, Imp, Forall, Exists]


def _paren(f: Formula) -> str:
    if isinstance(f, (Atom, Eq, Not)):
        return str(f)
    return f"({f})"


def is_iaa_candidate(f: Formula) -> bool:
    return isinstance(f, Atom) and f.inductive


# --------------------------------------------------------------------------
# sequents


def _multiset_key(items: tuple) -> frozenset:
    return frozenset(Counter(items).items())


@dataclass(frozen=True, eq=False)
class Sequent:
    """``antecedents ⊢ succedents`` with multiset equality.

    Occurrence order is kept (it fixes IAA occurrence indices) but is
    ignored by ``==`` and ``hash``.
    """

    antecedents: tuple[Formula, ...] = ()
    succedents: tuple[Formula, ...] = ()

    def __eq__(self, other):
        if not isinstance(other, Sequent):
            return NotImplemented
        return (Counter(self.antecedents) == Counter(other.antecedents)
                and Counter(self.succedents) == Counter(other.succedents))

    def __hash__(self):
        return hash((_multiset_key(self.antecedents), _multiset_key(self.succedents)))

    def __str__(self):
        left = ", ".join(map(str, self.antecedents))
        right = ", ".join(map(str, self.succedents))
        return f"{left} ⊢ {right}".strip()

    def iaas(self) -> list[Atom]:
        return [f for f in self.antecedents if is_iaa_candidate(f)]

    def iaa_positions(self) -> list[int]:
        """Indices into ``antecedents`` of the inductive antecedent atoms."""
        return [i for i, f in enumerate(self.antecedents) if is_iaa_candidate(f)]


# --------------------------------------------------------------------------
# free variables


def free_vars(x) -> frozenset[str]:
    if isinstance(x, (Var, App)):
        return frozenset(term_vars(x))
    if isinstance(x, (Atom,)):
        return frozenset(v for a in x.args for v in term_vars(a))
    if isinstance(x, Eq):
        return frozenset(term_vars(x.lhs)) | frozenset(term_vars(x.rhs))
    if isinstance(x, Not):
        return free_vars(x.body)
    if isinstance(x, (And, Or, Imp)):
        return free_vars(x.left) | free_vars(x.right)
    if isinstance(x, (Forall, Exists)):
        return free_vars(x.body) - set(x.vars)
    if isinstance(x, Sequent):
        out: frozenset[str] = frozenset()
        for f in x.antecedents + x.succedents:
            out |= free_vars(f)
        return out
    raise TypeError(f"free_vars: unsupported {type(x).__name__}")


def variables_in_order(x) -> list[str]:
    """Free variables in first-occurrence order (deterministic)."""
    seen: dict[str, None] = {}
    if isinstance(x, Sequent):
        for f in x.antecedents + x.succedents:
            for v in variables_in_order(f):
                seen.setdefault(v)
        return list(seen)
    if isinstance(x, (Var, App)):
        for v in term_vars(x):
            seen.setdefault(v)
        return list(seen)
    if isinstance(x, Atom):
        for a in x.args:
            for v in term_vars(a):
                seen.setdefault(v)
        return list(seen)
    if isinstance(x, Eq):
        return variables_in_order(Atom("=", (x.lhs, x.rhs)))
    bound = set(x.vars) if isinstance(x, (Forall, Exists)) else set()
    parts = (x.body,) if isinstance(x, (Not, Forall, Exists)) else (x.left, x.right)
    for p in parts:
        for v in variables_in_order(p):
            if v not in bound:
                seen.setdefault(v)
    return list(seen)


# --------------------------------------------------------------------------
# substitutions


class Substitution(Mapping[str, Term]):
    """A finite map from variable names to terms.

    Identity entries ``x ↦ x`` may be stored (an explicit identity over a
    named variable set is representable), but equality and ``bool`` look
    only at the non-identity part.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()):
        m = dict(bindings)
        for k, v in m.items():
            if not isinstance(k, str) or not isinstance(v, (Var, App)):
                raise TypeError(f"bad binding {k!r} ↦ {v!r}")
        self._map = m

    @classmethod
    def identity(cls, names: Iterable[str]) -> "Substitution":
        return cls({n: Var(n) for n in names})

    def __getitem__(self, name: str) -> Term:
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def lookup(self, name: str) -> Term:
        return self._map.get(name, Var(name))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._map)

    def proper(self) -> dict[str, Term]:
        return {k: v for k, v in self._map.items() if v != Var(k)}

    def is_identity(self) -> bool:
        return not self.proper()

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self.proper() == other.proper()
        if isinstance(other, Mapping):
            return self.proper() == Substitution(other).proper()
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.proper().items()))

    def __bool__(self):
        return not self.is_identity()

    def range_vars(self) -> frozenset[str]:
        return frozenset(v for t in self._map.values() for v in term_vars(t))

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({k: v for k, v in self._map.items() if k in keep})

    def __repr__(self):
        return f"Substitution({self})"

    def __str__(self):
        inner = "; ".join(f"{k} ↦ {v}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """``s1 s2``: apply ``s1`` first, then ``s2``."""
    out = {k: apply_subst(v, s2) for k, v in s1.items()}
    for k, v in s2.items():
        if k not in out:
            out[k] = v
    return Substitution(out)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``x``, ``x'``, ``x''``, ... : the first name not in ``avoid``."""
    taken = set(avoid)
    root = base.rstrip("'")
    name = root
    while name in taken:
        name += "'"
    return name


def apply_subst(x, s: Mapping[str, Term]):
    """Simultaneous substitution on terms, formulas and sequents."""
    if not isinstance(s, Substitution):
        s = Substitution(s)
    if isinstance(x, Var):
        return s.lookup(x.name)
    if isinstance(x, App):
        if not x.args:
            return x
        return App(x.fn, tuple(apply_subst(a, s) for a in x.args))
    if isinstance(x, Atom):
        return Atom(x.pred, tuple(apply_subst(a, s) for a in x.args), x.inductive)
    if isinstance(x, Eq):
        return Eq(apply_subst(x.lhs, s), apply_subst(x.rhs, s))
    if isinstance(x, Not):
        return Not(apply_subst(x.body, s))
    if isinstance(x, (And, Or, Imp)):
        return type(x)(apply_subst(x.left, s), apply_subst(x.right, s))
    if isinstance(x, (Forall, Exists)):
        return _subst_binder(x, s)
    if isinstance(x, Sequent):
        return Sequent(tuple(apply_subst(f, s) for f in x.antecedents),
                       tuple(apply_subst(f, s) for f in x.succedents))
    raise TypeError(f"apply_subst: unsupported {type(x).__name__}")


def _subst_binder(f, s: Substitution):
    bound = set(f.vars)
    inner = {k: v for k, v in s.items() if k not in bound}
    relevant = free_vars(f.body) - bound
    captured = {v for k in relevant if k in inner for v in term_vars(inner[k])}
    new_vars = []
    avoid = set(captured) | set(free_vars(f.body)) | set(inner) | {
        v for t in inner.values() for v in term_vars(t)}
    for v in f.vars:
        if v in captured:
            nv = fresh_name(v, avoid)
            avoid.add(nv)
            inner[v] = Var(nv)
            new_vars.append(nv)
        else:
            new_vars.append(v)
    return type(f)(tuple(new_vars), apply_subst(f.body, Substitution(inner)))


# --------------------------------------------------------------------------
# matching


def match(pattern, subject, binding: Mapping[str, Term] | None = None,
          pattern_vars: frozenset[str] | set[str] | None = None) -> Substitution | None:
    """One-way matching: a substitution ``s`` with ``pattern[s] ≡ subject``.

    When ``pattern_vars`` is given only those variables may be bound; other
    variables must occur identically in the subject.
    """
    b = dict(binding or {})
    if _match(pattern, subject, b, pattern_vars):
        return Substitution(b)
    return None


def _match(p, t, b: dict, pvars) -> bool:
    if isinstance(p, Var):
        if pvars is not None and p.name not in pvars:
            return p == t
        if p.name in b:
            return b[p.name] == t
        if not isinstance(t, (Var, App)):
            return False
        b[p.name] = t
        return True
    if isinstance(p, App):
        if not isinstance(t, App) or p.fn != t.fn or len(p.args) != len(t.args):
            return False
        return all(_match(pa, ta, b, pvars) for pa, ta in zip(p.args, t.args))
    if isinstance(p, Atom):
        if (not isinstance(t, Atom) or p.pred != t.pred
                or len(p.args) != len(t.args) or p.inductive != t.inductive):
            return False
        return all(_match(pa, ta, b, pvars) for pa, ta in zip(p.args, t.args))
    if isinstance(p, Eq):
        return (isinstance(t, Eq) and _match(p.lhs, t.lhs, b, pvars)
                and _match(p.rhs, t.rhs, b, pvars))
    if isinstance(p, Not):
        return isinstance(t, Not) and _match(p.body, t.body, b, pvars)
    if isinstance(p, (And, Or, Imp)):
        return (type(t) is type(p) and _match(p.left, t.left, b, pvars)
                and _match(p.right, t.right, b, pvars))
    if isinstance(p, (Forall, Exists)):
        # bound variables must coincide; they are never pattern variables
        if type(t) is not type(p) or p.vars != t.vars:
            return False
        inner = (pvars if pvars is not None else free_vars(p)) - set(p.vars)
        return _match(p.body, t.body, b, frozenset(inner))
    raise TypeError(f"match: unsupported {type(p).__name__}")


def match_multiset(patterns: tuple, subjects: tuple, binding: Mapping[str, Term] | None = None,
                   pattern_vars=None) -> Iterator[tuple[Substitution, tuple[int, ...]]]:
    """All ways to match a pattern multiset onto a subject multiset exactly.

    Yields ``(substitution, assignment)`` where ``assignment[i]`` is the index
    in ``subjects`` matched by ``patterns[i]``.
    """
    if len(patterns) != len(subjects):
        return
    yield from _match_ms(patterns, subjects, 0, dict(binding or {}), [], set(), pattern_vars)


def _match_ms(pats, subs, i, b, assign, used, pvars):
    if i == len(pats):
        yield Substitution(b), tuple(assign)
        return
    for j, s in enumerate(subs):
        if j in used:
            continue
        trial = dict(b)
        if _match(pats[i], s, trial, pvars):
            used.add(j)
            assign.append(j)
            yield from _match_ms(pats, subs, i + 1, trial, assign, used, pvars)
            assign.pop()
            used.discard(j)


def match_sequent(pattern: Sequent, subject: Sequent, binding=None, pattern_vars=None
                  ) -> Iterator[tuple[Substitution, tuple[int, ...], tuple[int, ...]]]:
    """Exact multiset matching of both sides of a sequent."""
    for s_left, a_left in match_multiset(pattern.antecedents, subject.antecedents,
                                         binding, pattern_vars):
        for s_right, a_right in match_multiset(pattern.succedents, subject.succedents,
                                               s_left, pattern_vars):
            yield s_right, a_left, a_right


def multiset_minus(big: tuple, small: tuple) -> tuple | None:
    """``big ∖ small`` as multisets, or None if ``small ⊄ big``."""
    rest = list(big)
    for x in small:
        try:
            rest.remove(x)
        except ValueError:
            return None
    return tuple(rest)


def is_submultiset(small: tuple, big: tuple) -> bool:
    return multiset_minus(big, small) is not None
