"""Recursive path ordering with multiset status, and its multiset extension.

Inductive atoms are compared as terms whose root symbol is the predicate;
predicates and functions share one precedence. Variables are minimal and
pairwise incomparable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .terms import App, Atom, Var
from .treeset import PrecedenceSpec


def _as_term(x):
    return x.as_term() if isinstance(x, Atom) else x


def canonical(t):
    """Representative of the permutation-equivalence class of ``t``."""
    t = _as_term(t)
    if isinstance(t, Var) or not t.args:
        return t
    args = sorted((canonical(a) for a in t.args), key=repr)
    return App(t.fn, tuple(args))


def equivalent(s, t) -> bool:
    return canonical(s) == canonical(t)


@dataclass(eq=False)
class OrderingContext:
    precedence: PrecedenceSpec = field(default_factory=PrecedenceSpec)
    _cache: dict = field(default_factory=dict, repr=False)

    def rpo_greater(self, s, t) -> bool:
        """``s >rpo t``."""
        return self._gt(canonical(s), canonical(t))

    def rpo_less(self, a, b) -> bool:
        return self.rpo_greater(b, a)

    def _ge(self, s, t) -> bool:
        return s == t or self._gt(s, t)

    def _gt(self, s, t) -> bool:
        key = (s, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self._gt_uncached(s, t)
        self._cache[key] = res
        return res

    def _gt_uncached(self, s, t) -> bool:
        if isinstance(s, Var) or s == t:
            return False
        if any(self._ge(si, t) for si in s.args):
            return True
        if isinstance(t, Var):
            return False
        if self.precedence.gt(s.fn, t.fn):
            return all(self._gt(s, tj) for tj in t.args)
        if s.fn == t.fn:
            return self._mul_gt(s.args, t.args)
        return False

    def _mul_gt(self, ms: Iterable, ns: Iterable) -> bool:
        # arguments are already canonical, so equivalence is equality
        m, n = Counter(ms), Counter(ns)
        common = m & n
        m_rest = list((m - common).elements())
        n_rest = list((n - common).elements())
        if not m_rest:
            return False
        return all(any(self._gt(x, y) for x in m_rest) for y in n_rest)

    def multiset_greater(self, big: Iterable, small: Iterable) -> bool:
        """Dershowitz–Manna extension of ``>rpo`` (modulo equivalence)."""
        return self._mul_gt([canonical(x) for x in big], [canonical(x) for x in small])

    def multiset_less(self, small: Iterable, big: Iterable) -> bool:
        return self.multiset_greater(big, small)


def rpo_less(ctx: OrderingContext, a, b) -> bool:
    return ctx.rpo_less(a, b)


def multiset_less(ctx: OrderingContext, a: Iterable, b: Iterable) -> bool:
    return ctx.multiset_less(a, b)
