"""Reading and writing ``.proof`` files.

A file is a sequence of top-level forms::

    (signature (fun 0 0) (fun s 1) (ind N 1) (ord Q 1))
    (axiom n1 () ((N x)) (N (s x)))
    (ord-ext Q (atoms (Q 0)))
    (tree main 1
      (node 1 (seq ((N x)) ((N x))) (rule Ax) (children))
      (bud 2 (seq ...) (companion 1)))
    (measure (seq ((N t)) ((R t 0))) (indices 0))
    (precedence (< 0 s))

Terms are ``x``, ``0``, ``(s x)``; atoms ``(N x)`` and ``(= t u)``.
Connectives: ``and or imp not forall exists``.
"""

from __future__ import annotations

from typing import Iterable

from .rules import (
    AllR, Ax, Axiom, Branch, Case, Cut, DefinitionError, ExL, Gen, Generic,
    InductiveDefSet, RuleApp, Subst, Unfold, Wk,
)
from .sexpr import SexprError, SList, Sym, dumps, read_all
from .terms import (
    And, App, Atom, Eq, Exists, Forall, FUNCTION, Imp, INDUCTIVE, Not, ORDINARY, Or,
    Sequent, Signature, SignatureError, Substitution, Symbol, Var,
)
from .treeset import (
    MeasureRule, MeasureSpec, PrecedenceError, PrecedenceSpec, ProofDocument, ProofNode,
    ProofTreeSet, ReferenceIntegrityError, Tree,
)


class ProofFormatError(SexprError):
    pass


CONNECTIVES = {"and", "or", "imp", "not", "forall", "exists", "="}
_KINDS = {"fun": FUNCTION, "ind": INDUCTIVE, "ord": ORDINARY}
_KIND_NAMES = {v: k for k, v in _KINDS.items()}


def _err(msg, at=None):
    return ProofFormatError(msg, getattr(at, "line", None), getattr(at, "col", None))


def _expect_list(x, what, at=None):
    if not isinstance(x, list):
        raise _err(f"expected {what}", x if at is None else at)
    return x


def _head(x) -> str | None:
    if isinstance(x, list) and x and isinstance(x[0], str):
        return x[0]
    return None


class _Reader:
    def __init__(self, sig: Signature):
        self.sig = sig

    def term(self, x):
        if isinstance(x, str):
            sym = self.sig.symbols.get(x)
            if sym is None:
                if x in CONNECTIVES:
                    raise _err(f"reserved word {x!r} used as a term", x)
                return Var(str(x))
            if sym.kind != FUNCTION:
                raise _err(f"predicate {x} used as a term", x)
            if sym.arity != 0:
                raise _err(f"{x} expects {sym.arity} argument(s)", x)
            return App(str(x))
        if not x or not isinstance(x[0], str):
            raise _err("malformed term", x)
        sym = self.sig.symbols.get(x[0])
        if sym is None or sym.kind != FUNCTION:
            raise _err(f"unknown function symbol {x[0]!r}", x[0])
        if len(x) - 1 != sym.arity:
            raise _err(f"{x[0]} expects {sym.arity} argument(s), got {len(x) - 1}", x[0])
        return App(str(x[0]), tuple(self.term(a) for a in x[1:]))

    def atom(self, x) -> Atom:
        f = self.formula(x)
        if not isinstance(f, Atom):
            raise _err("expected a predicate atom", x)
        return f

    def formula(self, x):
        if isinstance(x, str):
            x = SList([x], getattr(x, "line", 0), getattr(x, "col", 0))
        if not x or not isinstance(x[0], str):
            raise _err("malformed formula", x)
        h = x[0]
        if h == "=":
            if len(x) != 3:
                raise _err("= takes two terms", h)
            return Eq(self.term(x[1]), self.term(x[2]))
        if h in ("and", "or", "imp"):
            if len(x) != 3:
                raise _err(f"{h} takes two formulas", h)
            cls = {"and": And, "or": Or, "imp": Imp}[h]
            return cls(self.formula(x[1]), self.formula(x[2]))
        if h == "not":
            if len(x) != 2:
                raise _err("not takes one formula", h)
            return Not(self.formula(x[1]))
        if h in ("forall", "exists"):
            if len(x) != 3 or not isinstance(x[1], list):
                raise _err(f"({h} (vars) formula) expected", h)
            vs = tuple(str(v) for v in x[1])
            return (Forall if h == "forall" else Exists)(vs, self.formula(x[2]))
        sym = self.sig.symbols.get(h)
        if sym is None or sym.kind == FUNCTION:
            raise _err(f"unknown predicate {h!r}", h)
        if len(x) - 1 != sym.arity:
            raise _err(f"{h} expects {sym.arity} argument(s), got {len(x) - 1}", h)
        return Atom(str(h), tuple(self.term(a) for a in x[1:]), sym.kind == INDUCTIVE)

    def sequent(self, x) -> Sequent:
        if _head(x) != "seq" or len(x) != 3:
            raise _err("expected (seq (antecedents) (succedents))", x)
        ante = _expect_list(x[1], "antecedent list", x)
        succ = _expect_list(x[2], "succedent list", x)
        return Sequent(tuple(self.formula(f) for f in ante), tuple(self.formula(f) for f in succ))

    def rule(self, x) -> RuleApp:
        if _head(x) != "rule" or len(x) < 2:
            raise _err("expected (rule <name> ...)", x)
        tag, args = x[1], x[2:]
        if tag == "Subst":
            if len(args) != 1 or not isinstance(args[0], list):
                raise _err("(rule Subst ((x t) ...)) expected", tag)
            binds = {}
            for b in args[0]:
                if not isinstance(b, list) or len(b) != 2 or not isinstance(b[0], str):
                    raise _err("substitution binding must be (var term)", tag)
                if str(b[0]) in binds:
                    raise _err(f"variable {b[0]} bound twice", b[0])
                binds[str(b[0])] = self.term(b[1])
            return Subst(Substitution(binds))
        if tag == "Gen":
            if len(args) != 1 or _head(args[0]) != "=" or len(args[0]) != 3:
                raise _err("(rule Gen (= var term)) expected", tag)
            v = self.term(args[0][1])
            if not isinstance(v, Var):
                raise _err("Gen principal must have a variable on the left", args[0])
            return Gen(v.name, self.term(args[0][2]))
        if tag == "Case":
            if len(args) != 2 or _head(args[1]) != "branches":
                raise _err("(rule Case <atom> (branches (<axiom> <child> [gen]) ...)) expected", tag)
            branches = []
            for b in args[1][1:]:
                if not isinstance(b, list) or len(b) not in (2, 3) or not all(
                        isinstance(e, str) for e in b):
                    raise _err("branch must be (<axiom> <child> [gen])", args[1])
                if len(b) == 3 and b[2] != "gen":
                    raise _err(f"unknown branch flag {b[2]!r}", b[2])
                branches.append(Branch(str(b[0]), str(b[1]), len(b) == 3))
            return Case(self.atom(args[0]), tuple(branches))
        if tag == "Unfold":
            if len(args) != 2 or not isinstance(args[0], str):
                raise _err("(rule Unfold <axiom> <atom>) expected", tag)
            return Unfold(str(args[0]), self.atom(args[1]))
        if tag == "Ax":
            if args:
                raise _err("Ax takes no arguments", tag)
            return Ax()
        if tag == "Wk":
            return Wk(tuple(self.formula(f) for f in args))
        if tag == "Cut":
            if len(args) != 1:
                raise _err("(rule Cut <formula>) expected", tag)
            return Cut(self.formula(args[0]))
        if tag in ("AllR", "ExL"):
            if len(args) != 1 or not isinstance(args[0], list):
                raise _err(f"(rule {tag} (<vars>)) expected", tag)
            vs = tuple(str(v) for v in args[0])
            return AllR(vs) if tag == "AllR" else ExL(vs)
        if tag == "Generic":
            if len(args) != 2 or args[1] not in ("true", "false"):
                raise _err("(rule Generic <name> true|false) expected", tag)
            return Generic(str(args[0]), args[1] == "true")
        raise _err(f"unknown rule {tag!r}", tag)


def _optional_tag(items, at):
    tag = None
    for it in items:
        if _head(it) == "tag" and len(it) == 2 and isinstance(it[1], str):
            tag = str(it[1])
        else:
            raise _err("unexpected node clause", it if isinstance(it, list) else at)
    return tag


def parse(text: str) -> ProofDocument:
    """Parse a ``.proof`` document; raises :class:`ProofFormatError`."""
    forms = read_all(text)
    symbols: list[Symbol] = []
    for f in forms:
        if _head(f) == "signature":
            for d in f[1:]:
                if (not isinstance(d, list) or len(d) != 3 or d[0] not in _KINDS
                        or not isinstance(d[1], str) or not str(d[2]).isdigit()):
                    raise _err("signature entries look like (fun|ind|ord <name> <arity>)", d)
                if str(d[1]) in CONNECTIVES:
                    raise _err(f"reserved word {d[1]!r} declared as a symbol", d[1])
                symbols.append(Symbol(str(d[1]), _KINDS[d[0]], int(d[2])))
    try:
        sig = Signature.of(symbols)
    except SignatureError as exc:
        raise _err(str(exc)) from None
    rd = _Reader(sig)

    axioms: list[Axiom] = []
    extensions: dict[str, frozenset] = {}
    trees: list[Tree] = []
    nodes: dict[str, ProofNode] = {}
    measures: list[MeasureRule] = []
    chains: list[tuple[str, ...]] = []
    status: dict[str, str] = {}

    for f in forms:
        h = _head(f)
        if h == "signature":
            continue
        if h == "axiom":
            if len(f) != 5 or not isinstance(f[1], str):
                raise _err("(axiom <name> (<ordinary>) (<inductive>) <head>) expected", f)
            ords = tuple(rd.atom(a) for a in _expect_list(f[2], "ordinary atom list", f))
            inds = tuple(rd.atom(a) for a in _expect_list(f[3], "inductive atom list", f))
            axioms.append(Axiom(str(f[1]), ords, inds, rd.atom(f[4])))
        elif h == "ord-ext":
            if len(f) != 3 or not isinstance(f[1], str) or _head(f[2]) != "atoms":
                raise _err("(ord-ext <pred> (atoms ...)) expected", f)
            ext = set()
            for a in f[2][1:]:
                atom = rd.atom(a)
                if atom.pred != f[1]:
                    raise _err(f"atom {atom} does not belong to {f[1]}", a)
                ext.add(atom.args)
            extensions[str(f[1])] = frozenset(ext)
        elif h == "tree":
            _read_tree(rd, f, trees, nodes)
        elif h == "measure":
            if len(f) != 3 or _head(f[2]) != "indices":
                raise _err("(measure (seq ...) (indices k ...)) expected", f)
            pat = rd.sequent(f[1])
            idx = []
            for k in f[2][1:]:
                if not isinstance(k, str) or not k.isdigit():
                    raise _err("measure indices are naturals", k)
                idx.append(int(k))
            try:
                measures.append(MeasureRule(pat, tuple(idx)))
            except ValueError as exc:
                raise _err(str(exc), f) from None
        elif h == "precedence":
            for c in f[1:]:
                if _head(c) == "<" and len(c) >= 3 and all(isinstance(s, str) for s in c):
                    chains.append(tuple(str(s) for s in c[1:]))
                elif _head(c) == "status" and len(c) == 3:
                    if c[2] != "mul":
                        raise _err(f"unsupported status {c[2]!r}", c[2])
                    status[str(c[1])] = "mul"
                else:
                    raise _err("precedence entries are (< a b ...) or (status f mul)", c)
            for c in chains:
                for s in c:
                    if s not in sig:
                        raise _err(f"precedence mentions undeclared symbol {s!r}", f)
        else:
            raise _err(f"unknown top-level form {h!r}", f)

    try:
        defs = InductiveDefSet(sig, tuple(axioms), extensions)
    except DefinitionError as exc:
        raise _err(str(exc)) from None
    ts = ProofTreeSet(tuple(trees), nodes)
    try:
        ts.check_references()
    except ReferenceIntegrityError as exc:
        raise _err(str(exc)) from None
    for n in nodes.values():
        if isinstance(n.rule, Case):
            missing = {b.child for b in n.rule.branches} ^ set(n.children)
            if missing:
                raise _err(f"node {n.id}: Case branches and children disagree")
        for name in _axioms_used(n.rule):
            try:
                defs.axiom(name)
            except DefinitionError:
                raise _err(f"node {n.id}: unknown axiom {name!r}") from None
    prec = PrecedenceSpec(tuple(chains), status)
    try:
        prec.greater  # noqa: B018 - forces the cycle check
    except PrecedenceError as exc:
        raise _err(str(exc)) from None
    return ProofDocument(defs, ts, MeasureSpec(tuple(measures)), prec)


def _axioms_used(rule) -> Iterable[str]:
    if isinstance(rule, Case):
        return [b.axiom for b in rule.branches]
    if isinstance(rule, Unfold):
        return [rule.axiom]
    return []


def _read_tree(rd: _Reader, f, trees, nodes):
    if len(f) < 3 or not isinstance(f[1], str) or not isinstance(f[2], str):
        raise _err("(tree <name> <root-id> ...) expected", f)
    for item in f[3:]:
        h = _head(item)
        if h not in ("node", "bud") or len(item) < 3 or not isinstance(item[1], str):
            raise _err("tree items are (node ...) or (bud ...)", item)
        nid = str(item[1])
        if nid in nodes:
            raise _err(f"duplicate node id {nid}", item[1])
        seq = rd.sequent(item[2])
        if h == "node":
            if len(item) < 5 or _head(item[4]) != "children":
                raise _err("(node <id> (seq ...) (rule ...) (children ...)) expected", item)
            rule = rd.rule(item[3])
            kids = tuple(str(c) for c in item[4][1:])
            nodes[nid] = ProofNode(nid, seq, rule, kids, None, _optional_tag(item[5:], item))
        else:
            if len(item) < 4 or _head(item[3]) != "companion" or len(item[3]) != 2:
                raise _err("(bud <id> (seq ...) (companion <id>)) expected", item)
            nodes[nid] = ProofNode(nid, seq, None, (), str(item[3][1]),
                                   _optional_tag(item[4:], item))
    trees.append(Tree(str(f[1]), str(f[2])))


def load(path) -> ProofDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# --------------------------------------------------------------------------
# serialisation


def term_sx(t):
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return [t.fn, *map(term_sx, t.args)]


def formula_sx(f):
    if isinstance(f, Atom):
        return [f.pred, *map(term_sx, f.args)]
    if isinstance(f, Eq):
        return ["=", term_sx(f.lhs), term_sx(f.rhs)]
    if isinstance(f, Not):
        return ["not", formula_sx(f.body)]
    if isinstance(f, (And, Or, Imp)):
        name = {And: "and", Or: "or", Imp: "imp"}[type(f)]
        return [name, formula_sx(f.left), formula_sx(f.right)]
    if isinstance(f, (Forall, Exists)):
        return ["forall" if isinstance(f, Forall) else "exists", list(f.vars), formula_sx(f.body)]
    raise TypeError(f"cannot serialise {f!r}")


def sequent_sx(s: Sequent):
    return ["seq", [formula_sx(f) for f in s.antecedents], [formula_sx(f) for f in s.succedents]]


def subst_sx(s: Substitution):
    return [[k, term_sx(v)] for k, v in s.items()]


def rule_sx(r: RuleApp):
    if isinstance(r, Subst):
        return ["rule", "Subst", subst_sx(r.sigma)]
    if isinstance(r, Gen):
        return ["rule", "Gen", ["=", r.var, term_sx(r.term)]]
    if isinstance(r, Case):
        br = [[b.axiom, b.child, "gen"] if b.gen else [b.axiom, b.child] for b in r.branches]
        return ["rule", "Case", formula_sx(r.principal), ["branches", *br]]
    if isinstance(r, Unfold):
        return ["rule", "Unfold", r.axiom, formula_sx(r.principal)]
    if isinstance(r, Ax):
        return ["rule", "Ax"]
    if isinstance(r, Wk):
        return ["rule", "Wk", *map(formula_sx, r.formulas)]
    if isinstance(r, Cut):
        return ["rule", "Cut", formula_sx(r.formula)]
    if isinstance(r, AllR):
        return ["rule", "AllR", list(r.vars)]
    if isinstance(r, ExL):
        return ["rule", "ExL", list(r.vars)]
    if isinstance(r, Generic):
        return ["rule", "Generic", r.name, "true" if r.trace_preserving else "false"]
    raise TypeError(f"cannot serialise rule {r!r}")


def _node_sx(n: ProofNode):
    extra = [["tag", _quoted(n.tag)]] if n.tag is not None else []
    if n.is_bud:
        return ["bud", n.id, sequent_sx(n.sequent), ["companion", n.companion], *extra]
    return ["node", n.id, sequent_sx(n.sequent), rule_sx(n.rule), ["children", *n.children], *extra]


def _quoted(s: str):
    return Sym(s, quoted=True)


def _tree_order(ts: ProofTreeSet, root: str) -> list[str]:
    out, stack = [], [root]
    while stack:
        nid = stack.pop()
        out.append(nid)
        stack.extend(reversed(ts.nodes[nid].children))
    return out


def serialize(doc: ProofDocument) -> str:
    """Write a document; ``parse(serialize(d)) == d``."""
    out = []
    sig = doc.defs.signature
    out.append(dumps(["signature", *[[_KIND_NAMES[s.kind], s.name, str(s.arity)] for s in sig]]))
    for ax in doc.defs.axioms:
        out.append(dumps(["axiom", ax.name, [formula_sx(a) for a in ax.ordinary_atoms],
                          [formula_sx(a) for a in ax.inductive_atoms], formula_sx(ax.head)]))
    for pred, ext in doc.defs.ordinary_extensions.items():
        atoms = [[pred, *map(term_sx, args)] for args in sorted(ext, key=str)]
        out.append(dumps(["ord-ext", pred, ["atoms", *atoms]]))
    ts = doc.proofs
    for t in ts.trees:
        items = [_node_sx(ts.nodes[nid]) for nid in _tree_order(ts, t.root)]
        out.append("(tree " + dumps(t.name) + " " + t.root
                   + "".join("\n  " + dumps(i, indent=2, _level=1) for i in items) + ")")
    for m in doc.measures.rules:
        out.append(dumps(["measure", sequent_sx(m.pattern), ["indices", *map(str, m.indices)]]))
    prec = doc.precedence
    if prec.chains or prec.status:
        entries = [["<", *c] for c in prec.chains]
        entries += [["status", s, st] for s, st in prec.status.items()]
        out.append(dumps(["precedence", *entries]))
    return "\n".join(out) + "\n"


def dump(doc: ProofDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(doc))
